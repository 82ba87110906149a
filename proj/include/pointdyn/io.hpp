#pragma once

#include <charconv>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pointdyn/entropy.hpp"
#include "pointdyn/fixtures.hpp"
#include "pointdyn/horseshoe.hpp"
#include "pointdyn/limit_analysis.hpp"
#include "pointdyn/metric_system.hpp"

namespace pointdyn::io {

using nlohmann::json;

// Distances travel as shortest round-trip decimal strings so that files
// reproduce the exact binary values on every conforming platform.
inline std::string dist_to_string(Dist v) {
    if (v == kInfiniteDist) return "inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("distance formatting failed");
    return std::string(buf, p);
}

inline Dist dist_from_string(std::string_view s) {
    if (s == "inf") return kInfiniteDist;
    Dist v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::invalid_argument("malformed distance literal: " + std::string(s));
    return v;
}

inline Dist dist_from_json(const json& j) {
    if (j.is_string()) return dist_from_string(j.get<std::string>());
    if (j.is_number()) return j.get<double>();
    throw std::invalid_argument("distance must be a decimal string or number");
}

struct SystemFile {
    std::string name;
    MetricSystem system;
    std::optional<MapFamily> family;
};

inline json metric_to_json(const MetricSystem& sys) {
    json m;
    if (const auto* em = std::get_if<ExplicitMatrix>(&sys.metric())) {
        m["kind"] = "matrix";
        json rows = json::array();
        for (Point i = 0; i < sys.point_count(); ++i) {
            json row = json::array();
            for (Point j = 0; j < sys.point_count(); ++j)
                row.push_back(dist_to_string(em->at(i, j)));
            rows.push_back(std::move(row));
        }
        m["data"] = std::move(rows);
    } else if (const auto* cg = std::get_if<CircleGrid>(&sys.metric())) {
        m["kind"] = "circle";
        m["n"] = cg->n;
    } else {
        m["kind"] = "binary_words";
        m["k"] = std::get<BinaryWords>(sys.metric()).k;
    }
    return m;
}

inline std::string serialize(const SystemFile& file) {
    json j;
    j["name"] = file.name;
    j["metric"] = metric_to_json(file.system);
    j["map"] = file.system.map();
    if (file.system.labels()) j["labels"] = *file.system.labels();
    if (file.family) {
        json fam = json::array();
        for (const auto& m : file.family->members) fam.push_back(m);
        j["family"] = std::move(fam);
    }
    return j.dump(1, ' ') + "\n";
}

inline SystemFile parse_system(std::string_view text, bool reject_invalid = true) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed system document: ") + e.what());
    }
    if (!j.is_object() || !j.contains("metric") || !j.contains("map"))
        throw std::invalid_argument("system document needs \"metric\" and \"map\" fields");

    const json& m = j["metric"];
    const std::string kind = m.value("kind", "");
    MetricProvider provider = CircleGrid{1};
    if (kind == "matrix") {
        const auto& rows = m.at("data");
        const std::uint32_t n = static_cast<std::uint32_t>(rows.size());
        std::vector<Dist> d;
        d.reserve(static_cast<std::size_t>(n) * n);
        for (const auto& row : rows) {
            if (row.size() != n) throw std::invalid_argument("matrix metric must be square");
            for (const auto& cell : row) d.push_back(dist_from_json(cell));
        }
        provider = ExplicitMatrix(n, std::move(d));
    } else if (kind == "circle") {
        provider = CircleGrid{m.at("n").get<std::uint32_t>()};
        if (std::get<CircleGrid>(provider).n == 0)
            throw std::invalid_argument("circle metric needs n >= 1");
    } else if (kind == "binary_words") {
        const auto k = m.at("k").get<std::uint32_t>();
        if (k < 1 || k > 20) throw std::invalid_argument("binary_words metric needs 1 <= k <= 20");
        provider = BinaryWords{k};
    } else {
        throw std::invalid_argument("unknown metric kind: " + kind);
    }

    std::vector<Point> map = j.at("map").get<std::vector<Point>>();
    std::optional<std::vector<std::string>> labels;
    if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();

    MetricSystem sys(std::move(provider), std::move(map), std::move(labels));
    if (reject_invalid) {
        const auto report = validate(sys);
        if (!report.ok()) {
            std::string msg = "system fails metric validation:";
            for (const auto& v : report.violations) {
                msg += " [" + v.axiom + " at " + std::to_string(v.witness[0]) + "," +
                       std::to_string(v.witness[1]) + "," + std::to_string(v.witness[2]) + "]";
                if (msg.size() > 400) break;
            }
            throw std::invalid_argument(msg);
        }
    }

    SystemFile out{j.value("name", ""), std::move(sys), std::nullopt};
    if (j.contains("family")) {
        MapFamily fam{out.system, {}};
        for (const auto& member : j["family"]) fam.members.push_back(member.get<std::vector<Point>>());
        for (const auto& member : fam.members) {
            if (member.size() != out.system.point_count())
                throw std::invalid_argument("family member map has wrong length");
            for (Point v : member)
                if (v >= out.system.point_count())
                    throw std::invalid_argument("family member map entry out of range");
        }
        out.family = std::move(fam);
    }
    return out;
}

inline json certificate_to_json(const HorseshoeCertificate& cert) {
    json j;
    j["schema"] = 1;
    j["anchor"] = cert.pair.anchor;
    j["period"] = cert.pair.period;
    j["block0"] = cert.pair.block0;
    j["block1"] = cert.pair.block1;
    j["delta"] = dist_to_string(cert.pair.delta);
    j["separation_index"] = cert.pair.separation_index;
    j["e_attained"] = dist_to_string(cert.pair.e_attained);
    j["b"] = dist_to_string(cert.b);
    j["e"] = dist_to_string(cert.e);
    j["depth"] = cert.depth;
    json sh = json::object();
    for (const auto& [w, p] : cert.shadows) sh[w] = p;
    j["shadows"] = std::move(sh);
    j["injective"] = cert.injective;
    j["semiconjugacy_checked_depth"] = cert.semiconjugacy_checked_depth;
    j["entropy_bound"] = dist_to_string(cert.entropy_bound);
    j["mode"] = cert.conjugacy ? "conjugacy" : "semiconjugacy";
    if (cert.expansivity_checked)
        j["expansivity_checked"] = dist_to_string(*cert.expansivity_checked);
    j["caveats"] = cert.caveats;
    return j;
}

inline std::string serialize(const HorseshoeCertificate& cert) {
    return certificate_to_json(cert).dump(1, ' ') + "\n";
}

inline HorseshoeCertificate parse_certificate(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed certificate document: ") + e.what());
    }
    HorseshoeCertificate cert;
    try {
        cert.pair.anchor = j.at("anchor").get<Point>();
        cert.pair.period = j.at("period").get<std::uint32_t>();
        cert.pair.block0 = j.at("block0").get<std::vector<Point>>();
        cert.pair.block1 = j.at("block1").get<std::vector<Point>>();
        cert.pair.delta = dist_from_json(j.at("delta"));
        cert.pair.separation_index = j.at("separation_index").get<std::uint32_t>();
        cert.pair.e_attained = dist_from_json(j.at("e_attained"));
        cert.b = dist_from_json(j.at("b"));
        cert.e = dist_from_json(j.at("e"));
        cert.depth = j.at("depth").get<std::uint32_t>();
        for (const auto& [w, p] : j.at("shadows").items())
            cert.shadows[w] = p.get<Point>();
        cert.injective = j.at("injective").get<bool>();
        cert.semiconjugacy_checked_depth = j.at("semiconjugacy_checked_depth").get<std::uint32_t>();
        cert.entropy_bound = dist_from_json(j.at("entropy_bound"));
        cert.conjugacy = j.at("mode").get<std::string>() == "conjugacy";
        if (j.contains("expansivity_checked"))
            cert.expansivity_checked = dist_from_json(j["expansivity_checked"]);
        if (j.contains("caveats")) cert.caveats = j["caveats"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("certificate document missing fields: ") + e.what());
    }
    return cert;
}

inline std::string growth_csv(const GrowthReport& rep) {
    std::string out = "n,count,exact,rate\n";
    for (const auto& e : rep.entries) {
        out += std::to_string(e.n) + "," + std::to_string(e.count) + "," +
               (e.exact ? "true" : "false") + "," + dist_to_string(e.rate) + "\n";
    }
    return out;
}

}  // namespace pointdyn::io
