// pointdyn: finite metric dynamical systems toolbox.
//
// Subcommands inspect systems, decide shadowing, classify expansivity,
// estimate separated-set growth, build and verify full-shift certificates,
// and analyse uniformly convergent map families. Reports are JSON on stdout;
// exit code 0 means success or a positive verdict, 1 a negative verdict,
// 2 an input or usage error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pointdyn/entropy.hpp"
#include "pointdyn/expansivity.hpp"
#include "pointdyn/fixtures.hpp"
#include "pointdyn/horseshoe.hpp"
#include "pointdyn/io.hpp"
#include "pointdyn/limit_analysis.hpp"
#include "pointdyn/metric_system.hpp"
#include "pointdyn/shadowing.hpp"

using namespace pointdyn;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << text;
}

std::string fnv_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Report {
    json payload = json::object();
    std::vector<std::string> caveats;
    std::string input_digest;
    int exit_code = 0;
};

void emit(const Report& rep, int argc, char** argv,
          std::chrono::steady_clock::time_point started) {
    json j;
    j["schema"] = 1;
    json cmd = json::array();
    for (int i = 0; i < argc; ++i) cmd.push_back(argv[i]);
    j["command"] = std::move(cmd);
    if (!rep.input_digest.empty()) j["input_digest"] = rep.input_digest;
    j["payload"] = rep.payload;
    j["caveats"] = rep.caveats;
    j["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    std::cout << j.dump(1, ' ') << "\n";
}

json orbit_json(const OrbitStructure& os) {
    json j;
    j["preperiod"] = os.preperiod;
    j["cycle"] = os.cycle;
    j["visited"] = os.visited;
    return j;
}

json witness_json(const std::optional<UniformWitness>& w) {
    if (!w) return nullptr;
    json j;
    j["radius"] = io::dist_to_string(w->radius);
    j["constant"] = io::dist_to_string(w->constant);
    return j;
}

json growth_json(const GrowthReport& rep) {
    json entries = json::array();
    for (const auto& e : rep.entries) {
        json row;
        row["n"] = e.n;
        row["count"] = e.count;
        row["exact"] = e.exact;
        row["rate"] = io::dist_to_string(e.rate);
        entries.push_back(std::move(row));
    }
    json j;
    j["epsilon"] = io::dist_to_string(rep.epsilon);
    j["scope_size"] = rep.scope_size;
    j["entries"] = std::move(entries);
    j["window_max_rate"] = io::dist_to_string(rep.window_max_rate);
    return j;
}

const char* kScaleCaveat =
    "finite model: all statements hold at the reported scales; the small-scale limit degenerates";

}  // namespace

int main(int argc, char** argv) {
    const auto started = std::chrono::steady_clock::now();
    CLI::App app{"pointdyn: pointwise dynamics on finite metric spaces"};
    app.require_subcommand(1);

    std::string file, cert_file, out_path, csv_path;
    std::uint32_t point = 0, n_query = 0, depth = 1, m_max = 16;
    std::uint64_t horizon = 0, n_max = 1, seed = 42, count = 3;
    double eps = 0, delta = 0, b = 0, e = 0, magnitude = 0.02;
    bool unbounded = false, oracle = false, exact = false;
    std::vector<std::uint32_t> from_periodic;
    std::vector<double> ball_args;

    auto* c_validate = app.add_subcommand("validate", "check the metric axioms of a system file");
    c_validate->add_option("file", file)->required();

    auto* c_classify = app.add_subcommand("classify", "periodic / recurrent / nonwandering flags");
    c_classify->add_option("file", file)->required();
    c_classify->add_option("--point", point)->required();

    auto* c_shadow = app.add_subcommand("shadowing", "decide the shadowing property exactly");
    c_shadow->add_option("file", file)->required();
    c_shadow->add_option("--eps", eps)->required();
    c_shadow->add_option("--delta", delta)->required();
    c_shadow->add_option("--horizon", horizon);
    c_shadow->add_flag("--unbounded", unbounded);
    auto* start_opt = c_shadow->add_option("--start", point);
    c_shadow->add_flag("--oracle", oracle, "cross-check against brute-force enumeration");

    auto* c_exp = app.add_subcommand("expansivity", "pointwise expansivity classification");
    c_exp->add_option("file", file)->required();
    auto* exp_point = c_exp->add_option("--point", point);
    auto* exp_n = c_exp->add_option("--n", n_query);

    auto* c_entropy = app.add_subcommand("entropy", "separated-set growth report");
    c_entropy->add_option("file", file)->required();
    c_entropy->add_option("--eps", eps)->required();
    c_entropy->add_option("--nmax", n_max)->required();
    c_entropy->add_option("--ball", ball_args, "restrict to the closed ball: POINT RADIUS")
        ->expected(2);
    c_entropy->add_flag("--exact", exact);
    c_entropy->add_option("--csv", csv_path);

    auto* c_certify = app.add_subcommand("certify", "construct a full-shift factor certificate");
    c_certify->add_option("file", file)->required();
    c_certify->add_option("--point", point)->required();
    c_certify->add_option("--b", b)->required();
    c_certify->add_option("--e", e)->required();
    c_certify->add_option("--delta", delta)->required();
    c_certify->add_option("--depth", depth)->required();
    c_certify->add_option("--mmax", m_max);
    c_certify->add_option("--from-periodic", from_periodic, "use two periodic points: P Q")
        ->expected(2);
    c_certify->add_option("--out", out_path, "write the certificate document here");

    auto* c_verify = app.add_subcommand("verify", "re-check a certificate from first principles");
    c_verify->add_option("certfile", cert_file)->required();
    c_verify->add_option("file", file)->required();

    auto* c_limit = app.add_subcommand("limit", "uniform-limit analysis of a family file");
    c_limit->add_option("file", file)->required();
    c_limit->add_option("--eps", eps)->required();
    c_limit->add_option("--horizon", horizon);

    auto* c_gen = app.add_subcommand("gen", "generate fixture files");
    std::string kind;
    std::uint32_t gen_param = 0, cycle_len = 4;
    c_gen->add_option("kind", kind, "shift | doubling | cc | family")->required();
    c_gen->add_option("param", gen_param, "k for shift/doubling/family base, j for cc")->required();
    c_gen->add_option("--cycle-len", cycle_len);
    c_gen->add_option("--count", count);
    c_gen->add_option("--magnitude", magnitude);
    c_gen->add_option("--seed", seed);
    c_gen->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : 2;
    }

    Report rep;
    try {
        if (c_gen->parsed()) {
            io::SystemFile out{"", MetricSystem(CircleGrid{1}, {0}), std::nullopt};
            if (kind == "shift") {
                out = {"shift" + std::to_string(gen_param), gen_shift_words(gen_param), std::nullopt};
            } else if (kind == "doubling") {
                out = {"doubling" + std::to_string(gen_param), gen_doubling(gen_param), std::nullopt};
            } else if (kind == "cc") {
                std::vector<std::uint32_t> cycles(gen_param, cycle_len);
                out = {"carvalho_cordeiro" + std::to_string(gen_param),
                       gen_carvalho_cordeiro(cycles, gen_param), std::nullopt};
            } else if (kind == "family") {
                const auto base = gen_doubling(gen_param);
                const auto fam = gen_perturbed_family(base, static_cast<std::uint32_t>(count),
                                                      magnitude, seed);
                out = {"family" + std::to_string(gen_param), fam.space, fam};
            } else {
                throw std::invalid_argument("unknown generator kind: " + kind);
            }
            const std::string text = io::serialize(out);
            write_file(out_path, text);
            rep.payload["written"] = out_path;
            rep.payload["points"] = out.system.point_count();
            rep.payload["digest"] = fnv_digest(text);
            emit(rep, argc, argv, started);
            return 0;
        }

        const std::string bytes = read_file(file);
        rep.input_digest = fnv_digest(bytes);

        if (c_validate->parsed()) {
            const auto parsed = io::parse_system(bytes, /*reject_invalid=*/false);
            const auto report = validate(parsed.system);
            rep.payload["valid"] = report.ok();
            json v = json::array();
            for (const auto& viol : report.violations) {
                json row;
                row["axiom"] = viol.axiom;
                row["witness"] = viol.witness;
                row["detail"] = viol.detail;
                v.push_back(std::move(row));
            }
            rep.payload["violations"] = std::move(v);
            rep.exit_code = report.ok() ? 0 : 1;
        } else if (c_classify->parsed()) {
            const auto sys = io::parse_system(bytes).system;
            if (point >= sys.point_count()) throw std::invalid_argument("point out of range");
            const auto pc = classify_point(sys, point);
            rep.payload["point"] = point;
            rep.payload["periodic"] = pc.periodic;
            rep.payload["recurrent"] = pc.recurrent;
            rep.payload["nonwandering"] = pc.nonwandering;
            json rr = json::array();
            for (const auto& r : pc.radius_returns) {
                json row;
                row["radius"] = io::dist_to_string(r.radius);
                row["returns"] = r.returns;
                row["witness_iterate"] = r.witness_iterate;
                rr.push_back(std::move(row));
            }
            rep.payload["radius_returns"] = std::move(rr);
            rep.payload["orbit"] = orbit_json(orbit_structure(sys, point));
            rep.caveats = pc.notes;
        } else if (c_shadow->parsed()) {
            const auto sys = io::parse_system(bytes).system;
            const Horizon h = unbounded ? Horizon::infinite()
                                        : Horizon::finite(horizon ? horizon : sys.point_count());
            std::optional<Point> start;
            if (start_opt->count()) start = point;
            const auto dec = decide_shadowing(sys, eps, delta, h, start);
            rep.payload["epsilon"] = io::dist_to_string(eps);
            rep.payload["delta"] = io::dist_to_string(delta);
            rep.payload["horizon"] = unbounded ? json("unbounded") : json(h.steps);
            if (start) rep.payload["start"] = *start;
            rep.payload["result"] = dec.result;
            rep.payload["reachable_states"] = dec.reachable_states;
            if (dec.counterexample) {
                rep.payload["counterexample"] = dec.counterexample->block();
            }
            if (oracle) {
                const auto brute =
                    brute_force_shadowing(sys, eps, delta, unbounded ? sys.point_count() : h.steps,
                                          start);
                rep.payload["oracle_result"] = brute.result;
                if (!unbounded && brute.result != dec.result)
                    throw std::logic_error("oracle disagreement: tracking-set search vs enumeration");
                rep.payload["oracle_agrees"] = true;
            }
            rep.caveats.push_back(
                "shadowing constants are reported relative to epsilon at fixed scales");
            rep.exit_code = dec.result ? 0 : 1;
        } else if (c_exp->parsed()) {
            const auto sys = io::parse_system(bytes).system;
            const auto global = global_expansivity(sys);
            rep.payload["global_expansivity"] =
                global ? json(io::dist_to_string(*global)) : json(nullptr);
            if (exp_point->count()) {
                if (point >= sys.point_count()) throw std::invalid_argument("point out of range");
                const auto v = classify_expansivity(
                    sys, point,
                    exp_n->count() ? std::optional<std::uint32_t>(n_query) : std::nullopt);
                rep.payload["point"] = point;
                rep.payload["reddy_constant"] = io::dist_to_string(v.reddy);
                rep.payload["uniform"] = witness_json(v.uniform);
                if (exp_n->count()) {
                    rep.payload["n"] = v.n_query;
                    rep.payload["n_expansive"] = witness_json(v.n_expansive);
                }
                rep.payload["countable_expansive"] = v.countable_expansive;
                rep.caveats = v.notes;
            } else {
                const auto audit = proposition_2_1_audit(sys);
                json a;
                a["global_positive"] = audit.global_positive;
                a["all_points_uniform"] = audit.all_points_uniform;
                a["equivalence"] = audit.equivalence;
                a["cover_constant"] = io::dist_to_string(audit.cover_constant);
                a["cover_constant_valid"] = audit.cover_constant_valid;
                rep.payload["uniform_equivalence_audit"] = std::move(a);
            }
        } else if (c_entropy->parsed()) {
            const auto sys = io::parse_system(bytes).system;
            std::vector<Point> scope;
            if (!ball_args.empty()) {
                const Point c = static_cast<Point>(ball_args[0]);
                if (c >= sys.point_count()) throw std::invalid_argument("ball point out of range");
                scope = closed_ball(sys, c, ball_args[1]);
                rep.payload["ball"] = {{"point", c}, {"radius", io::dist_to_string(ball_args[1])}};
            } else {
                scope.resize(sys.point_count());
                for (Point i = 0; i < sys.point_count(); ++i) scope[i] = i;
            }
            if (exact && scope.size() > kExactSeparationGuard)
                throw std::invalid_argument(
                    "exact-mode guard: scope exceeds 512 points, rerun without --exact");
            const auto grep = growth_report(sys, scope, eps, n_max);
            rep.payload["growth"] = growth_json(grep);
            if (!csv_path.empty()) {
                write_file(csv_path, io::growth_csv(grep));
                rep.payload["csv"] = csv_path;
            }
            rep.caveats.push_back(kScaleCaveat);
        } else if (c_certify->parsed()) {
            const auto sys = io::parse_system(bytes).system;
            CertifyParams params;
            params.b = b;
            params.e = e;
            params.delta = delta;
            params.depth = depth;
            params.m_max = m_max;
            CertifyOutcome outcome;
            if (!from_periodic.empty())
                outcome = certify_from_periodic_points(sys, from_periodic[0], from_periodic[1],
                                                       params);
            else
                outcome = certify(sys, point, params);
            if (outcome.certificate) {
                const auto& cert = *outcome.certificate;
                rep.payload["certificate"] = io::certificate_to_json(cert);
                if (!out_path.empty()) {
                    write_file(out_path, io::serialize(cert));
                    rep.payload["written"] = out_path;
                }
                rep.caveats = cert.caveats;
                rep.exit_code = 0;
            } else {
                rep.payload["certificate"] = nullptr;
                rep.payload["stage"] = outcome.stage;
                rep.payload["diagnostic"] = outcome.diagnostic;
                rep.exit_code = 1;
            }
        } else if (c_verify->parsed()) {
            const auto cert = io::parse_certificate(read_file(cert_file));
            const auto sys = io::parse_system(bytes).system;
            const auto chk = verify_certificate(sys, cert);
            rep.payload["ok"] = chk.ok;
            rep.payload["violations"] = chk.violations;
            rep.exit_code = chk.ok ? 0 : 1;
        } else if (c_limit->parsed()) {
            const auto parsed = io::parse_system(bytes);
            if (!parsed.family) throw std::invalid_argument("limit needs a family file");
            const auto& fam = *parsed.family;
            const Horizon h = Horizon::finite(horizon ? horizon : fam.space.point_count());
            json dists = json::array();
            for (Dist d : fam.member_distances()) dists.push_back(io::dist_to_string(d));
            rep.payload["member_distances"] = std::move(dists);
            rep.payload["uniformly_convergent"] = fam.uniformly_convergent();
            const std::vector<Dist> grid{eps};
            const auto verdict = check_limit_nonwandering(fam, grid, h);
            json v;
            v["ok"] = verdict.ok;
            v["failed_step"] = verdict.failed_step;
            v["members_nonwandering"] = verdict.members_nonwandering;
            json fc = json::array();
            for (const auto& [e2, c] : verdict.family_constants)
                fc.push_back({{"epsilon", io::dist_to_string(e2)},
                              {"delta", c ? json(io::dist_to_string(*c)) : json(nullptr)}});
            v["family_constants"] = std::move(fc);
            json cr = json::array();
            for (const auto& [e2, flag] : verdict.limit_chain_recurrent)
                cr.push_back({{"epsilon", io::dist_to_string(e2)}, {"chain_recurrent", flag}});
            v["limit_chain_recurrent"] = std::move(cr);
            v["limit_nonwandering"] = verdict.limit_nonwandering;
            rep.payload["verdict"] = std::move(v);
            rep.caveats.push_back(kScaleCaveat);
            rep.exit_code = verdict.ok ? 0 : 1;
        }
    } catch (const std::invalid_argument& err) {
        rep.payload["error"] = err.what();
        emit(rep, argc, argv, started);
        return 2;
    } catch (const std::exception& err) {
        rep.payload["error"] = err.what();
        emit(rep, argc, argv, started);
        return 2;
    }

    emit(rep, argc, argv, started);
    return rep.exit_code;
}
