#include <catch2/catch_amalgamated.hpp>

#include "pointdyn/io.hpp"

using namespace pointdyn;

TEST_CASE("shift-word fixtures") {
    const auto k1 = gen_shift_words(1);
    CHECK(k1.point_count() == 2);
    CHECK(k1.step(0) == 0);
    CHECK(k1.step(1) == 1);
    CHECK(k1.distance(0, 1) == 0.5);

    const auto k3 = gen_shift_words(3);
    const auto orbit = orbit_structure(k3, 1);
    CHECK(orbit.cycle == std::vector<Point>{1, 2, 4});
    CHECK(validate(k3).ok());
    for (Point w = 0; w < 8; ++w) {
        const auto os = orbit_structure(k3, w);
        CHECK(os.periodic());
        CHECK(3 % os.period() == 0);
    }
    CHECK_THROWS_AS(gen_shift_words(0), std::invalid_argument);
    CHECK_THROWS_AS(gen_shift_words(21), std::invalid_argument);
}

TEST_CASE("doubling fixtures") {
    for (std::uint32_t k : {3u, 5u, 10u}) {
        const auto sys = gen_doubling(k);
        CHECK(validate(sys).ok());
        CHECK(sys.step(1u << (k - 1)) == 1);  // 2^k is congruent to 1
        for (Point j = 0; j < sys.point_count(); ++j) {
            const auto os = orbit_structure(sys, j);
            CHECK(os.periodic());
            CHECK(k % os.period() == 0);
        }
    }
    CHECK(orbit_structure(gen_doubling(3), 1).cycle == std::vector<Point>{1, 2, 4});
    CHECK_THROWS_AS(gen_doubling(2), std::invalid_argument);
}

TEST_CASE("copy fixture closure is an exact idempotent metric") {
    const std::vector<std::uint32_t> cycles{4, 4, 4, 4, 4, 4, 4, 4};
    const auto sys = gen_carvalho_cordeiro(cycles, 8);
    CHECK(validate(sys).ok());
    CHECK(sys.point_count() == 64);

    // idempotence: re-closing the realized matrix changes nothing
    const std::uint32_t n = sys.point_count();
    std::vector<Dist> m(static_cast<std::size_t>(n) * n);
    for (Point i = 0; i < n; ++i)
        for (Point j = 0; j < n; ++j) m[static_cast<std::size_t>(i) * n + j] = sys.distance(i, j);
    auto closed = m;
    for (std::uint32_t k = 0; k < n; ++k)
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = 0; j < n; ++j)
                closed[i * n + j] =
                    std::min(closed[i * n + j], closed[i * n + k] + closed[k * n + j]);
    CHECK(closed == m);

    // pinned copy distances survive the closure exactly
    for (std::uint32_t c = 0; c < 8; ++c)
        for (std::uint32_t i = 0; i < 4; ++i)
            CHECK(sys.distance(c * 4 + i, 32 + c * 4 + i) == 1.0 / static_cast<Dist>(c + 1));

    CHECK_THROWS_AS(gen_carvalho_cordeiro(cycles, 9), std::invalid_argument);
}

TEST_CASE("perturbed families flatten to the limit") {
    const auto base = gen_doubling(5);
    const auto flat = gen_perturbed_family(base, 3, 0.0, 5);
    for (const auto& m : flat.members) CHECK(m == base.map());
    CHECK(flat.uniformly_convergent());

    const auto fam = gen_perturbed_family(base, 4, 0.1, 5);
    const auto d = fam.member_distances();
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] <= d[i - 1]);
    CHECK(d.back() == 0.0);
}

TEST_CASE("system files round-trip byte-identically") {
    const auto circle = gen_doubling(4);
    const io::SystemFile f1{"doubling4", circle, std::nullopt};
    const std::string text = io::serialize(f1);
    const auto parsed = io::parse_system(text);
    CHECK(io::serialize(io::SystemFile{parsed.name, parsed.system, parsed.family}) == text);
    CHECK(parsed.name == "doubling4");
    CHECK(parsed.system.point_count() == circle.point_count());
    CHECK(parsed.system.map() == circle.map());

    const auto cc = gen_carvalho_cordeiro(std::vector<std::uint32_t>{3, 3}, 2);
    const std::string cct = io::serialize(io::SystemFile{"cc", cc, std::nullopt});
    const auto ccp = io::parse_system(cct);
    CHECK(io::serialize(io::SystemFile{"cc", ccp.system, std::nullopt}) == cct);
    for (Point i = 0; i < cc.point_count(); ++i)
        for (Point j = 0; j < cc.point_count(); ++j)
            CHECK(ccp.system.distance(i, j) == cc.distance(i, j));  // bit-exact decimals

    const auto fam = gen_perturbed_family(gen_doubling(4), 2, 0.1, 9);
    const std::string famt = io::serialize(io::SystemFile{"fam", fam.space, fam});
    const auto famp = io::parse_system(famt);
    REQUIRE(famp.family.has_value());
    CHECK(famp.family->members == fam.members);
}

TEST_CASE("parse rejections carry the reason") {
    // map entry out of range
    CHECK_THROWS_WITH(io::parse_system(R"({"metric":{"kind":"circle","n":3},"map":[0,1,3]})"),
                      Catch::Matchers::ContainsSubstring("out of range"));
    // asymmetric matrix: the report names the witness pair
    const std::string asym = R"({
        "metric": {"kind": "matrix", "data": [["0","1","1"],["2","0","1"],["1","1","0"]]},
        "map": [0, 1, 2]})";
    CHECK_THROWS_WITH(io::parse_system(asym), Catch::Matchers::ContainsSubstring("symmetry"));
    CHECK_NOTHROW(io::parse_system(asym, /*reject_invalid=*/false));
    // malformed documents
    CHECK_THROWS_AS(io::parse_system("{"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_system(R"({"metric":{"kind":"weird"},"map":[]})"),
                    std::invalid_argument);
}

TEST_CASE("certificates round-trip through their documents") {
    const auto sys = gen_doubling(20);
    CertifyParams params;
    params.b = 0.1;
    params.e = 0.4;
    params.delta = 0.002;
    params.depth = 2;
    const auto outcome = certify(sys, 1, params);
    REQUIRE(outcome.certificate.has_value());
    const std::string text = io::serialize(*outcome.certificate);
    const auto parsed = io::parse_certificate(text);
    CHECK(io::serialize(parsed) == text);
    CHECK(parsed.shadows == outcome.certificate->shadows);
    CHECK(parsed.pair.block1 == outcome.certificate->pair.block1);
    CHECK(parsed.b == outcome.certificate->b);       // decimal strings are bit-exact
    CHECK(parsed.entropy_bound == outcome.certificate->entropy_bound);
    CHECK(verify_certificate(sys, parsed).ok);
}

TEST_CASE("growth reports export as csv rows") {
    const auto words = gen_shift_words(3);
    const auto rep = growth_report(words, 0.5, 2);
    const auto csv = io::growth_csv(rep);
    CHECK(csv.find("n,count,exact,rate\n") == 0);
    CHECK(csv.find("0,2,true,") != std::string::npos);
    CHECK(csv.find("2,8,true,") != std::string::npos);
}

TEST_CASE("distance literals round-trip") {
    for (Dist v : {0.1, 1.0 / 3.0, 0.002, 123456.789, 1e-12}) {
        CHECK(io::dist_from_string(io::dist_to_string(v)) == v);
    }
    CHECK(io::dist_to_string(kInfiniteDist) == "inf");
    CHECK(io::dist_from_string("inf") == kInfiniteDist);
}
