#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pointdyn/entropy.hpp"
#include "pointdyn/fixtures.hpp"
#include "pointdyn/horseshoe.hpp"

using namespace pointdyn;

namespace {
constexpr std::uint32_t kN20 = (1u << 20) - 1;
}

TEST_CASE("periodic pair through the fixed point of the doubling grid") {
    const auto sys = gen_doubling(20);
    const auto pair = find_periodic_pair(sys, 0, 0.002, 0.4, 16);
    REQUIRE(pair.has_value());
    CHECK(pair->period == 10);
    CHECK(pair->block0 == std::vector<Point>(10, 0));
    std::vector<Point> expected1{0};
    for (std::uint32_t j = 11; j <= 19; ++j) expected1.push_back(1u << j);
    CHECK(pair->block1 == expected1);
    CHECK(pair->separation_index == 9);
    CHECK(pair->e_attained == sys.distance(0, 1u << 19));
    CHECK(pair->e_attained > 0.499);

    // both blocks wrap within delta: seam gaps verified by the profiles
    for (const auto* blk : {&pair->block0, &pair->block1}) {
        const auto gp = gap_profile(sys, PseudoOrbit::periodic({}, *blk, 0.002));
        CHECK(gp.max_gap < 0.002);
    }
    // the stated seam values: d(f(2^19), 0) = 1/(2^20-1), start jump ~0.00195
    CHECK(sys.distance(sys.step(1u << 19), 0) == 1.0 / kN20);
    CHECK(sys.distance(sys.step(0), 1u << 11) == Catch::Approx(2048.0 / kN20));
}

TEST_CASE("no pair exists when the graph has out-degree one") {
    const auto sys = gen_doubling(4);  // CircleGrid(15)
    // delta below every near-miss gap: only true-orbit edges survive
    const auto pair = find_periodic_pair(sys, 1, 0.02, 0.3, 4);
    CHECK_FALSE(pair.has_value());
}

TEST_CASE("copy fixture pair hops between the orbit and its copy") {
    const std::vector<std::uint32_t> cycles{4, 4, 4, 4, 4, 4, 4, 4};
    const auto sys = gen_carvalho_cordeiro(cycles, 8);
    const Point z = 7 * 4;           // on O_8
    const Dist delta = 0.13;         // just above 1/8
    const auto pair = find_periodic_pair(sys, z, delta, 0.1, 8);
    REQUIRE(pair.has_value());
    CHECK(pair->period == 4);
    CHECK(pair->e_attained == 0.125);
    // one block is the true orbit, the other rides the copy
    const Point copy_start = 32 + 7 * 4;
    bool hits_copy = false;
    for (Point p : pair->block1) hits_copy = hits_copy || p >= copy_start;
    for (Point p : pair->block0) CHECK(p < 32);
    CHECK(hits_copy);
}

TEST_CASE("gamma concatenates blocks and stays a pseudo-orbit") {
    const auto sys = gen_doubling(20);
    const auto pair = find_periodic_pair(sys, 0, 0.002, 0.4, 16);
    REQUIRE(pair.has_value());

    const auto g0 = gamma(*pair, "0");
    CHECK(g0.length() == 10);
    CHECK(gap_profile(sys, std::vector<Point>(g0.block())).max_gap < 0.002);

    const auto g01 = gamma(*pair, "01");
    REQUIRE(g01.length() == 20);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(g01.at(i) == pair->block0[i]);
        CHECK(g01.at(10 + i) == pair->block1[i]);
    }
    CHECK(gap_profile(sys, std::vector<Point>(g01.block())).max_gap < 0.002);

    CHECK_THROWS_AS(gamma(*pair, ""), std::invalid_argument);
    CHECK_THROWS_AS(gamma(*pair, "0a"), std::invalid_argument);
}

TEST_CASE("the depth-2 certificate on the doubling grid") {
    const auto sys = gen_doubling(20);
    CertifyParams params;
    params.b = 0.1;
    params.e = 0.4;
    params.delta = 0.002;
    params.depth = 2;
    const auto outcome = certify(sys, 1, params);
    REQUIRE(outcome.certificate.has_value());
    const auto& cert = *outcome.certificate;

    CHECK(cert.pair.period == 10);
    CHECK(cert.pair.anchor == 1);  // first cycle point of the orbit of 1
    REQUIRE(cert.shadows.size() == 4);
    CHECK(cert.shadows.at("00") == 0);
    CHECK(cert.shadows.at("01") == 1);
    CHECK(cert.shadows.at("10") == 1024);
    CHECK(cert.shadows.at("11") == 1025);
    CHECK(cert.injective);
    CHECK(cert.entropy_bound == std::log(2.0) / 10.0);
    CHECK(cert.semiconjugacy_checked_depth == 1);
    CHECK(cert.conjugacy);  // expansive at scale e on the covering ball

    const auto chk = verify_certificate(sys, cert);
    CHECK(chk.ok);
    CHECK(chk.violations.empty());

    // the word shadows form a (20, e-2b)-separated set of size 4
    std::vector<Point> pts;
    for (const auto& [w, p] : cert.shadows) pts.push_back(p);
    CHECK(is_separated(sys, pts, 20, cert.e - 2 * cert.b));
}

TEST_CASE("separation mechanics hold at the word-difference index") {
    const auto sys = gen_doubling(20);
    CertifyParams params;
    params.b = 0.1;
    params.e = 0.4;
    params.delta = 0.002;
    params.depth = 2;
    const auto outcome = certify(sys, 1, params);
    REQUIRE(outcome.certificate.has_value());
    const auto& cert = *outcome.certificate;
    const std::uint32_t m = cert.pair.period;
    const std::uint32_t l = cert.pair.separation_index;

    std::vector<std::string> words{"00", "01", "10", "11"};
    for (const auto& wa : words)
        for (const auto& wb : words) {
            if (wa == wb) continue;
            for (std::uint32_t j = 1; j <= cert.depth; ++j) {
                if (wa[j - 1] == wb[j - 1]) continue;
                const std::uint64_t idx = static_cast<std::uint64_t>(j - 1) * m + l;
                const Dist d = sys.distance(sys.iterate(cert.shadows.at(wa), idx),
                                            sys.iterate(cert.shadows.at(wb), idx));
                CHECK(d >= cert.e - 2 * cert.b);
            }
        }
}

TEST_CASE("certificate anchors are entropy-point candidates at scale e - 2b") {
    const auto sys = gen_doubling(20);
    CertifyParams params;
    params.b = 0.1;
    params.e = 0.4;
    params.delta = 0.002;
    params.depth = 2;
    const auto outcome = certify(sys, 1, params);
    REQUIRE(outcome.certificate.has_value());
    const auto& cert = *outcome.certificate;

    // the anchor-side shadow point: everything the certificate built lives
    // within b of the starting point, so small closed balls already branch
    const Point w = cert.shadows.at("00");
    Dist rmax = 0;
    for (const auto& [word, pt] : cert.shadows) rmax = std::max(rmax, sys.distance(w, pt));
    const std::vector<Dist> eps_grid{cert.e - 2 * cert.b};
    const std::vector<Dist> radii{rmax, 1.4 * rmax};
    const auto scan = entropy_point_scan(sys, w, eps_grid, radii, 2 * cert.pair.period);
    REQUIRE(scan.candidate_per_epsilon.size() == 1);
    CHECK(scan.candidate_per_epsilon[0].second);
    for (const auto& cell : scan.cells) CHECK(cell.window_max_rate > 0);
}

TEST_CASE("depth 3 exceeds the orbit period and is refused honestly") {
    const auto sys = gen_doubling(20);
    CertifyParams params;
    params.b = 0.1;
    params.e = 0.4;
    params.delta = 0.002;
    params.depth = 3;
    const auto outcome = certify(sys, 1, params);
    CHECK_FALSE(outcome.certificate.has_value());
    CHECK(outcome.stage == "shadow");
    CHECK(outcome.diagnostic.find("no shadow") != std::string::npos);
}

TEST_CASE("periodic-point certificates on the copy fixture") {
    const std::vector<std::uint32_t> cycles{4, 4, 4, 4, 4, 4, 4, 4};
    const auto sys = gen_carvalho_cordeiro(cycles, 8);
    const Point p = 0;        // on O_1
    const Point q = 32;       // its copy
    CertifyParams params;
    params.b = 1.05;
    params.e = 2.2;
    params.delta = 1.1;
    params.depth = 1;
    const auto outcome = certify_from_periodic_points(sys, p, q, params);
    REQUIRE(outcome.certificate.has_value());
    const auto& cert = *outcome.certificate;
    CHECK(cert.pair.period == 4);
    CHECK(cert.pair.e_attained == 1.0);
    CHECK_FALSE(cert.conjugacy);  // semiconjugacy mode: shadow candidates overlap
    CHECK_FALSE(cert.injective);
    CHECK(verify_certificate(sys, cert).ok);

    CHECK_THROWS_AS(certify_from_periodic_points(sys, p, p, params), std::invalid_argument);
}

TEST_CASE("two fixed points give the minimal two-slot window") {
    std::vector<Dist> d{0, 1, 1, 0};
    MetricSystem sys(ExplicitMatrix(2, std::move(d)), {0, 1});
    CertifyParams params;
    params.b = 1.2;
    params.e = 3.4;
    params.delta = 1.5;
    params.depth = 1;
    const auto outcome = certify_from_periodic_points(sys, 0, 1, params);
    REQUIRE(outcome.certificate.has_value());
    CHECK(outcome.certificate->pair.period == 2);
    CHECK(outcome.certificate->pair.e_attained == 1.0);
    CHECK(verify_certificate(sys, *outcome.certificate).ok);
}

TEST_CASE("verification rejects tampered certificates") {
    const auto sys = gen_doubling(20);
    CertifyParams params;
    params.b = 0.1;
    params.e = 0.4;
    params.delta = 0.002;
    params.depth = 2;
    const auto outcome = certify(sys, 1, params);
    REQUIRE(outcome.certificate.has_value());
    const auto& cert = *outcome.certificate;

    auto tampered = cert;
    tampered.shadows["01"] = 2;  // drifts half a turn from the target by step 18
    CHECK_FALSE(verify_certificate(sys, tampered).ok);

    tampered = cert;
    tampered.pair.separation_index = 3;
    CHECK_FALSE(verify_certificate(sys, tampered).ok);

    tampered = cert;
    tampered.e = 0.15;  // breaks e > 2b
    CHECK_FALSE(verify_certificate(sys, tampered).ok);

    tampered = cert;
    tampered.pair.delta = 1e-5;  // block seams no longer fit the gap bound
    CHECK_FALSE(verify_certificate(sys, tampered).ok);

    tampered = cert;
    tampered.entropy_bound += 0.01;
    CHECK_FALSE(verify_certificate(sys, tampered).ok);
}

TEST_CASE("parameter violations are rejected before any search") {
    const auto sys = gen_doubling(5);
    CertifyParams params;
    params.b = 0.3;
    params.e = 0.5;  // e <= 2b
    params.delta = 0.01;
    params.depth = 1;
    CHECK_THROWS_AS(certify(sys, 1, params), std::invalid_argument);
}
