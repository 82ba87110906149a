#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pointdyn/expansivity.hpp"
#include "pointdyn/fixtures.hpp"

using namespace pointdyn;

namespace {

// oracle: iterate far past any possible joint cycle and take the max
Dist dyn_sep_brute(const MetricSystem& sys, Point y, Point z) {
    const std::uint64_t steps =
        static_cast<std::uint64_t>(sys.point_count()) * sys.point_count() + sys.point_count() + 2;
    Dist best = 0;
    Point a = y, b = z;
    for (std::uint64_t i = 0; i < steps; ++i) {
        best = std::max(best, sys.distance(a, b));
        a = sys.step(a);
        b = sys.step(b);
    }
    return best;
}

std::vector<Point> random_permutation(std::mt19937_64& rng, std::uint32_t n) {
    std::vector<Point> p(n);
    for (Point i = 0; i < n; ++i) p[i] = i;
    for (std::uint32_t i = n - 1; i > 0; --i) std::swap(p[i], p[rng() % (i + 1)]);
    return p;
}

}  // namespace

TEST_CASE("reddy constant on the named examples") {
    MetricSystem ident(CircleGrid{8}, {0, 1, 2, 3, 4, 5, 6, 7});
    for (Point x = 0; x < 8; ++x) CHECK(reddy_constant(ident, x) == 1.0 / 8.0);

    // merged orbits: distinct points with a common image still separate at step 0
    MetricSystem merge(CircleGrid{4}, {0, 0, 0, 0});
    CHECK(reddy_constant(merge, 1) == merge.distance(1, 0));  // nearest is the fixed point at 1/4
}

TEST_CASE("shift truncation: every distinct pair dynamically separates to 1/2") {
    const auto words = gen_shift_words(3);
    Dist min_sep = kInfiniteDist;
    for (Point y = 0; y < 8; ++y)
        for (Point z = 0; z < 8; ++z)
            if (y != z) min_sep = std::min(min_sep, dyn_sep_brute(words, y, z));
    CHECK(min_sep == 0.5);  // rotation carries a differing bit to the front

    CHECK(global_expansivity(words) == 0.5);
    const auto w = uniform_expansive_point(words, 0);
    REQUIRE(w.has_value());
    CHECK(w->constant == 0.5);
    CHECK(w->radius == 1.0);  // whole-space radius: diameter 7/8 plus grid step 1/8
}

TEST_CASE("carvalho-cordeiro pointwise values") {
    const std::vector<std::uint32_t> cycles{4, 4, 4, 4, 4, 4, 4, 4};
    const auto sys = gen_carvalho_cordeiro(cycles, 8);
    // base orbit points sit exactly 1/n from their copies, phase-locked;
    // the intra-cycle separation 1/4 caps the value for the early copies
    for (std::uint32_t c = 0; c < 8; ++c) {
        const Point base_pt = static_cast<Point>(c * 4);
        CHECK(reddy_constant(sys, base_pt) == std::min(0.25, 1.0 / static_cast<Dist>(c + 1)));
    }
    CHECK(reddy_constant(sys, 7 * 4) == 0.125);  // O_8 against its copy
    CHECK(global_expansivity(sys) == 0.125);

    // every point is a positively expansive point even though the global
    // constant shrinks with the copy index
    for (Point x = 0; x < sys.point_count(); ++x) CHECK(reddy_constant(sys, x) > 0);
}

TEST_CASE("uniform witness on the copy fixture prefers the pinned pair") {
    const std::vector<std::uint32_t> cycles{4, 4, 4, 4, 4, 4, 4, 4};
    const auto sys = gen_carvalho_cordeiro(cycles, 8);
    // x on O_8: the tightest two-point ball is {x, copy}, with constant 1/8
    const Point x = 7 * 4;
    const auto w = uniform_expansive_point(sys, x);
    REQUIRE(w.has_value());
    CHECK(w->constant == 1.0 / 8.0);
}

TEST_CASE("n-expansivity: n = 1 is exactly the uniform notion") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 15; ++t) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng() % 14);
        MetricSystem sys(CircleGrid{n}, random_permutation(rng, n));
        for (Point x = 0; x < n; ++x) {
            const auto uni = uniform_expansive_point(sys, x);
            const auto one = n_expansive_point(sys, x, 1);
            REQUIRE(uni.has_value() == one.has_value());
            if (uni) {
                CHECK(uni->constant == one->constant);
                CHECK(uni->radius == one->radius);
            }
        }
    }
}

TEST_CASE("n-expansivity is monotone in n") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 10; ++t) {
        const std::uint32_t n = 4 + static_cast<std::uint32_t>(rng() % 12);
        MetricSystem sys(CircleGrid{n}, random_permutation(rng, n));
        for (Point x = 0; x < n; ++x) {
            std::optional<Dist> prev;
            for (std::uint32_t k = 1; k <= n; ++k) {
                const auto w = n_expansive_point(sys, x, k);
                REQUIRE(w.has_value());
                if (prev) CHECK(w->constant >= *prev);
                prev = w->constant;
            }
        }
    }
}

TEST_CASE("vacuous cardinality bound returns the sentinel scales") {
    const auto words = gen_shift_words(3);
    const auto w = n_expansive_point(words, 0, words.point_count());
    REQUIRE(w.has_value());
    CHECK(w->radius == words.full_radius());
    CHECK(w->constant == words.full_radius());  // diameter plus one grid step
}

TEST_CASE("two-point dynamical ball on the copy fixture") {
    const std::vector<std::uint32_t> cycles{4, 4, 4, 4, 4, 4, 4, 4};
    const auto sys = gen_carvalho_cordeiro(cycles, 8);
    // expected threshold by enumeration: the third-smallest dynamical
    // separation from any point is the intra-cycle 1/4
    const auto table = dyn_sep_table(sys);
    const std::uint32_t n = sys.point_count();
    Dist expected = kInfiniteDist;
    for (Point y = 0; y < n; ++y) {
        std::vector<Dist> row;
        for (Point z = 0; z < n; ++z) row.push_back(table[static_cast<std::size_t>(y) * n + z]);
        std::nth_element(row.begin(), row.begin() + 2, row.end());
        expected = std::min(expected, row[2]);
    }
    CHECK(expected == 0.25);
    for (Point x = 0; x < n; ++x) {
        const auto w = n_expansive_point(sys, x, 2);
        REQUIRE(w.has_value());
        CHECK(w->constant >= expected);
    }
}

TEST_CASE("reddy dominates the global constant") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 10; ++t) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng() % 30);
        MetricSystem sys(CircleGrid{n}, random_permutation(rng, n));
        const auto g = global_expansivity(sys);
        REQUIRE(g.has_value());
        for (Point x = 0; x < n; ++x) CHECK(reddy_constant(sys, x) >= *g);
    }
}

TEST_CASE("covering audit reproduces a valid constant") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 10; ++t) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng() % 20);
        MetricSystem sys(CircleGrid{n}, random_permutation(rng, n));
        const auto audit = proposition_2_1_audit(sys);
        CHECK(audit.equivalence);
        REQUIRE(audit.global_positive);
        CHECK(audit.cover_constant_valid);
        CHECK(audit.cover_constant > 0);
        CHECK(audit.cover_constant <= audit.global_constant);
    }
}
