#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pointdyn/detail/max_clique.hpp"
#include "pointdyn/metric_system.hpp"

namespace pointdyn {

// Pairwise (n, epsilon)-separation with the non-strict >= and the inclusive
// index range 0 <= i <= n; shadowing and balls keep strict <.
inline bool is_separated(const MetricSystem& sys, std::span<const Point> pts, std::uint64_t n,
                         Dist epsilon) {
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            Point x = pts[a], y = pts[b];
            bool sep = false;
            for (std::uint64_t i = 0; i <= n; ++i) {
                if (sys.distance(x, y) >= epsilon) {
                    sep = true;
                    break;
                }
                x = sys.step(x);
                y = sys.step(y);
            }
            if (!sep) return false;
        }
    return true;
}

struct SeparatedSet {
    std::vector<Point> points;
    std::uint64_t n = 0;
    Dist epsilon = 0;
    bool exact = false;  // true when a maximum (not merely maximal) set was proven
};

enum class CliqueMode { Exact, Greedy };

inline constexpr std::uint32_t kExactSeparationGuard = 512;
inline constexpr std::uint32_t kGreedySeparationGuard = 4096;

namespace detail {

// first index i <= n_cap at which the pair separates, or n_cap + 1
inline std::vector<std::uint32_t> first_separation_table(const MetricSystem& sys,
                                                         std::span<const Point> v,
                                                         std::uint32_t n_cap, Dist epsilon) {
    const std::size_t m = v.size();
    std::vector<std::uint32_t> first(m * m, n_cap + 1);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            Point x = v[a], y = v[b];
            for (std::uint32_t i = 0; i <= n_cap; ++i) {
                if (sys.distance(x, y) >= epsilon) {
                    first[a * m + b] = first[b * m + a] = i;
                    break;
                }
                x = sys.step(x);
                y = sys.step(y);
            }
        }
    return first;
}

}  // namespace detail

inline SeparatedSet max_separated(const MetricSystem& sys, std::span<const Point> v,
                                  std::uint64_t n, Dist epsilon, CliqueMode mode) {
    if (mode == CliqueMode::Exact && v.size() > kExactSeparationGuard)
        throw std::runtime_error("max_separated: exact mode guarded to 512 points; use greedy");
    if (v.size() > kGreedySeparationGuard)
        throw std::runtime_error("max_separated: guarded to 4096 points");
    SeparatedSet out;
    out.n = n;
    out.epsilon = epsilon;
    out.exact = (mode == CliqueMode::Exact);
    if (v.empty()) return out;

    const std::uint32_t m = static_cast<std::uint32_t>(v.size());
    detail::AdjMatrix g(m);
    const std::uint32_t cap = static_cast<std::uint32_t>(std::min<std::uint64_t>(n, 0xfffffffeull));
    auto first = detail::first_separation_table(sys, v, cap, epsilon);
    for (std::uint32_t a = 0; a < m; ++a)
        for (std::uint32_t b = a + 1; b < m; ++b)
            if (first[static_cast<std::size_t>(a) * m + b] <= n) g.add_edge(a, b);

    std::vector<std::uint32_t> clique = (mode == CliqueMode::Exact)
                                            ? detail::MaxCliqueSolver(g).solve()
                                            : detail::greedy_clique(g);
    for (std::uint32_t i : clique) out.points.push_back(v[i]);
    return out;
}

struct GrowthEntry {
    std::uint64_t n = 0;
    std::uint64_t count = 0;
    bool exact = false;
    double rate = 0;  // log(count) / (n + 1): per sampled iterate over 0..n
};

struct GrowthReport {
    Dist epsilon = 0;
    std::vector<GrowthEntry> entries;
    double window_max_rate = 0;
    std::uint64_t scope_size = 0;
};

// Separated-set growth over n = 0..n_max at fixed scale epsilon, using the
// strongest affordable mode per count. The small-scale limit is meaningless
// on a finite space, so reports never take it.
inline GrowthReport growth_report(const MetricSystem& sys, std::span<const Point> v, Dist epsilon,
                                  std::uint64_t n_max) {
    if (n_max < 1) throw std::invalid_argument("growth_report needs n_max >= 1");
    if (v.size() > kGreedySeparationGuard)
        throw std::runtime_error("growth_report: scope guarded to 4096 points");
    GrowthReport rep;
    rep.epsilon = epsilon;
    rep.scope_size = v.size();
    if (v.empty()) return rep;

    const bool exact = v.size() <= kExactSeparationGuard;
    const std::uint32_t m = static_cast<std::uint32_t>(v.size());
    auto first = detail::first_separation_table(sys, v, static_cast<std::uint32_t>(n_max), epsilon);

    for (std::uint64_t n = 0; n <= n_max; ++n) {
        detail::AdjMatrix g(m);
        for (std::uint32_t a = 0; a < m; ++a)
            for (std::uint32_t b = a + 1; b < m; ++b)
                if (first[static_cast<std::size_t>(a) * m + b] <= n) g.add_edge(a, b);
        const auto clique = exact ? detail::MaxCliqueSolver(g).solve() : detail::greedy_clique(g);
        GrowthEntry e;
        e.n = n;
        e.count = clique.size();
        e.exact = exact;
        e.rate = std::log(static_cast<double>(e.count)) / static_cast<double>(n + 1);
        rep.window_max_rate = std::max(rep.window_max_rate, e.rate);
        rep.entries.push_back(e);
    }
    return rep;
}

inline GrowthReport growth_report(const MetricSystem& sys, Dist epsilon, std::uint64_t n_max) {
    std::vector<Point> all(sys.point_count());
    for (Point i = 0; i < sys.point_count(); ++i) all[i] = i;
    return growth_report(sys, all, epsilon, n_max);
}

struct ScanCell {
    Dist radius = 0;
    Dist epsilon = 0;
    std::uint64_t ball_size = 0;
    double window_max_rate = 0;
};

struct EntropyPointScan {
    Point point = 0;
    std::vector<ScanCell> cells;
    // candidate at scale eps iff every scanned radius shows positive growth
    std::vector<std::pair<Dist, bool>> candidate_per_epsilon;
    std::vector<std::string> notes;
};

// Growth restricted to closed balls around x. A positive verdict is only a
// candidate flag: finite models see fixed scales, not the limit.
inline EntropyPointScan entropy_point_scan(const MetricSystem& sys, Point x,
                                           std::span<const Dist> epsilon_grid,
                                           std::span<const Dist> radius_grid,
                                           std::uint64_t n_max) {
    EntropyPointScan scan;
    scan.point = x;
    scan.notes.push_back("entropy-point verdicts are fixed-scale candidates on a finite model");
    for (Dist eps : epsilon_grid) {
        bool all_positive = !radius_grid.empty();
        for (Dist r : radius_grid) {
            const auto v = closed_ball(sys, x, r);
            GrowthReport rep = growth_report(sys, v, eps, n_max);
            scan.cells.push_back({r, eps, v.size(), rep.window_max_rate});
            if (!(rep.window_max_rate > 0)) all_positive = false;
        }
        scan.candidate_per_epsilon.emplace_back(eps, all_positive);
    }
    return scan;
}

}  // namespace pointdyn
