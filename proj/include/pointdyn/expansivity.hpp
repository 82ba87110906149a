#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "pointdyn/metric_system.hpp"

namespace pointdyn {

// min over y != x of sup_i d(f^i(x), f^i(y)); positive on every finite space
// because the i = 0 term already separates distinct points.
inline Dist reddy_constant(const MetricSystem& sys, Point x) {
    const std::uint32_t n = sys.point_count();
    Dist best = kInfiniteDist;
    for (Point y = 0; y < n; ++y)
        if (y != x) best = std::min(best, dyn_sep(sys, x, y));
    return n > 1 ? best : kInfiniteDist;
}

struct UniformWitness {
    Dist radius = 0;
    Dist constant = 0;
};

namespace detail {

// Per-point sweep stages: balls around x change only at realized distances
// from x, so the open ball {d < r} is constant for r in (d_i, d_{i+1}] and
// the largest usable radius for a stage is the next distance itself (a grid
// value). The whole-space stage reports full_radius().
struct BallStage {
    Dist report_radius;
    std::vector<Point> new_points;  // points at exactly this stage's distance
};

inline std::vector<BallStage> ball_stages(const MetricSystem& sys, Point x) {
    const std::uint32_t n = sys.point_count();
    std::vector<std::pair<Dist, Point>> by_dist;
    by_dist.reserve(n);
    for (Point y = 0; y < n; ++y) by_dist.emplace_back(sys.distance(x, y), y);
    std::sort(by_dist.begin(), by_dist.end());

    std::vector<BallStage> stages;
    std::size_t i = 0;
    while (i < by_dist.size()) {
        const Dist d = by_dist[i].first;
        BallStage st;
        while (i < by_dist.size() && by_dist[i].first == d) st.new_points.push_back(by_dist[i++].second);
        st.report_radius = (i == by_dist.size()) ? sys.full_radius() : by_dist[i].first;
        stages.push_back(std::move(st));
    }
    return stages;
}

inline const std::vector<Dist>& pair_table(const MetricSystem& sys,
                                           std::optional<std::vector<Dist>>& cache) {
    if (!cache) cache = dyn_sep_table(sys);
    return *cache;
}

}  // namespace detail

// Best (radius, constant) certifying that distinct points of the ball
// dynamically separate: maximize the constant, then the radius. Balls must
// hold at least two points, else every finite point would qualify vacuously.
inline std::optional<UniformWitness> uniform_expansive_point(const MetricSystem& sys, Point x) {
    const std::uint32_t n = sys.point_count();
    if (n > 2048) throw std::runtime_error("uniform_expansive_point guarded to 2048 points");
    if (n < 2) return std::nullopt;
    std::optional<std::vector<Dist>> table;
    const auto& t = detail::pair_table(sys, table);

    std::optional<UniformWitness> best;
    Dist running = kInfiniteDist;
    std::vector<Point> members;
    for (const auto& stage : detail::ball_stages(sys, x)) {
        for (Point nw : stage.new_points) {
            for (Point old : members) running = std::min(running, t[static_cast<std::size_t>(nw) * n + old]);
            members.push_back(nw);
        }
        if (members.size() < 2) continue;
        const Dist e = running;
        if (!(e > 0)) continue;
        if (!best || e > best->constant ||
            (e == best->constant && stage.report_radius > best->radius))
            best = UniformWitness{stage.report_radius, e};
    }
    return best;
}

// Largest constant e (a realized dynamical-separation value) such that some
// ball around x keeps every dynamical e-ball within it at cardinality <= n_max.
inline std::optional<UniformWitness> n_expansive_point(const MetricSystem& sys, Point x,
                                                       std::uint32_t n_max) {
    if (n_max < 1) throw std::invalid_argument("n_expansive_point needs n >= 1");
    const std::uint32_t n = sys.point_count();
    if (n > 2048) throw std::runtime_error("n_expansive_point guarded to 2048 points");
    if (n < 2) return std::nullopt;
    std::optional<std::vector<Dist>> table;
    const auto& t = detail::pair_table(sys, table);
    const Dist sentinel = sys.full_radius();  // unconstrained stages

    std::optional<UniformWitness> best;
    std::vector<Point> members;
    for (const auto& stage : detail::ball_stages(sys, x)) {
        members.insert(members.end(), stage.new_points.begin(), stage.new_points.end());
        if (members.size() < 2) continue;
        Dist cap;
        if (members.size() <= n_max) {
            cap = sentinel;
        } else {
            cap = kInfiniteDist;
            std::vector<Dist> seps;
            for (Point y : members) {
                seps.clear();
                for (Point z : members) seps.push_back(t[static_cast<std::size_t>(y) * n + z]);
                std::nth_element(seps.begin(), seps.begin() + n_max, seps.end());
                cap = std::min(cap, seps[n_max]);
            }
        }
        if (!(cap > 0)) continue;
        if (!best || cap > best->constant ||
            (cap == best->constant && stage.report_radius > best->radius))
            best = UniformWitness{stage.report_radius, cap};
    }
    return best;
}

// min of dyn_sep over all distinct pairs; the largest expansiveness constant.
inline std::optional<Dist> global_expansivity(const MetricSystem& sys) {
    const std::uint32_t n = sys.point_count();
    if (n < 2) return std::nullopt;
    if (n > 2048) throw std::runtime_error("global_expansivity guarded to 2048 points");
    std::optional<std::vector<Dist>> table;
    const auto& t = detail::pair_table(sys, table);
    Dist best = kInfiniteDist;
    for (Point i = 0; i < n; ++i)
        for (Point j = i + 1; j < n; ++j) best = std::min(best, t[static_cast<std::size_t>(i) * n + j]);
    return best > 0 ? std::optional<Dist>(best) : std::nullopt;
}

struct Prop21Audit {
    bool global_positive = false;
    bool all_points_uniform = false;
    bool equivalence = false;   // the two flags agree
    Dist global_constant = 0;   // 0 when absent
    Dist cover_constant = 0;    // min of per-point constants and the Lebesgue number
    bool cover_constant_valid = false;  // 0 < e* <= global constant
};

// Finite-scale restatement of the covering argument: stitch the per-point
// witnesses into a finite subcover, take the Lebesgue number, and check the
// resulting constant against the global one.
inline Prop21Audit proposition_2_1_audit(const MetricSystem& sys) {
    Prop21Audit audit;
    const std::uint32_t n = sys.point_count();
    if (n < 2) {
        audit.equivalence = true;
        return audit;
    }
    const auto global = global_expansivity(sys);
    audit.global_positive = global.has_value();
    audit.global_constant = global.value_or(0);

    std::vector<std::pair<Point, UniformWitness>> witnesses;
    bool all = true;
    for (Point x = 0; x < n; ++x) {
        auto w = uniform_expansive_point(sys, x);
        if (!w) {
            all = false;
            break;
        }
        witnesses.emplace_back(x, *w);
    }
    audit.all_points_uniform = all;
    audit.equivalence = (audit.global_positive == audit.all_points_uniform);
    if (!all || !global) return audit;

    // greedy subcover over the witness balls
    std::vector<bool> covered(n, false);
    std::vector<std::pair<Point, UniformWitness>> cover;
    for (const auto& [x, w] : witnesses) {
        if (covered[x]) continue;
        cover.emplace_back(x, w);
        for (Point y : ball(sys, x, w.radius)) covered[y] = true;
    }
    Dist lebesgue = kInfiniteDist;
    for (Point y = 0; y < n; ++y) {
        Dist slack = 0;
        for (const auto& [c, w] : cover) slack = std::max(slack, w.radius - sys.distance(y, c));
        lebesgue = std::min(lebesgue, slack);
    }
    Dist e_star = lebesgue;
    for (const auto& [c, w] : cover) e_star = std::min(e_star, w.constant);
    audit.cover_constant = e_star;
    audit.cover_constant_valid = e_star > 0 && e_star <= *global;
    return audit;
}

struct ExpansivityVerdict {
    Point point = 0;
    Dist reddy = 0;
    std::optional<UniformWitness> uniform;
    std::optional<UniformWitness> n_expansive;
    std::uint32_t n_query = 0;
    bool countable_expansive = true;  // trivially true on finite spaces
    std::vector<std::string> notes;
};

inline ExpansivityVerdict classify_expansivity(const MetricSystem& sys, Point x,
                                               std::optional<std::uint32_t> n_query) {
    ExpansivityVerdict v;
    v.point = x;
    v.reddy = reddy_constant(sys, x);
    v.uniform = uniform_expansive_point(sys, x);
    if (n_query) {
        v.n_query = *n_query;
        v.n_expansive = n_expansive_point(sys, x, *n_query);
    }
    v.notes.push_back("finite model: every point trivially has positive separation at step 0");
    v.notes.push_back("countable-expansivity is vacuous on finite spaces and excluded from classification");
    return v;
}

}  // namespace pointdyn
