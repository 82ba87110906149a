#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pointdyn/detail/bitset.hpp"

namespace pointdyn {

using Point = std::uint32_t;
using Dist = double;

inline constexpr Dist kInfiniteDist = std::numeric_limits<Dist>::infinity();

// Distances stored row-major; the matrix is shared so copying a system stays cheap.
class ExplicitMatrix {
public:
    static constexpr std::uint32_t kMaxPoints = 5000;

    ExplicitMatrix(std::uint32_t n, std::vector<Dist> entries)
        : n_(n), d_(std::make_shared<std::vector<Dist>>(std::move(entries))) {
        if (n == 0) throw std::invalid_argument("matrix metric needs at least one point");
        if (n > kMaxPoints)
            throw std::invalid_argument("matrix metric capped at 5000 points; use a formula metric");
        if (d_->size() != static_cast<std::size_t>(n) * n)
            throw std::invalid_argument("matrix metric has wrong entry count");
    }

    std::uint32_t points() const { return n_; }
    Dist at(Point i, Point j) const { return (*d_)[static_cast<std::size_t>(i) * n_ + j]; }

private:
    std::uint32_t n_;
    std::shared_ptr<const std::vector<Dist>> d_;
};

// d(i,j) = min(|i-j|, n-|i-j|) / n
struct CircleGrid {
    std::uint32_t n;
    Dist at(Point i, Point j) const {
        std::uint32_t t = i > j ? i - j : j - i;
        t = std::min(t, n - t);
        return static_cast<Dist>(t) / static_cast<Dist>(n);
    }
};

// Words of k bits, first symbol at the most significant position.
// d(s,t) = sum over differing positions i of 2^-i, which is (s xor t) / 2^k.
struct BinaryWords {
    std::uint32_t k;
    Dist at(Point i, Point j) const { return std::ldexp(static_cast<Dist>(i ^ j), -static_cast<int>(k)); }
};

using MetricProvider = std::variant<ExplicitMatrix, CircleGrid, BinaryWords>;

struct AxiomViolation {
    std::string axiom;
    std::array<Point, 3> witness{0, 0, 0};
    std::string detail;
};

struct ValidationReport {
    std::vector<AxiomViolation> violations;
    bool ok() const { return violations.empty(); }
};

class MetricSystem {
public:
    MetricSystem(MetricProvider metric, std::vector<Point> map,
                 std::optional<std::vector<std::string>> labels = std::nullopt)
        : metric_(std::move(metric)), map_(std::move(map)), labels_(std::move(labels)),
          cache_(std::make_shared<Cache>()) {
        const std::uint32_t n = provider_points(metric_);
        if (map_.size() != n) throw std::invalid_argument("map length must equal point count");
        for (Point v : map_)
            if (v >= n) throw std::invalid_argument("map entry out of range");
        if (labels_ && labels_->size() != n)
            throw std::invalid_argument("label count must equal point count");
    }

    std::uint32_t point_count() const { return provider_points(metric_); }

    Dist distance(Point i, Point j) const {
        return std::visit([&](const auto& m) { return m.at(i, j); }, metric_);
    }

    Point step(Point x) const { return map_[x]; }

    Point iterate(Point x, std::uint64_t k) const {
        for (std::uint64_t i = 0; i < k; ++i) x = map_[x];
        return x;
    }

    const std::vector<Point>& map() const { return map_; }
    const MetricProvider& metric() const { return metric_; }
    const std::optional<std::vector<std::string>>& labels() const { return labels_; }

    MetricSystem with_map(std::vector<Point> other_map) const {
        return MetricSystem(metric_, std::move(other_map), labels_);
    }

    // Sorted unique realized distances, including 0.
    const std::vector<Dist>& distance_grid() const {
        if (!cache_->grid_built) {
            cache_->grid = build_grid();
            cache_->grid_built = true;
        }
        return cache_->grid;
    }

    Dist diameter() const { return distance_grid().back(); }

    Dist min_positive_distance() const {
        const auto& g = distance_grid();
        for (Dist d : g)
            if (d > 0) return d;
        return 0;
    }

    // Radius whose open ball is the whole space; used by the sweep operations.
    Dist full_radius() const { return diameter() + min_positive_distance(); }

    // Smallest grid value strictly above x (or full_radius when none is).
    Dist grid_value_above(Dist x) const {
        const auto& g = distance_grid();
        auto it = std::upper_bound(g.begin(), g.end(), x);
        if (it == g.end()) return full_radius();
        return *it;
    }

private:
    struct Cache {
        bool grid_built = false;
        std::vector<Dist> grid;
    };

    static std::uint32_t provider_points(const MetricProvider& m) {
        if (const auto* em = std::get_if<ExplicitMatrix>(&m)) return em->points();
        if (const auto* cg = std::get_if<CircleGrid>(&m)) return cg->n;
        return std::uint32_t{1} << std::get<BinaryWords>(m).k;
    }

    std::vector<Dist> build_grid() const {
        std::vector<Dist> g;
        if (const auto* cg = std::get_if<CircleGrid>(&metric_)) {
            g.reserve(cg->n / 2 + 1);
            for (std::uint32_t t = 0; t <= cg->n / 2; ++t)
                g.push_back(static_cast<Dist>(t) / static_cast<Dist>(cg->n));
        } else if (const auto* bw = std::get_if<BinaryWords>(&metric_)) {
            const std::uint32_t m = std::uint32_t{1} << bw->k;
            g.reserve(m);
            for (std::uint32_t v = 0; v < m; ++v)
                g.push_back(std::ldexp(static_cast<Dist>(v), -static_cast<int>(bw->k)));
        } else {
            const std::uint32_t n = point_count();
            g.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
            for (Point i = 0; i < n; ++i)
                for (Point j = i; j < n; ++j) g.push_back(distance(i, j));
            std::sort(g.begin(), g.end());
            g.erase(std::unique(g.begin(), g.end()), g.end());
        }
        return g;
    }

    MetricProvider metric_;
    std::vector<Point> map_;
    std::optional<std::vector<std::string>> labels_;
    std::shared_ptr<Cache> cache_;
};

inline constexpr Dist kTriangleTolerance = 1e-12;

inline ValidationReport validate(const MetricSystem& sys) {
    ValidationReport rep;
    const std::uint32_t n = sys.point_count();
    for (Point i = 0; i < n; ++i)
        if (sys.step(i) >= n)
            rep.violations.push_back({"map_range", {i, 0, 0}, "map image out of range"});
    if (!std::holds_alternative<ExplicitMatrix>(sys.metric()))
        return rep;  // formula metrics satisfy the axioms by construction

    for (Point i = 0; i < n; ++i) {
        if (sys.distance(i, i) != 0)
            rep.violations.push_back({"zero_diagonal", {i, i, 0}, "d(i,i) != 0"});
        for (Point j = i + 1; j < n; ++j) {
            const Dist dij = sys.distance(i, j);
            if (dij != sys.distance(j, i))
                rep.violations.push_back({"symmetry", {i, j, 0}, "d(i,j) != d(j,i)"});
            if (!(dij > 0))
                rep.violations.push_back({"positivity", {i, j, 0}, "d(i,j) <= 0 for distinct points"});
        }
    }
    for (Point k = 0; k < n; ++k)
        for (Point i = 0; i < n; ++i) {
            const Dist dik = sys.distance(i, k);
            for (Point j = 0; j < n; ++j)
                if (sys.distance(i, j) > dik + sys.distance(k, j) + kTriangleTolerance) {
                    rep.violations.push_back({"triangle", {i, j, k}, "d(i,j) > d(i,k) + d(k,j)"});
                    if (rep.violations.size() > 64) return rep;  // enough witnesses
                }
        }
    return rep;
}

// Open ball {y : d(y, center) < r}, ascending indices.
inline std::vector<Point> ball(const MetricSystem& sys, Point center, Dist r) {
    std::vector<Point> out;
    const std::uint32_t n = sys.point_count();
    if (const auto* cg = std::get_if<CircleGrid>(&sys.metric()); cg && r < 0.75) {
        // walk outward from the center instead of scanning a million points
        out.push_back(center);
        if (!(sys.distance(center, (center + 1) % n) < r)) {
            if (r <= 0) out.clear();
            return out;
        }
        for (std::uint32_t t = 1; t <= n / 2; ++t) {
            if (!(static_cast<Dist>(t) / static_cast<Dist>(n) < r)) break;
            out.push_back((center + t) % n);
            if (n - t > t) out.push_back((center + n - t) % n);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    for (Point y = 0; y < n; ++y)
        if (sys.distance(y, center) < r) out.push_back(y);
    return out;
}

inline std::vector<Point> closed_ball(const MetricSystem& sys, Point center, Dist r) {
    std::vector<Point> out;
    for (Point y = 0; y < sys.point_count(); ++y)
        if (sys.distance(y, center) <= r) out.push_back(y);
    return out;
}

inline detail::Bitset ball_bits(const MetricSystem& sys, Point center, Dist r) {
    detail::Bitset b(sys.point_count());
    for (Point y : ball(sys, center, r)) b.set(y);
    return b;
}

inline constexpr std::uint32_t kPairScanGuard = 4096;

// Largest grid threshold eta such that d(y,z) < eta forces d(f(y),f(z)) < delta.
inline Dist continuity_modulus(const MetricSystem& sys, Dist delta) {
    if (!(delta > 0)) throw std::invalid_argument("continuity_modulus needs delta > 0");
    const std::uint32_t n = sys.point_count();
    if (n > kPairScanGuard)
        throw std::runtime_error("continuity_modulus: pair scan guarded to 4096 points");
    Dist eta = kInfiniteDist;
    for (Point i = 0; i < n; ++i)
        for (Point j = i + 1; j < n; ++j)
            if (sys.distance(sys.step(i), sys.step(j)) >= delta)
                eta = std::min(eta, sys.distance(i, j));
    return eta;
}

struct OrbitStructure {
    std::uint32_t preperiod = 0;
    std::vector<Point> cycle;    // cycle[0] is the first revisited point
    std::vector<Point> visited;  // start point up to (excluding) the repeat

    bool periodic() const { return preperiod == 0; }
    std::uint32_t period() const { return static_cast<std::uint32_t>(cycle.size()); }
};

inline OrbitStructure orbit_structure(const MetricSystem& sys, Point x) {
    OrbitStructure os;
    std::unordered_map<Point, std::uint32_t> pos;
    Point cur = x;
    while (true) {
        auto it = pos.find(cur);
        if (it != pos.end()) {
            os.preperiod = it->second;
            os.cycle.assign(os.visited.begin() + it->second, os.visited.end());
            return os;
        }
        pos.emplace(cur, static_cast<std::uint32_t>(os.visited.size()));
        os.visited.push_back(cur);
        cur = sys.step(cur);
    }
}

// sup_i d(f^i(y), f^i(z)); exact because the joint orbit closes a cycle.
inline Dist dyn_sep(const MetricSystem& sys, Point y, Point z) {
    const OrbitStructure oy = orbit_structure(sys, y);
    const OrbitStructure oz = orbit_structure(sys, z);
    const std::uint64_t pre = std::max(oy.preperiod, oz.preperiod);
    const std::uint64_t lam = std::lcm<std::uint64_t>(oy.period(), oz.period());
    Dist best = 0;
    Point a = y, b = z;
    for (std::uint64_t i = 0; i < pre + lam; ++i) {
        best = std::max(best, sys.distance(a, b));
        a = sys.step(a);
        b = sys.step(b);
    }
    return best;
}

// Full pairwise table, computed by propagating maxima over the pair graph
// (a,b) -> (f(a), f(b)). Linear in the number of pairs.
inline std::vector<Dist> dyn_sep_table(const MetricSystem& sys) {
    const std::uint64_t n = sys.point_count();
    if (n > 2048) throw std::runtime_error("dyn_sep_table guarded to 2048 points");
    const std::uint64_t total = n * n;
    std::vector<Dist> val(total, -1.0);
    std::vector<std::uint8_t> state(total, 0);  // 0 new, 1 on walk, 2 done
    std::vector<std::uint64_t> walk;
    for (std::uint64_t s = 0; s < total; ++s) {
        if (state[s]) continue;
        walk.clear();
        std::uint64_t cur = s;
        while (state[cur] == 0) {
            state[cur] = 1;
            walk.push_back(cur);
            const Point a = static_cast<Point>(cur / n), b = static_cast<Point>(cur % n);
            cur = static_cast<std::uint64_t>(sys.step(a)) * n + sys.step(b);
        }
        std::size_t tail = walk.size();
        if (state[cur] == 1) {
            // found a new cycle inside this walk
            std::size_t start = walk.size();
            while (start > 0 && walk[start - 1] != cur) --start;
            --start;
            Dist cyc = 0;
            for (std::size_t i = start; i < walk.size(); ++i) {
                const std::uint64_t p = walk[i];
                cyc = std::max(cyc, sys.distance(static_cast<Point>(p / n), static_cast<Point>(p % n)));
            }
            for (std::size_t i = start; i < walk.size(); ++i) {
                val[walk[i]] = cyc;
                state[walk[i]] = 2;
            }
            tail = start;
        }
        Dist follow = val[cur];
        for (std::size_t i = tail; i-- > 0;) {
            const std::uint64_t p = walk[i];
            follow = std::max(follow, sys.distance(static_cast<Point>(p / n), static_cast<Point>(p % n)));
            val[p] = follow;
            state[p] = 2;
        }
    }
    return val;
}

struct RadiusReturn {
    Dist radius = 0;
    bool returns = false;
    std::uint64_t witness_iterate = 0;  // smallest n >= 1 with f^n(B) meeting B
};

struct PointClass {
    bool periodic = false;
    bool recurrent = false;
    bool nonwandering = false;
    std::vector<RadiusReturn> radius_returns;
    std::vector<std::string> notes;
};

// Exact nonwandering decision: iterate the ball as a set until the set
// sequence cycles. On finite spaces recurrence collapses to periodicity.
inline PointClass classify_point(const MetricSystem& sys, Point x) {
    const std::uint32_t n = sys.point_count();
    if (n > kPairScanGuard)
        throw std::runtime_error("classify_point: guarded to 4096 points");
    PointClass pc;
    const OrbitStructure os = orbit_structure(sys, x);
    pc.periodic = os.periodic();
    pc.recurrent = pc.periodic;
    pc.notes.push_back("finite model: recurrent coincides with periodic");

    const auto& grid = sys.distance_grid();
    bool all_return = true;
    for (Dist r : grid) {
        if (!(r > 0)) continue;
        RadiusReturn rr;
        rr.radius = r;
        if (pc.periodic) {
            rr.returns = true;
            rr.witness_iterate = std::max<std::uint64_t>(1, os.period());
        } else {
            detail::Bitset b0 = ball_bits(sys, x, r);
            detail::Bitset cur = b0;
            std::vector<std::pair<std::size_t, detail::Bitset>> seen;
            std::uint64_t it = 0;
            while (true) {
                detail::Bitset next(n);
                cur.for_each([&](Point p) { next.set(sys.step(p)); });
                ++it;
                if (next.intersects(b0)) {
                    rr.returns = true;
                    rr.witness_iterate = it;
                    break;
                }
                const std::size_t h = next.hash();
                bool looped = false;
                for (const auto& [hh, bs] : seen)
                    if (hh == h && bs == next) {
                        looped = true;
                        break;
                    }
                if (looped) break;
                seen.emplace_back(h, next);
                cur = next;
            }
        }
        all_return = all_return && rr.returns;
        pc.radius_returns.push_back(rr);
    }
    pc.nonwandering = all_return;
    return pc;
}

}  // namespace pointdyn
