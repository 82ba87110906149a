#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pointdyn/metric_system.hpp"
#include "pointdyn/pseudo_orbit.hpp"

namespace pointdyn {

struct Horizon {
    std::uint64_t steps = 0;  // number of pseudo-orbit points considered
    bool unbounded = false;

    static Horizon finite(std::uint64_t points) { return Horizon{points, false}; }
    static Horizon infinite() { return Horizon{0, true}; }
};

// d(f^i(z), po_i) < epsilon for 0 <= i < horizon.
inline bool shadows(const MetricSystem& sys, Point z, const PseudoOrbit& po, Dist epsilon,
                    std::uint64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("shadows needs horizon >= 1");
    if (!po.is_periodic() && horizon > po.length())
        throw std::invalid_argument("horizon exceeds pseudo-orbit length");
    Point cur = z;
    for (std::uint64_t i = 0; i < horizon; ++i) {
        if (!(sys.distance(cur, po.at(i)) < epsilon)) return false;
        cur = sys.step(cur);
    }
    return true;
}

struct ShadowCandidate {
    Point start = 0;
    Dist max_deviation = 0;
    Dist total_deviation = 0;
};

struct ShadowSearch {
    std::vector<ShadowCandidate> candidates;  // ascending start index
    bool empty() const { return candidates.empty(); }

    // Deterministic representative: best tracking quality first.
    std::optional<ShadowCandidate> best() const {
        std::optional<ShadowCandidate> b;
        for (const auto& c : candidates) {
            if (!b || c.max_deviation < b->max_deviation ||
                (c.max_deviation == b->max_deviation && c.total_deviation < b->total_deviation))
                b = c;
        }
        return b;
    }
};

// Tracking-set recursion along one pseudo-orbit: keep every start point whose
// orbit has stayed within epsilon of the prefix. Works on formula-metric
// spaces of ~2^20 points because the candidate list only ever shrinks.
inline ShadowSearch find_shadows(const MetricSystem& sys, const PseudoOrbit& po, Dist epsilon,
                                 std::uint64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("find_shadows needs horizon >= 1");
    if (!po.is_periodic() && horizon > po.length())
        throw std::invalid_argument("horizon exceeds pseudo-orbit length");
    struct Track {
        Point start, cur;
        Dist max_dev, sum_dev;
    };
    std::vector<Track> alive;
    for (Point z : ball(sys, po.at(0), epsilon)) {
        const Dist d = sys.distance(z, po.at(0));
        alive.push_back({z, z, d, d});
    }
    for (std::uint64_t i = 1; i < horizon; ++i) {
        const Point target = po.at(i);
        std::vector<Track> next;
        next.reserve(alive.size());
        for (Track t : alive) {
            t.cur = sys.step(t.cur);
            const Dist d = sys.distance(t.cur, target);
            if (d < epsilon) {
                t.max_dev = std::max(t.max_dev, d);
                t.sum_dev += d;
                next.push_back(t);
            }
        }
        alive.swap(next);
        if (alive.empty()) break;
    }
    ShadowSearch out;
    for (const Track& t : alive) out.candidates.push_back({t.start, t.max_dev, t.sum_dev});
    return out;
}

// Unbounded-horizon search for a periodic pseudo-orbit. Survivor sets only
// shrink once each start's trajectory is pinned, so the (phase, survivors,
// positions) state must repeat; from a repeat the survivors live forever.
inline ShadowSearch find_shadows_periodic(const MetricSystem& sys, const PseudoOrbit& po,
                                          Dist epsilon) {
    if (!po.is_periodic()) throw std::invalid_argument("find_shadows_periodic needs a periodic orbit");
    struct Track {
        Point start, cur;
        Dist max_dev, sum_dev;
    };
    std::vector<Track> alive;
    for (Point z : ball(sys, po.at(0), epsilon)) {
        const Dist d = sys.distance(z, po.at(0));
        alive.push_back({z, z, d, d});
    }
    const std::uint64_t pre = po.preblock().size();
    const std::uint64_t blk = po.block().size();
    std::unordered_map<std::size_t, std::vector<std::vector<Point>>> seen;
    std::uint64_t i = 1;
    const std::uint64_t cap = (pre + blk * (static_cast<std::uint64_t>(sys.point_count()) + 2)) *
                                  static_cast<std::uint64_t>(sys.point_count()) +
                              1024;
    while (!alive.empty()) {
        const Point target = po.at(i);
        std::vector<Track> next;
        next.reserve(alive.size());
        for (Track t : alive) {
            t.cur = sys.step(t.cur);
            const Dist d = sys.distance(t.cur, target);
            if (d < epsilon) {
                t.max_dev = std::max(t.max_dev, d);
                t.sum_dev += d;
                next.push_back(t);
            }
        }
        alive.swap(next);
        ++i;
        if (i > pre && (i - pre) % blk == 0 && !alive.empty()) {
            std::vector<Point> key;
            key.reserve(alive.size() * 2);
            for (const auto& t : alive) {
                key.push_back(t.start);
                key.push_back(t.cur);
            }
            std::size_t h = 1469598103934665603ull;
            for (Point p : key) {
                h ^= p;
                h *= 1099511628211ull;
            }
            auto& bucket = seen[h];
            bool repeat = false;
            for (const auto& k : bucket)
                if (k == key) {
                    repeat = true;
                    break;
                }
            if (repeat) break;
            bucket.push_back(std::move(key));
        }
        if (i > cap) throw std::runtime_error("find_shadows_periodic: state bound exceeded");
    }
    ShadowSearch out;
    for (const Track& t : alive) out.candidates.push_back({t.start, t.max_dev, t.sum_dev});
    return out;
}

struct ShadowingDecision {
    Dist epsilon = 0;
    Dist delta = 0;
    Horizon horizon;
    std::optional<Point> start;
    bool result = false;
    std::optional<PseudoOrbit> counterexample;
    std::uint64_t reachable_states = 0;
};

inline constexpr std::uint32_t kDecisionPointGuard = 2048;
inline constexpr std::uint64_t kDecisionStateGuard = 4'000'000;

// Exact decision of "every delta pseudo-orbit (from start, if given) is
// epsilon-shadowed", as a reachability search over states (vertex, tracking
// set). The tracking set holds the current iterates of all starts that are
// still consistent with the prefix; an empty set refutes shadowing.
inline ShadowingDecision decide_shadowing(const MetricSystem& sys, Dist epsilon, Dist delta,
                                          Horizon horizon,
                                          std::optional<Point> start = std::nullopt) {
    if (!(epsilon > 0) || !(delta > 0))
        throw std::invalid_argument("decide_shadowing needs epsilon > 0 and delta > 0");
    if (!horizon.unbounded && horizon.steps < 1)
        throw std::invalid_argument("decide_shadowing needs horizon >= 1");
    const std::uint32_t n = sys.point_count();
    if (n > kDecisionPointGuard)
        throw std::runtime_error("decide_shadowing: universal decision guarded to 2048 points");
    if (start && *start >= n) throw std::invalid_argument("decide_shadowing: start out of range");

    ShadowingDecision dec;
    dec.epsilon = epsilon;
    dec.delta = delta;
    dec.horizon = horizon;
    dec.start = start;

    struct State {
        Point vertex;
        detail::Bitset track;
        std::int64_t parent;  // -1 for initial states
        std::uint64_t level;  // points placed so far
    };
    std::deque<State> states;
    std::unordered_map<std::size_t, std::vector<std::size_t>> visited;

    auto lookup = [&](Point v, const detail::Bitset& w) -> bool {
        const std::size_t h = w.hash() * 31 + v;
        auto it = visited.find(h);
        if (it != visited.end())
            for (std::size_t idx : it->second)
                if (states[idx].vertex == v && states[idx].track == w) return true;
        return false;
    };
    auto remember = [&](std::size_t idx) {
        const std::size_t h = states[idx].track.hash() * 31 + states[idx].vertex;
        visited[h].push_back(idx);
    };
    auto rebuild = [&](std::int64_t leaf_parent, Point last_vertex) {
        std::vector<Point> path{last_vertex};
        for (std::int64_t at = leaf_parent; at >= 0; at = states[static_cast<std::size_t>(at)].parent)
            path.push_back(states[static_cast<std::size_t>(at)].vertex);
        std::reverse(path.begin(), path.end());
        return PseudoOrbit::finite(std::move(path), delta);
    };

    std::vector<Point> starts;
    if (start) starts.push_back(*start);
    else {
        starts.resize(n);
        for (Point v = 0; v < n; ++v) starts[v] = v;
    }
    for (Point v : starts) {
        detail::Bitset w = ball_bits(sys, v, epsilon);
        // non-empty: v itself lies in its epsilon ball
        if (!lookup(v, w)) {
            states.push_back({v, std::move(w), -1, 1});
            remember(states.size() - 1);
        }
    }

    std::size_t head = 0;
    while (head < states.size()) {
        const std::size_t cur = head++;
        const std::uint64_t level = states[cur].level;
        if (!horizon.unbounded && level >= horizon.steps) continue;
        detail::Bitset image(n);
        states[cur].track.for_each([&](Point p) { image.set(sys.step(p)); });
        for (Point nxt : pseudo_successors(sys, delta, states[cur].vertex)) {
            detail::Bitset w = image;
            w &= ball_bits(sys, nxt, epsilon);
            if (w.none()) {
                dec.result = false;
                dec.counterexample = rebuild(static_cast<std::int64_t>(cur), nxt);
                dec.reachable_states = states.size();
                return dec;
            }
            if (lookup(nxt, w)) continue;
            states.push_back({nxt, std::move(w), static_cast<std::int64_t>(cur), level + 1});
            remember(states.size() - 1);
            if (states.size() > kDecisionStateGuard)
                throw std::runtime_error("decide_shadowing: state budget exceeded");
        }
    }
    dec.result = true;
    dec.reachable_states = states.size();
    return dec;
}

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

// Independent oracle: enumerate delta pseudo-orbits outright and test every
// candidate shadow directly. Finds a shortest unshadowed orbit, like the
// breadth-first search above, so counterexample lengths agree.
inline ShadowingDecision brute_force_shadowing(const MetricSystem& sys, Dist epsilon, Dist delta,
                                               std::uint64_t horizon,
                                               std::optional<Point> start = std::nullopt) {
    if (!(epsilon > 0) || !(delta > 0))
        throw std::invalid_argument("brute_force_shadowing needs epsilon > 0 and delta > 0");
    if (horizon < 1) throw std::invalid_argument("brute_force_shadowing needs horizon >= 1");
    const std::uint32_t n = sys.point_count();

    ShadowingDecision dec;
    dec.epsilon = epsilon;
    dec.delta = delta;
    dec.horizon = Horizon::finite(horizon);
    dec.start = start;
    dec.result = true;

    std::vector<Point> starts;
    if (start) starts.push_back(*start);
    else for (Point v = 0; v < n; ++v) starts.push_back(v);

    std::uint64_t budget = kEnumerationGuard;
    std::vector<Point> path;

    auto shadowed = [&](const std::vector<Point>& po) {
        for (Point z = 0; z < n; ++z) {
            Point cur = z;
            bool ok = true;
            for (Point target : po) {
                if (!(sys.distance(cur, target) < epsilon)) {
                    ok = false;
                    break;
                }
                cur = sys.step(cur);
            }
            if (ok) return true;
        }
        return false;
    };

    // depth-first over exact-length paths, shortest lengths first
    std::vector<Point> witness;
    auto dfs = [&](auto&& self, std::uint64_t remaining) -> bool {
        if (budget-- == 0) throw std::runtime_error("brute_force_shadowing: enumeration guard exceeded");
        if (remaining == 0) {
            if (!shadowed(path)) {
                witness = path;
                return true;
            }
            return false;
        }
        for (Point nxt : pseudo_successors(sys, delta, path.back())) {
            path.push_back(nxt);
            if (self(self, remaining - 1)) return true;
            path.pop_back();
        }
        return false;
    };

    for (std::uint64_t len = 1; len <= horizon; ++len) {
        for (Point v : starts) {
            path.assign(1, v);
            if (dfs(dfs, len - 1)) {
                dec.result = false;
                dec.counterexample = PseudoOrbit::finite(witness, delta);
                return dec;
            }
        }
    }
    return dec;
}

// Largest grid delta whose start-constrained unbounded decision holds;
// infinity when every gap bound works (single points, tightly clustered
// spaces), nullopt when no positive grid value does.
inline std::optional<Dist> shadowable_point(const MetricSystem& sys, Point x, Dist epsilon) {
    if (!(epsilon > 0)) throw std::invalid_argument("shadowable_point needs epsilon > 0");
    if (decide_shadowing(sys, epsilon, kInfiniteDist, Horizon::infinite(), x).result)
        return kInfiniteDist;
    const auto& grid = sys.distance_grid();
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
        if (!(*it > 0)) break;
        if (decide_shadowing(sys, epsilon, *it, Horizon::infinite(), x).result) return *it;
    }
    return std::nullopt;
}

}  // namespace pointdyn
