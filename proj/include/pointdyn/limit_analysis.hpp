#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pointdyn/metric_system.hpp"
#include "pointdyn/pseudo_orbit.hpp"
#include "pointdyn/shadowing.hpp"

namespace pointdyn {

// max over x of d(g(x), h(x))
inline Dist uniform_distance(const MetricSystem& space, std::span<const Point> g,
                             std::span<const Point> h) {
    if (g.size() != space.point_count() || h.size() != space.point_count())
        throw std::invalid_argument("uniform_distance: map length mismatch");
    Dist out = 0;
    for (Point x = 0; x < space.point_count(); ++x) out = std::max(out, space.distance(g[x], h[x]));
    return out;
}

// Finitely many maps standing in for a sequence; the limit map is the one the
// space carries. "Uniformly convergent" on a finite model means the tail
// distance reaches 0, i.e. the last member equals the limit.
struct MapFamily {
    MetricSystem space;                      // space.map() is the limit map
    std::vector<std::vector<Point>> members;

    MetricSystem member_system(std::size_t i) const { return space.with_map(members.at(i)); }

    std::vector<Dist> member_distances() const {
        std::vector<Dist> out;
        out.reserve(members.size());
        for (const auto& m : members) out.push_back(uniform_distance(space, m, space.map()));
        return out;
    }

    // non-increasing member distances ending at 0
    bool uniformly_convergent() const {
        if (members.empty()) return false;
        const auto d = member_distances();
        for (std::size_t i = 1; i < d.size(); ++i)
            if (d[i] > d[i - 1]) return false;
        return d.back() == 0;
    }
};

// Largest grid delta that decides shadowing for every member at (epsilon,
// delta, horizon); the members share one constant or the family has none.
inline std::optional<Dist> family_shadowing_constant(const MapFamily& family, Dist epsilon,
                                                     Horizon horizon) {
    if (!(epsilon > 0)) throw std::invalid_argument("family_shadowing_constant needs epsilon > 0");
    if (family.members.empty()) throw std::invalid_argument("family has no members");
    const auto& grid = family.space.distance_grid();
    std::vector<Dist> deltas;
    for (Dist d : grid)
        if (d > 0) deltas.push_back(d);
    if (deltas.empty()) return std::nullopt;

    auto all_members_ok = [&](Dist delta) {
        for (std::size_t i = 0; i < family.members.size(); ++i)
            if (!decide_shadowing(family.member_system(i), epsilon, delta, horizon).result)
                return false;
        return true;
    };
    // monotone in delta: fewer pseudo-orbits at smaller gap bounds
    std::size_t lo = 0, hi = deltas.size();  // invariant: all_ok on [0, lo), unknown [lo, hi)
    if (!all_members_ok(deltas[0])) return std::nullopt;
    lo = 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (all_members_ok(deltas[mid])) lo = mid + 1;
        else hi = mid;
    }
    return deltas[lo - 1];
}

struct LiftStep {
    Dist member_jump = 0;  // d(f_n(x_i), f(x_i))
    Dist limit_gap = 0;    // d(f(x_i), x_{i+1})
    Dist total = 0;
};

struct LiftResult {
    std::size_t member = 0;
    std::vector<LiftStep> steps;
    Dist bound = 0;  // 2 * po.delta; every step total stays below it
};

// Transfer a pseudo-orbit of the limit map to a member: a delta/2 gap plus a
// member within delta/2 uniformly stays below delta, step by step.
inline LiftResult lift_pseudo_orbit(const MapFamily& family, const PseudoOrbit& po) {
    if (!family.uniformly_convergent())
        throw std::invalid_argument("lift_pseudo_orbit: family failed uniform-convergence validation");
    const auto gp = gap_profile(family.space, po);
    if (!(gp.max_gap < po.delta()))
        throw std::invalid_argument("lift_pseudo_orbit: sequence is not a pseudo-orbit at its own bound");

    const auto dists = family.member_distances();
    std::size_t n = dists.size();
    for (std::size_t i = 0; i < dists.size(); ++i)
        if (dists[i] < po.delta()) {
            n = i;
            break;
        }
    if (n == dists.size())
        throw std::invalid_argument("lift_pseudo_orbit: no member within delta/2 of the limit");

    LiftResult out;
    out.member = n;
    out.bound = 2 * po.delta();
    std::vector<Point> seq(po.preblock());
    seq.insert(seq.end(), po.block().begin(), po.block().end());
    const auto& member = family.members[n];
    auto push_step = [&](Point from, Point to) {
        LiftStep st;
        st.member_jump = family.space.distance(member[from], family.space.step(from));
        st.limit_gap = family.space.distance(family.space.step(from), to);
        st.total = family.space.distance(member[from], to);
        out.steps.push_back(st);
    };
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) push_step(seq[i], seq[i + 1]);
    if (po.is_periodic()) push_step(po.block().back(), po.block().front());
    return out;
}

struct LimitShadowStep {
    Dist to_member_orbit = 0;    // d(f^i(y), f^i(y_n))
    Dist member_orbit_drift = 0; // d(f^i(y_n), f_n^i(y_n))
    Dist member_tracking = 0;    // d(f_n^i(y_n), x_i)
    Dist total = 0;              // d(f^i(y), x_i), bounded by the three above
};

struct LimitShadowResult {
    Point y = 0;
    std::size_t certifying_member = 0;
    std::vector<LimitShadowStep> audit;
    std::vector<std::pair<std::size_t, Point>> member_shadows;
};

struct LimitShadowFailure {
    std::string stage;
    std::size_t member = 0;
};

// Constructive limit shadow: every qualifying member contributes an
// epsilon/3 shadow, and on a finite list the value that "recurs infinitely
// often" is the last member's (the designated tail). The three-term audit
// certifies d(f^i(y), x_i) <= epsilon at every step.
inline std::optional<LimitShadowResult> limit_shadow(const MapFamily& family,
                                                     const PseudoOrbit& po, Dist epsilon,
                                                     LimitShadowFailure* failure = nullptr) {
    if (!(epsilon > 0)) throw std::invalid_argument("limit_shadow needs epsilon > 0");
    if (!family.uniformly_convergent())
        throw std::invalid_argument("limit_shadow: family failed uniform-convergence validation");
    if (po.is_periodic()) throw std::invalid_argument("limit_shadow expects a finite pseudo-orbit");

    const auto dists = family.member_distances();
    const std::uint64_t horizon = po.length();

    LimitShadowResult res;
    bool any = false;
    for (std::size_t n = 0; n < family.members.size(); ++n) {
        if (!(dists[n] < po.delta())) continue;  // not yet in the qualifying tail
        any = true;
        const auto search = find_shadows(family.member_system(n), po, epsilon / 3, horizon);
        if (search.empty()) {
            if (failure) *failure = {"member-shadow", n};
            return std::nullopt;
        }
        res.member_shadows.emplace_back(n, search.best()->start);
    }
    if (!any) {
        if (failure) *failure = {"lift", family.members.size()};
        return std::nullopt;
    }

    res.certifying_member = res.member_shadows.back().first;
    const Point yn = res.member_shadows.back().second;
    res.y = yn;

    const auto& member = family.members[res.certifying_member];
    Point cur_limit_y = res.y;   // f^i(y)
    Point cur_limit_yn = yn;     // f^i(y_n)
    Point cur_member_yn = yn;    // f_n^i(y_n)
    for (std::uint64_t i = 0; i < horizon; ++i) {
        LimitShadowStep st;
        st.to_member_orbit = family.space.distance(cur_limit_y, cur_limit_yn);
        st.member_orbit_drift = family.space.distance(cur_limit_yn, cur_member_yn);
        st.member_tracking = family.space.distance(cur_member_yn, po.at(i));
        st.total = family.space.distance(cur_limit_y, po.at(i));
        res.audit.push_back(st);
        if (!(st.total <= epsilon)) {
            if (failure) *failure = {"verification", res.certifying_member};
            return std::nullopt;
        }
        cur_limit_y = family.space.step(cur_limit_y);
        cur_limit_yn = family.space.step(cur_limit_yn);
        cur_member_yn = member[cur_member_yn];
    }
    return res;
}

struct ChainRecurrence {
    std::vector<Point> recurrent_points;  // ascending
    bool whole_map = false;
};

inline constexpr std::uint32_t kChainGuard = 2048;

// x is epsilon-chain-recurrent iff it lies on a cycle of the pseudo-orbit
// graph: a self-loop or a strongly connected component of size >= 2.
inline ChainRecurrence chain_recurrence(const MetricSystem& sys, Dist epsilon) {
    if (!(epsilon > 0)) throw std::invalid_argument("chain_recurrence needs epsilon > 0");
    const std::uint32_t n = sys.point_count();
    if (n > kChainGuard) throw std::runtime_error("chain_recurrence guarded to 2048 points");

    std::vector<std::vector<Point>> adj(n);
    for (Point v = 0; v < n; ++v) adj[v] = pseudo_successors(sys, epsilon, v);

    // iterative Tarjan
    std::vector<std::int32_t> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> onstack(n, false);
    std::vector<Point> stack;
    std::vector<std::uint32_t> comp_size;
    std::int32_t next_index = 0;

    struct Frame {
        Point v;
        std::size_t child;
    };
    for (Point root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        onstack[root] = true;
        while (!frames.empty()) {
            Frame& fr = frames.back();
            if (fr.child < adj[fr.v].size()) {
                const Point w = adj[fr.v][fr.child++];
                if (index[w] == -1) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    onstack[w] = true;
                    frames.push_back({w, 0});
                } else if (onstack[w]) {
                    low[fr.v] = std::min(low[fr.v], index[w]);
                }
            } else {
                if (low[fr.v] == index[fr.v]) {
                    const auto c = static_cast<std::int32_t>(comp_size.size());
                    std::uint32_t size = 0;
                    Point w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        onstack[w] = false;
                        comp[w] = c;
                        ++size;
                    } while (w != fr.v);
                    comp_size.push_back(size);
                }
                const Point done = fr.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[done]);
            }
        }
    }

    ChainRecurrence out;
    for (Point v = 0; v < n; ++v) {
        const bool self_loop = sys.distance(sys.step(v), v) < epsilon;
        if (self_loop || comp_size[static_cast<std::size_t>(comp[v])] >= 2)
            out.recurrent_points.push_back(v);
    }
    out.whole_map = out.recurrent_points.size() == n;
    return out;
}

struct LimitNonwanderingVerdict {
    bool ok = false;
    std::string failed_step;  // empty when ok
    bool members_nonwandering = false;
    std::vector<std::pair<Dist, std::optional<Dist>>> family_constants;  // per epsilon
    std::vector<std::pair<Dist, bool>> limit_chain_recurrent;            // per epsilon
    bool limit_nonwandering = false;
};

namespace detail {

inline bool map_nonwandering(const MetricSystem& sys) {
    for (Point x = 0; x < sys.point_count(); ++x) {
        // periodic points return exactly; only the rest need the ball iteration
        if (orbit_structure(sys, x).periodic()) continue;
        if (!classify_point(sys, x).nonwandering) return false;
    }
    return true;
}

}  // namespace detail

// Limit-of-nonwandering check: members nonwandering, a shared shadowing
// constant at every requested scale, the limit chain-recurrent at those
// scales, and finally the limit verified nonwandering point by point.
inline LimitNonwanderingVerdict check_limit_nonwandering(const MapFamily& family,
                                                         std::span<const Dist> epsilon_grid,
                                                         Horizon horizon) {
    LimitNonwanderingVerdict v;
    if (!family.uniformly_convergent())
        throw std::invalid_argument("check_limit_nonwandering: family failed convergence validation");

    v.members_nonwandering = true;
    for (std::size_t i = 0; i < family.members.size() && v.members_nonwandering; ++i)
        v.members_nonwandering = detail::map_nonwandering(family.member_system(i));
    if (!v.members_nonwandering) {
        v.failed_step = "members-nonwandering";
        return v;
    }

    for (Dist eps : epsilon_grid) {
        const auto c = family_shadowing_constant(family, eps, horizon);
        v.family_constants.emplace_back(eps, c);
        if (!c) {
            v.failed_step = "uniform-shadowing-constant";
            return v;
        }
    }
    for (Dist eps : epsilon_grid) {
        const bool cr = chain_recurrence(family.space, eps).whole_map;
        v.limit_chain_recurrent.emplace_back(eps, cr);
        if (!cr) {
            v.failed_step = "limit-chain-recurrence";
            return v;
        }
    }
    v.limit_nonwandering = detail::map_nonwandering(family.space);
    if (!v.limit_nonwandering) {
        v.failed_step = "limit-nonwandering";
        return v;
    }
    v.ok = true;
    return v;
}

}  // namespace pointdyn
