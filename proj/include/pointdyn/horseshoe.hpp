#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pointdyn/expansivity.hpp"
#include "pointdyn/metric_system.hpp"
#include "pointdyn/pseudo_orbit.hpp"
#include "pointdyn/shadowing.hpp"

namespace pointdyn {

// Two periodic delta pseudo-orbit blocks through a shared anchor, separated
// by more than the requested scale at some index.
struct PeriodicPairBlocks {
    Point anchor = 0;
    std::uint32_t period = 0;
    std::vector<Point> block0;
    std::vector<Point> block1;
    Dist delta = 0;
    std::uint32_t separation_index = 0;
    Dist e_attained = 0;
};

// gamma(word): concatenate the blocks named by the symbols. Every seam gap
// equals a block wrap gap because both blocks start at the anchor.
inline PseudoOrbit gamma(const PeriodicPairBlocks& pair, const std::string& word) {
    if (word.empty()) throw std::invalid_argument("gamma needs a non-empty word");
    std::vector<Point> seq;
    seq.reserve(word.size() * pair.period);
    for (char c : word) {
        if (c != '0' && c != '1') throw std::invalid_argument("word symbols must be 0 or 1");
        const auto& b = (c == '0') ? pair.block0 : pair.block1;
        seq.insert(seq.end(), b.begin(), b.end());
    }
    return PseudoOrbit::finite(std::move(seq), pair.delta);
}

namespace detail {

// Return cycles through z built the way the recurrence argument builds them:
// jump once from f(z) to a candidate v, ride the true orbit, and close the
// loop when the orbit lands back within delta of z.
struct JumpCycle {
    std::uint32_t k = 0;                 // block length
    std::vector<Point> tail;             // orbit points after the anchor (k - 1 of them)
};

inline Point aligned_entry(Point anchor, const JumpCycle& c, std::uint32_t l) {
    const std::uint32_t r = l % c.k;
    return r == 0 ? anchor : c.tail[r - 1];
}

inline std::vector<Point> aligned_block(Point anchor, const JumpCycle& c, std::uint32_t m) {
    std::vector<Point> b(m);
    for (std::uint32_t l = 0; l < m; ++l) b[l] = aligned_entry(anchor, c, l);
    return b;
}

inline std::pair<Dist, std::uint32_t> block_separation(const MetricSystem& sys,
                                                       const std::vector<Point>& a,
                                                       const std::vector<Point>& b) {
    Dist best = -1;
    std::uint32_t at = 0;
    for (std::uint32_t l = 0; l < a.size(); ++l) {
        const Dist d = sys.distance(a[l], b[l]);
        if (d > best) {
            best = d;
            at = l;
        }
    }
    return {best, at};
}

}  // namespace detail

inline constexpr std::uint32_t kPairCandidateGuard = 200'000;

// Search for an e-separated pair of periodic delta pseudo-orbits through z.
// Cycles of lengths k1, k2 are aligned to their least common multiple; the
// result minimizes the common period, then maximizes the attained
// separation, then takes the lexicographically least blocks.
inline std::optional<PeriodicPairBlocks> find_periodic_pair(const MetricSystem& sys, Point z,
                                                            Dist delta, Dist e_min,
                                                            std::uint32_t m_max) {
    if (!(delta > 0) || !(e_min > 0))
        throw std::invalid_argument("find_periodic_pair needs delta > 0 and e_min > 0");
    if (m_max < 1) throw std::invalid_argument("find_periodic_pair needs m_max >= 1");

    std::vector<detail::JumpCycle> cycles;
    if (sys.distance(sys.step(z), z) < delta) cycles.push_back({1, {}});

    const auto candidates = ball(sys, sys.step(z), delta);
    if (candidates.size() > kPairCandidateGuard)
        throw std::runtime_error("find_periodic_pair: jump candidate ball too large");
    for (Point v : candidates) {
        std::vector<Point> orbit{v};  // orbit[j] = f^j(v)
        orbit.reserve(m_max);
        for (std::uint32_t j = 1; j < m_max; ++j) orbit.push_back(sys.step(orbit.back()));
        for (std::uint32_t k = 2; k <= m_max; ++k)
            if (sys.distance(orbit[k - 1], z) < delta)
                cycles.push_back({k, std::vector<Point>(orbit.begin(), orbit.begin() + (k - 1))});
    }
    if (cycles.empty()) return std::nullopt;

    for (std::uint32_t m = 1; m <= m_max; ++m) {
        std::vector<std::size_t> usable;
        for (std::size_t i = 0; i < cycles.size(); ++i)
            if (m % cycles[i].k == 0) usable.push_back(i);
        if (usable.size() < 2) continue;

        // best separation achievable at this period, over aligned indices
        Dist e_star = -1;
        std::vector<Point> values;
        for (std::uint32_t l = 1; l < m; ++l) {
            values.clear();
            for (std::size_t i : usable) values.push_back(detail::aligned_entry(z, cycles[i], l));
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (std::size_t a = 0; a < values.size(); ++a)
                for (std::size_t b = a + 1; b < values.size(); ++b)
                    e_star = std::max(e_star, sys.distance(values[a], values[b]));
        }
        if (!(e_star > e_min)) continue;

        std::vector<std::vector<Point>> blocks;
        blocks.reserve(usable.size());
        for (std::size_t i : usable) blocks.push_back(detail::aligned_block(z, cycles[i], m));
        std::sort(blocks.begin(), blocks.end());
        blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());

        for (std::size_t a = 0; a < blocks.size(); ++a)
            for (std::size_t b = a + 1; b < blocks.size(); ++b) {
                const auto [sep, at] = detail::block_separation(sys, blocks[a], blocks[b]);
                if (sep == e_star) {
                    PeriodicPairBlocks out;
                    out.anchor = z;
                    out.period = m;
                    out.block0 = blocks[a];
                    out.block1 = blocks[b];
                    out.delta = delta;
                    out.separation_index = at;
                    out.e_attained = sep;
                    return out;
                }
            }
    }
    return std::nullopt;
}

inline constexpr std::uint32_t kMaxCertificateDepth = 24;
inline constexpr std::uint32_t kMaxCertificatePeriod = 4096;

struct CertifyParams {
    Dist b = 0;
    Dist e = 0;
    Dist delta = 0;
    std::uint32_t depth = 1;
    std::uint32_t m_max = 16;
};

struct HorseshoeCertificate {
    PeriodicPairBlocks pair;
    Dist b = 0;
    Dist e = 0;
    std::uint32_t depth = 1;
    std::map<std::string, Point> shadows;
    bool injective = false;
    std::uint32_t semiconjugacy_checked_depth = 0;
    double entropy_bound = 0;  // log 2 / period
    bool conjugacy = false;    // expansivity forced shadow uniqueness at scale e
    std::optional<Dist> expansivity_checked;  // constant found on the covering ball
    std::vector<std::string> caveats;
};

struct CertifyOutcome {
    std::optional<HorseshoeCertificate> certificate;
    std::string stage;       // failing stage when empty
    std::string diagnostic;
};

struct CertificateCheck {
    bool ok = true;
    std::vector<std::string> violations;
};

// Independent re-check from first principles: metric evaluations and direct
// orbit iteration only, so a serialized certificate can be audited elsewhere.
inline CertificateCheck verify_certificate(const MetricSystem& sys,
                                           const HorseshoeCertificate& cert) {
    CertificateCheck chk;
    auto fail = [&](std::string msg) {
        chk.ok = false;
        chk.violations.push_back(std::move(msg));
    };

    const auto& pr = cert.pair;
    const std::uint32_t m = pr.period;
    if (!(cert.e > 2 * cert.b) || !(cert.b > 0)) fail("scales: requires e > 2b > 0");
    if (!(pr.delta > 0)) fail("scales: requires delta > 0");
    if (cert.depth < 1 || cert.depth > kMaxCertificateDepth) {
        fail("depth: requires 1 <= depth <= 24");
        return chk;
    }
    if (m < 1 || pr.block0.size() != m || pr.block1.size() != m) {
        fail("pair: block lengths disagree with the period");
        return chk;
    }
    for (const auto* blk : {&pr.block0, &pr.block1})
        for (Point p : *blk)
            if (p >= sys.point_count()) {
                fail("pair: block entry out of range for this system");
                return chk;
            }
    if (pr.block0[0] != pr.anchor || pr.block1[0] != pr.anchor)
        fail("pair: blocks must start at the anchor");
    for (const auto* blk : {&pr.block0, &pr.block1}) {
        const auto po = PseudoOrbit::periodic({}, *blk, pr.delta);
        const auto gp = gap_profile(sys, po);
        if (!(gp.max_gap < pr.delta)) fail("pair: block is not a periodic delta pseudo-orbit");
    }
    if (pr.separation_index >= m) {
        fail("pair: separation index out of range");
        return chk;
    }
    const Dist sep = sys.distance(pr.block0[pr.separation_index], pr.block1[pr.separation_index]);
    if (sep != pr.e_attained || !(pr.e_attained > 0))
        fail("pair: recorded separation does not match the blocks");

    const std::uint64_t span = static_cast<std::uint64_t>(cert.depth) * m;
    const std::size_t expected = std::size_t{1} << cert.depth;
    if (cert.shadows.size() != expected) fail("shadows: expected one point per word");

    auto trace_ok = [&](Point y, const PseudoOrbit& po, std::uint64_t steps) {
        Point cur = y;
        for (std::uint64_t i = 0; i < steps; ++i) {
            if (!(sys.distance(cur, po.at(i)) < cert.b)) return false;
            cur = sys.step(cur);
        }
        return true;
    };

    std::vector<std::pair<std::string, Point>> items(cert.shadows.begin(), cert.shadows.end());
    for (const auto& [w, y] : items) {
        if (w.size() != cert.depth || w.find_first_not_of("01") != std::string::npos) {
            fail("shadows: malformed word " + w);
            return chk;
        }
        if (y >= sys.point_count()) {
            fail("shadows: point out of range for word " + w);
            return chk;
        }
        if (!trace_ok(y, gamma(pr, w), span))
            fail("shadows: point for word " + w + " does not b-shadow gamma within the window");
    }

    for (std::size_t a = 0; a < items.size(); ++a)
        for (std::size_t b2 = a + 1; b2 < items.size(); ++b2) {
            if (items[a].second == items[b2].second)
                fail("separation: words " + items[a].first + " and " + items[b2].first +
                     " share a shadow point");
            Point x = items[a].second, y = items[b2].second;
            bool seen = false;
            for (std::uint64_t i = 0; i < span; ++i) {
                if (sys.distance(x, y) >= cert.e - 2 * cert.b) {
                    seen = true;
                    break;
                }
                x = sys.step(x);
                y = sys.step(y);
            }
            if (!seen)
                fail("separation: shadows of " + items[a].first + " and " + items[b2].first +
                     " never separate by e - 2b");
        }

    if (cert.depth >= 2) {
        for (const auto& [w, y] : items) {
            if (w.size() != cert.depth) continue;
            const std::string shifted = w.substr(1);
            if (!trace_ok(sys.iterate(y, m), gamma(pr, shifted),
                          static_cast<std::uint64_t>(cert.depth - 1) * m))
                fail("semiconjugacy: f^m of the shadow of " + w + " does not b-shadow gamma(" +
                     shifted + ")");
        }
    }
    if (cert.semiconjugacy_checked_depth != cert.depth - 1)
        fail("semiconjugacy: recorded depth disagrees with the certificate depth");

    // recount candidates per word by direct scan; no tracking sets involved
    bool all_unique = true;
    for (const auto& [w, y] : items) {
        if (w.size() != cert.depth) continue;
        const auto po = gamma(pr, w);
        std::uint32_t count = 0;
        for (Point cand = 0; cand < sys.point_count(); ++cand) {
            if (trace_ok(cand, po, span) && ++count > 1) break;
        }
        if (count != 1) all_unique = false;
    }
    if (cert.injective != all_unique) fail("injectivity: flag disagrees with a direct recount");

    if (cert.entropy_bound != std::log(2.0) / static_cast<double>(m))
        fail("entropy: bound is not log 2 / period");
    return chk;
}

namespace detail {

inline constexpr std::uint32_t kModeBallGuard = 4096;

// Smallest-ball expansivity probe used for the conjugacy claim: the minimum
// pairwise dynamical separation over the tightest ball around x that
// contains every shadow point.
inline std::optional<Dist> covering_ball_constant(const MetricSystem& sys, Point x,
                                                  const std::map<std::string, Point>& shadows) {
    Dist rmax = 0;
    for (const auto& [w, y] : shadows) rmax = std::max(rmax, sys.distance(x, y));
    const Dist r = sys.grid_value_above(rmax);
    const auto members = ball(sys, x, r);
    if (members.size() > kModeBallGuard || members.size() < 2) return std::nullopt;

    std::unordered_map<Point, OrbitStructure> orbits;
    for (Point p : members) orbits.emplace(p, orbit_structure(sys, p));
    Dist best = kInfiniteDist;
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const auto& oa = orbits[members[i]];
            const auto& ob = orbits[members[j]];
            const std::uint64_t steps =
                std::max(oa.preperiod, ob.preperiod) + std::lcm<std::uint64_t>(oa.period(), ob.period());
            Point a = members[i], b = members[j];
            Dist d = 0;
            for (std::uint64_t s = 0; s < steps && d < best; ++s) {
                d = std::max(d, sys.distance(a, b));
                a = sys.step(a);
                b = sys.step(b);
            }
            best = std::min(best, d);
        }
    return best;
}

inline CertifyOutcome assemble_certificate(const MetricSystem& sys, Point x,
                                           PeriodicPairBlocks pair, const CertifyParams& p) {
    CertifyOutcome out;
    HorseshoeCertificate cert;
    cert.pair = std::move(pair);
    cert.b = p.b;
    cert.e = p.e;
    cert.depth = p.depth;
    cert.semiconjugacy_checked_depth = p.depth - 1;
    cert.entropy_bound = std::log(2.0) / static_cast<double>(cert.pair.period);

    const std::uint64_t span = static_cast<std::uint64_t>(p.depth) * cert.pair.period;
    cert.injective = true;
    std::vector<std::pair<std::string, std::vector<ShadowCandidate>>> found;
    for (std::uint32_t w = 0; w < (std::uint32_t{1} << p.depth); ++w) {
        std::string word;
        for (std::uint32_t i = 0; i < p.depth; ++i)
            word.push_back((w >> (p.depth - 1 - i)) & 1 ? '1' : '0');
        auto search = find_shadows(sys, gamma(cert.pair, word), p.b, span);
        if (search.empty()) {
            out.stage = "shadow";
            out.diagnostic = "no shadow for word " + word;
            return out;
        }
        cert.injective = cert.injective && search.candidates.size() == 1;
        std::stable_sort(search.candidates.begin(), search.candidates.end(),
                         [](const ShadowCandidate& a, const ShadowCandidate& b) {
                             if (a.max_deviation != b.max_deviation)
                                 return a.max_deviation < b.max_deviation;
                             return a.total_deviation < b.total_deviation;
                         });
        found.emplace_back(word, std::move(search.candidates));
    }
    // Candidate sets may overlap when b exceeds the attained separation;
    // assign best untaken candidates so distinct words keep distinct shadows.
    std::unordered_map<Point, bool> taken;
    for (const auto& [word, cands] : found) {
        const ShadowCandidate* pick = nullptr;
        for (const auto& c : cands)
            if (!taken.count(c.start)) {
                pick = &c;
                break;
            }
        if (!pick) {
            out.stage = "shadow";
            out.diagnostic = "no distinct shadow available for word " + word;
            return out;
        }
        taken.emplace(pick->start, true);
        cert.shadows[word] = pick->start;
    }

    cert.expansivity_checked = covering_ball_constant(sys, x, cert.shadows);
    cert.conjugacy = cert.expansivity_checked && *cert.expansivity_checked >= p.e;
    if (!cert.expansivity_checked)
        cert.caveats.push_back(
            "expansivity probe skipped (covering ball too large or trivial); claiming semiconjugacy only");

    cert.caveats.push_back(
        "finite model: realizable depth is bounded by the orbit periods of the space");
    cert.caveats.push_back(
        "entropy bound log 2 / period certifies separated-set growth at scale e - 2b over the verified window");

    const auto chk = verify_certificate(sys, cert);
    if (!chk.ok) {
        out.stage = "invariants";
        out.diagnostic = chk.violations.front();
        return out;
    }
    out.certificate = std::move(cert);
    return out;
}

}  // namespace detail

// Pipeline: anchor on the cycle of x, find a separated pair of periodic
// pseudo-orbits through it, shadow every word of the requested depth, verify
// the invariants, then decide between the conjugacy and semiconjugacy claims.
inline CertifyOutcome certify(const MetricSystem& sys, Point x, const CertifyParams& p) {
    if (!(p.e > 2 * p.b) || !(p.b > 0)) throw std::invalid_argument("certify requires e > 2b > 0");
    if (!(p.delta > 0)) throw std::invalid_argument("certify requires delta > 0");
    if (p.depth < 1 || p.depth > kMaxCertificateDepth)
        throw std::invalid_argument("certify requires 1 <= depth <= 24");

    const Point z = orbit_structure(sys, x).cycle.front();
    auto pair = find_periodic_pair(sys, z, p.delta, p.e, p.m_max);
    if (!pair) {
        CertifyOutcome out;
        out.stage = "pair";
        out.diagnostic = "no e-separated pair of periodic pseudo-orbits through anchor " +
                         std::to_string(z);
        return out;
    }
    return detail::assemble_certificate(sys, x, std::move(*pair), p);
}

// Periodic-point entry: true orbits are delta pseudo-orbits for every delta,
// so the blocks come straight from the orbits of p and q, stitched through
// the anchor p with a single delta jump each way.
inline CertifyOutcome certify_from_periodic_points(const MetricSystem& sys, Point p, Point q,
                                                   const CertifyParams& params) {
    if (!(params.e > 2 * params.b) || !(params.b > 0))
        throw std::invalid_argument("certify requires e > 2b > 0");
    if (!(params.delta > 0)) throw std::invalid_argument("certify requires delta > 0");
    if (params.depth < 1 || params.depth > kMaxCertificateDepth)
        throw std::invalid_argument("certify requires 1 <= depth <= 24");
    if (p == q) throw std::invalid_argument("certify_from_periodic_points needs distinct points");
    const auto op = orbit_structure(sys, p);
    const auto oq = orbit_structure(sys, q);
    if (!op.periodic() || !oq.periodic())
        throw std::invalid_argument("certify_from_periodic_points needs periodic points");

    const std::uint64_t lcm = std::lcm<std::uint64_t>(op.period(), oq.period());
    if (lcm > kMaxCertificatePeriod)
        throw std::runtime_error("certify_from_periodic_points: aligned period exceeds 4096");
    std::uint32_t m = static_cast<std::uint32_t>(lcm);
    if (m < 2) m = 2;  // a fixed-point pair still needs one slot for the second orbit

    // phase of q's orbit nearest to f(p); the jump has to clear delta
    Point qphase = oq.cycle.front();
    Dist bestd = kInfiniteDist;
    for (Point w : oq.cycle) {
        const Dist d = sys.distance(sys.step(p), w);
        if (d < bestd) {
            bestd = d;
            qphase = w;
        }
    }

    PeriodicPairBlocks pair;
    pair.anchor = p;
    pair.period = m;
    pair.delta = params.delta;
    pair.block0.resize(m);
    pair.block1.resize(m);
    Point a = p, b = qphase;
    pair.block0[0] = p;
    pair.block1[0] = p;
    for (std::uint32_t i = 1; i < m; ++i) {
        a = sys.step(a);
        pair.block0[i] = a;
        pair.block1[i] = b;
        b = sys.step(b);
    }

    CertifyOutcome out;
    for (const auto* blk : {&pair.block0, &pair.block1}) {
        const auto gp = gap_profile(sys, PseudoOrbit::periodic({}, *blk, params.delta));
        if (!(gp.max_gap < params.delta)) {
            out.stage = "pair";
            out.diagnostic = "periodic blocks need delta above the jump gaps (max gap " +
                             std::to_string(gp.max_gap) + ")";
            return out;
        }
    }
    const auto [sep, at] = detail::block_separation(sys, pair.block0, pair.block1);
    if (!(sep > 0)) {
        out.stage = "pair";
        out.diagnostic = "orbits of the two points coincide; no separated pair";
        return out;
    }
    pair.e_attained = sep;
    pair.separation_index = at;
    return detail::assemble_certificate(sys, p, std::move(pair), params);
}

}  // namespace pointdyn
