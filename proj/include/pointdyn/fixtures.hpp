#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pointdyn/limit_analysis.hpp"
#include "pointdyn/metric_system.hpp"

namespace pointdyn {

// Depth-k truncation of the binary sequence space with the cyclic rotation
// map; every point is periodic with period dividing k.
inline MetricSystem gen_shift_words(std::uint32_t k) {
    if (k < 1 || k > 20) throw std::invalid_argument("gen_shift_words needs 1 <= k <= 20");
    const std::uint32_t n = std::uint32_t{1} << k;
    std::vector<Point> map(n);
    for (Point w = 0; w < n; ++w) map[w] = ((w << 1) | (w >> (k - 1))) & (n - 1);
    return MetricSystem(BinaryWords{k}, std::move(map));
}

// Circle of 2^k - 1 points with the doubling map, a permutation whose orbit
// periods divide k. The standard expanding fixture for the certifier.
inline MetricSystem gen_doubling(std::uint32_t k) {
    if (k < 3 || k > 20) throw std::invalid_argument("gen_doubling needs 3 <= k <= 20");
    const std::uint32_t n = (std::uint32_t{1} << k) - 1;
    std::vector<Point> map(n);
    for (Point j = 0; j < n; ++j) map[j] = static_cast<Point>((2ull * j) % n);
    return MetricSystem(CircleGrid{n}, std::move(map));
}

namespace detail {

// Min-plus closure; the largest metric below the seeded constraints.
inline void min_plus_closure(std::vector<Dist>& d, std::uint32_t n) {
    for (std::uint32_t k = 0; k < n; ++k)
        for (std::uint32_t i = 0; i < n; ++i) {
            const Dist dik = d[static_cast<std::size_t>(i) * n + k];
            for (std::uint32_t j = 0; j < n; ++j) {
                const Dist via = dik + d[static_cast<std::size_t>(k) * n + j];
                auto& ref = d[static_cast<std::size_t>(i) * n + j];
                if (via < ref) ref = via;
            }
        }
}

}  // namespace detail

inline constexpr Dist kCcCycleSeparation = 2.0;

// Disjoint base cycles plus copy cycles: copy n sits at exactly 1/n from its
// base orbit, phase by phase, and carries the same rotation. Cross distances
// come from the min-plus closure of the seeded constraints, which keeps the
// pinned 1/n values exact.
inline MetricSystem gen_carvalho_cordeiro(std::span<const std::uint32_t> cycle_lengths,
                                          std::uint32_t copies) {
    if (cycle_lengths.empty()) throw std::invalid_argument("needs at least one base cycle");
    if (copies > cycle_lengths.size())
        throw std::invalid_argument("copies may not exceed the number of base cycles");
    for (auto len : cycle_lengths)
        if (len < 2) throw std::invalid_argument("cycle lengths must be at least 2");

    std::uint32_t base_total = 0;
    for (auto len : cycle_lengths) base_total += len;
    std::uint32_t copy_total = 0;
    for (std::uint32_t c = 0; c < copies; ++c) copy_total += cycle_lengths[c];
    const std::uint32_t n = base_total + copy_total;

    std::vector<std::uint32_t> cycle_of(n), phase_of(n), len_of(n);
    std::vector<bool> is_copy(n, false);
    std::vector<Point> map(n);
    std::vector<std::string> labels(n);
    std::uint32_t at = 0;
    std::vector<std::uint32_t> base_start(cycle_lengths.size()), copy_start(copies);
    for (std::uint32_t c = 0; c < cycle_lengths.size(); ++c) {
        base_start[c] = at;
        for (std::uint32_t i = 0; i < cycle_lengths[c]; ++i, ++at) {
            cycle_of[at] = c;
            phase_of[at] = i;
            len_of[at] = cycle_lengths[c];
            map[at] = base_start[c] + (i + 1) % cycle_lengths[c];
            labels[at] = "O" + std::to_string(c + 1) + "[" + std::to_string(i) + "]";
        }
    }
    for (std::uint32_t c = 0; c < copies; ++c) {
        copy_start[c] = at;
        for (std::uint32_t i = 0; i < cycle_lengths[c]; ++i, ++at) {
            cycle_of[at] = c;
            phase_of[at] = i;
            len_of[at] = cycle_lengths[c];
            is_copy[at] = true;
            map[at] = copy_start[c] + (i + 1) % cycle_lengths[c];
            labels[at] = "O'" + std::to_string(c + 1) + "[" + std::to_string(i) + "]";
        }
    }

    const Dist far = kCcCycleSeparation + 1.0;  // seed slack closed by the closure
    std::vector<Dist> d(static_cast<std::size_t>(n) * n, 0);
    auto set = [&](std::uint32_t i, std::uint32_t j, Dist v) {
        d[static_cast<std::size_t>(i) * n + j] = v;
        d[static_cast<std::size_t>(j) * n + i] = v;
    };
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
            Dist v;
            if (cycle_of[i] == cycle_of[j] && is_copy[i] == is_copy[j]) {
                // rotation metric inside a cycle
                std::uint32_t t = phase_of[i] > phase_of[j] ? phase_of[i] - phase_of[j]
                                                            : phase_of[j] - phase_of[i];
                t = std::min(t, len_of[i] - t);
                v = static_cast<Dist>(t) / static_cast<Dist>(len_of[i]);
            } else if (cycle_of[i] == cycle_of[j] && phase_of[i] == phase_of[j]) {
                v = 1.0 / static_cast<Dist>(cycle_of[i] + 1);  // the pinned copy distance
            } else if (is_copy[i] == is_copy[j] || cycle_of[i] != cycle_of[j]) {
                v = is_copy[i] || is_copy[j] ? far : kCcCycleSeparation;
            } else {
                v = far;  // base/copy of the same cycle, phases differing
            }
            set(i, j, v);
        }
    detail::min_plus_closure(d, n);
    MetricSystem sys(ExplicitMatrix(n, std::move(d)), std::move(map), std::move(labels));
    if (!validate(sys).ok()) throw std::logic_error("carvalho-cordeiro seed failed to close to a metric");
    return sys;
}

// Members are the base map composed with a seeded point swap whose distance
// shrinks geometrically; the final member is the limit itself, standing in
// for the whole tail of the sequence.
inline MapFamily gen_perturbed_family(const MetricSystem& base, std::uint32_t count,
                                      double magnitude, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("gen_perturbed_family needs count >= 1");
    if (magnitude < 0) throw std::invalid_argument("gen_perturbed_family needs magnitude >= 0");
    const std::uint32_t n = base.point_count();
    std::mt19937_64 rng(seed);

    MapFamily fam{base, {}};
    for (std::uint32_t i = 0; i + 1 < count; ++i) {
        const double target = magnitude * std::ldexp(1.0, -static_cast<int>(i));
        const Point a = static_cast<Point>(rng() % n);
        Point b = a;
        Dist best = kInfiniteDist;
        for (Point y = 0; y < n; ++y) {
            if (y == a) continue;
            const Dist gap = std::abs(base.distance(a, y) - target);
            if (gap < best) {
                best = gap;
                b = y;
            }
        }
        std::vector<Point> m(base.map());
        if (magnitude > 0)
            for (Point x = 0; x < n; ++x) {
                if (m[x] == a) m[x] = b;
                else if (m[x] == b) m[x] = a;
            }
        fam.members.push_back(std::move(m));
    }
    fam.members.push_back(base.map());

    const auto dists = fam.member_distances();
    for (std::size_t i = 1; i < dists.size(); ++i)
        if (dists[i] > dists[i - 1])
            throw std::logic_error("perturbed family distances failed to decrease");
    return fam;
}

}  // namespace pointdyn
