#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "pointdyn/metric_system.hpp"

namespace pointdyn {

// A finite pseudo-orbit is just its point list; a periodic one is a preblock
// followed by a block repeated forever (the wrap gap counts as a gap).
class PseudoOrbit {
public:
    static PseudoOrbit finite(std::vector<Point> points, Dist delta) {
        if (points.empty()) throw std::invalid_argument("pseudo-orbit needs at least one point");
        PseudoOrbit po;
        po.block_ = std::move(points);
        po.delta_ = delta;
        po.periodic_ = false;
        return po;
    }

    static PseudoOrbit periodic(std::vector<Point> preblock, std::vector<Point> block, Dist delta) {
        if (block.empty()) throw std::invalid_argument("periodic pseudo-orbit needs a non-empty block");
        PseudoOrbit po;
        po.pre_ = std::move(preblock);
        po.block_ = std::move(block);
        po.delta_ = delta;
        po.periodic_ = true;
        return po;
    }

    bool is_periodic() const { return periodic_; }
    Dist delta() const { return delta_; }
    const std::vector<Point>& preblock() const { return pre_; }
    const std::vector<Point>& block() const { return block_; }

    // Finite length in points; a periodic orbit has no finite length.
    std::size_t length() const {
        if (periodic_) throw std::logic_error("periodic pseudo-orbit has unbounded length");
        return block_.size();
    }

    Point at(std::uint64_t i) const {
        if (!periodic_) {
            if (i >= block_.size()) throw std::out_of_range("pseudo-orbit index past end");
            return block_[i];
        }
        if (i < pre_.size()) return pre_[i];
        return block_[(i - pre_.size()) % block_.size()];
    }

private:
    std::vector<Point> pre_;
    std::vector<Point> block_;
    Dist delta_ = 0;
    bool periodic_ = false;
};

struct GapProfile {
    Dist max_gap = 0;
    std::vector<Dist> gaps;
};

inline GapProfile gap_profile(const MetricSystem& sys, std::span<const Point> seq) {
    if (seq.empty()) throw std::invalid_argument("gap_profile needs a non-empty sequence");
    GapProfile gp;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        const Dist g = sys.distance(sys.step(seq[i]), seq[i + 1]);
        gp.gaps.push_back(g);
        gp.max_gap = std::max(gp.max_gap, g);
    }
    return gp;
}

// Includes the seam into the block and the periodic wrap gap.
inline GapProfile gap_profile(const MetricSystem& sys, const PseudoOrbit& po) {
    std::vector<Point> seq(po.preblock());
    seq.insert(seq.end(), po.block().begin(), po.block().end());
    GapProfile gp = gap_profile(sys, seq);
    if (po.is_periodic()) {
        const Dist wrap = sys.distance(sys.step(po.block().back()), po.block().front());
        gp.gaps.push_back(wrap);
        gp.max_gap = std::max(gp.max_gap, wrap);
    }
    return gp;
}

inline bool is_valid_pseudo_orbit(const MetricSystem& sys, const PseudoOrbit& po) {
    return gap_profile(sys, po).max_gap < po.delta();
}

// Edges of the delta pseudo-orbit graph: x -> {y : d(f(x), y) < delta}.
inline std::vector<Point> pseudo_successors(const MetricSystem& sys, Dist delta, Point x) {
    return ball(sys, sys.step(x), delta);
}

}  // namespace pointdyn
