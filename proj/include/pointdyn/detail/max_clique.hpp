#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pointdyn::detail {

// Adjacency rows as packed words; m vertices, row-major m x ceil(m/64).
class AdjMatrix {
public:
    explicit AdjMatrix(std::uint32_t m)
        : m_(m), stride_((m + 63) / 64), rows_(static_cast<std::size_t>(m) * stride_, 0) {}

    std::uint32_t size() const { return m_; }
    std::uint32_t stride() const { return stride_; }

    void add_edge(std::uint32_t a, std::uint32_t b) {
        rows_[static_cast<std::size_t>(a) * stride_ + (b >> 6)] |= std::uint64_t{1} << (b & 63);
        rows_[static_cast<std::size_t>(b) * stride_ + (a >> 6)] |= std::uint64_t{1} << (a & 63);
    }
    bool edge(std::uint32_t a, std::uint32_t b) const {
        return (rows_[static_cast<std::size_t>(a) * stride_ + (b >> 6)] >> (b & 63)) & 1;
    }
    const std::uint64_t* row(std::uint32_t a) const { return rows_.data() + static_cast<std::size_t>(a) * stride_; }

    std::uint32_t degree(std::uint32_t a) const {
        std::uint32_t d = 0;
        const std::uint64_t* r = row(a);
        for (std::uint32_t w = 0; w < stride_; ++w) d += static_cast<std::uint32_t>(__builtin_popcountll(r[w]));
        return d;
    }

private:
    std::uint32_t m_, stride_;
    std::vector<std::uint64_t> rows_;
};

// Deterministic maximal clique: repeatedly add the highest-degree vertex
// compatible with the current clique (ties broken by index).
inline std::vector<std::uint32_t> greedy_clique(const AdjMatrix& g) {
    const std::uint32_t m = g.size();
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint32_t> deg(m);
    for (std::uint32_t v = 0; v < m; ++v) deg[v] = g.degree(v);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return deg[a] > deg[b]; });
    std::vector<std::uint32_t> clique;
    for (std::uint32_t v : order) {
        bool ok = true;
        for (std::uint32_t c : clique)
            if (!g.edge(v, c)) {
                ok = false;
                break;
            }
        if (ok) clique.push_back(v);
    }
    std::sort(clique.begin(), clique.end());
    return clique;
}

// Branch and bound with a greedy-coloring bound (Tomita style).
class MaxCliqueSolver {
public:
    static constexpr std::uint32_t kMaxVertices = 512;

    explicit MaxCliqueSolver(const AdjMatrix& g) : g_(g), stride_(g.stride()) {
        if (g.size() > kMaxVertices)
            throw std::runtime_error("exact max clique guarded to 512 vertices");
    }

    std::vector<std::uint32_t> solve() {
        best_ = greedy_clique(g_);
        std::vector<std::uint64_t> cand(stride_, 0);
        for (std::uint32_t v = 0; v < g_.size(); ++v) cand[v >> 6] |= std::uint64_t{1} << (v & 63);
        std::vector<std::uint32_t> cur;
        expand(cand, cur);
        std::sort(best_.begin(), best_.end());
        return best_;
    }

private:
    void expand(const std::vector<std::uint64_t>& cand, std::vector<std::uint32_t>& cur) {
        std::vector<std::uint32_t> verts;
        for (std::uint32_t w = 0; w < stride_; ++w) {
            std::uint64_t x = cand[w];
            while (x) {
                verts.push_back(w * 64 + static_cast<std::uint32_t>(__builtin_ctzll(x)));
                x &= x - 1;
            }
        }
        if (verts.empty()) {
            if (cur.size() > best_.size()) best_ = cur;
            return;
        }
        // greedy sequential coloring; color numbers bound the clique extension
        std::vector<std::uint32_t> color(verts.size(), 0);
        std::vector<std::vector<std::uint64_t>> classes;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            const std::uint32_t v = verts[i];
            std::uint32_t c = 0;
            for (;; ++c) {
                if (c == classes.size()) {
                    classes.emplace_back(stride_, 0);
                    break;
                }
                const std::uint64_t* row = g_.row(v);
                bool clash = false;
                for (std::uint32_t w = 0; w < stride_; ++w)
                    if (classes[c][w] & row[w]) {
                        clash = true;
                        break;
                    }
                if (!clash) break;
            }
            classes[c][v >> 6] |= std::uint64_t{1} << (v & 63);
            color[i] = c + 1;
        }
        std::vector<std::size_t> idx(verts.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return color[a] < color[b]; });

        std::vector<std::uint64_t> local = cand;
        for (std::size_t k = idx.size(); k-- > 0;) {
            const std::size_t i = idx[k];
            const std::uint32_t v = verts[i];
            if (cur.size() + color[i] <= best_.size()) return;
            cur.push_back(v);
            std::vector<std::uint64_t> next(stride_);
            const std::uint64_t* row = g_.row(v);
            for (std::uint32_t w = 0; w < stride_; ++w) next[w] = local[w] & row[w];
            expand(next, cur);
            cur.pop_back();
            local[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
        }
    }

    const AdjMatrix& g_;
    std::uint32_t stride_;
    std::vector<std::uint32_t> best_;
};

}  // namespace pointdyn::detail
