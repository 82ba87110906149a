#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

namespace pointdyn::detail {

// Fixed-size bit set over point indices. std::vector<bool> is too slow for
// the per-step set algebra the tracking searches do, and we need hashing.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::uint32_t bits)
        : bits_(bits), words_((bits + 63) / 64, 0) {}

    std::uint32_t size() const { return bits_; }

    void set(std::uint32_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::uint32_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool test(std::uint32_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    bool any() const {
        for (auto w : words_) if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    std::uint32_t count() const {
        std::uint32_t c = 0;
        for (auto w : words_) c += static_cast<std::uint32_t>(__builtin_popcountll(w));
        return c;
    }

    Bitset& operator&=(const Bitset& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }

    bool intersects(const Bitset& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    bool operator==(const Bitset& o) const {
        return bits_ == o.bits_ && words_ == o.words_;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                std::uint32_t b = static_cast<std::uint32_t>(__builtin_ctzll(w));
                fn(static_cast<std::uint32_t>(wi * 64 + b));
                w &= w - 1;
            }
        }
    }

    std::size_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto w : words_) {
            h ^= w;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h ^ bits_);
    }

private:
    std::uint32_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace pointdyn::detail
