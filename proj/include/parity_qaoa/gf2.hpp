#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

namespace parity_qaoa::gf2 {

/// Dense bit-packed vector over GF(2).
class BitVector {
   public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : words_((size + 63) / 64, 0), size_(size) {
    }

    static BitVector from_indices(std::size_t size, const std::vector<int> &indices) {
        BitVector v(size);
        for (int i : indices) {
            v.flip(static_cast<std::size_t>(i));
        }
        return v;
    }

    std::size_t size() const {
        return size_;
    }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    void set(std::size_t i, bool value = true) {
        uint64_t m = uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= m;
        } else {
            words_[i >> 6] &= ~m;
        }
    }
    void flip(std::size_t i) {
        words_[i >> 6] ^= uint64_t{1} << (i & 63);
    }

    BitVector &operator^=(const BitVector &other) {
        for (std::size_t w = 0; w < words_.size(); w++) {
            words_[w] ^= other.words_[w];
        }
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector &b) {
        a ^= b;
        return a;
    }
    bool operator==(const BitVector &other) const = default;

    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](uint64_t w) { return w != 0; });
    }
    std::size_t popcount() const {
        std::size_t n = 0;
        for (uint64_t w : words_) {
            n += static_cast<std::size_t>(std::popcount(w));
        }
        return n;
    }
    /// Parity of |this AND other|.
    bool dot(const BitVector &other) const {
        uint64_t acc = 0;
        for (std::size_t w = 0; w < words_.size(); w++) {
            acc ^= words_[w] & other.words_[w];
        }
        return std::popcount(acc) & 1;
    }
    /// Index of the lowest set bit, or size() when zero.
    std::size_t lowest() const {
        for (std::size_t w = 0; w < words_.size(); w++) {
            if (words_[w]) {
                return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
            }
        }
        return size_;
    }
    std::vector<int> indices() const {
        std::vector<int> out;
        for (std::size_t w = 0; w < words_.size(); w++) {
            uint64_t v = words_[w];
            while (v) {
                out.push_back(static_cast<int>(w * 64 + static_cast<std::size_t>(std::countr_zero(v))));
                v &= v - 1;
            }
        }
        return out;
    }
    /// Low 64 bits; only meaningful for size() <= 64.
    uint64_t to_u64() const {
        return words_.empty() ? 0 : words_[0];
    }

   private:
    std::vector<uint64_t> words_;
    std::size_t size_ = 0;
};

/// Reduced row echelon form in place. Pivots are chosen at the lowest available
/// column; returns the pivot column of each nonzero row, in row order.
inline std::vector<std::size_t> row_reduce(std::vector<BitVector> &rows, std::size_t ncols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < rows.size(); c++) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].test(c)) {
            p++;
        }
        if (p == rows.size()) {
            continue;
        }
        std::swap(rows[r], rows[p]);
        for (std::size_t i = 0; i < rows.size(); i++) {
            if (i != r && rows[i].test(c)) {
                rows[i] ^= rows[r];
            }
        }
        pivots.push_back(c);
        r++;
    }
    rows.resize(r);
    return pivots;
}

inline std::size_t rank(std::vector<BitVector> rows) {
    if (rows.empty()) {
        return 0;
    }
    return row_reduce(rows, rows.front().size()).size();
}

/// Basis of {x : row . x = 0 for every row}, one vector per free column in ascending order.
inline std::vector<BitVector> kernel_basis(std::vector<BitVector> rows, std::size_t ncols) {
    auto pivots = row_reduce(rows, ncols);
    std::vector<bool> is_pivot(ncols, false);
    for (auto p : pivots) {
        is_pivot[p] = true;
    }
    std::vector<BitVector> basis;
    for (std::size_t f = 0; f < ncols; f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitVector v(ncols);
        v.set(f);
        for (std::size_t i = 0; i < pivots.size(); i++) {
            if (rows[i].test(f)) {
                v.set(pivots[i]);
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Incrementally built basis for span/independence queries.
class EchelonBasis {
   public:
    explicit EchelonBasis(std::size_t ncols) : ncols_(ncols) {
    }

    BitVector reduce(BitVector v) const {
        while (true) {
            std::size_t p = v.lowest();
            if (p == ncols_) {
                return v;
            }
            auto it = by_pivot_.find(p);
            if (it == by_pivot_.end()) {
                return v;
            }
            v ^= it->second;
        }
    }
    bool contains(const BitVector &v) const {
        return !reduce(v).any();
    }
    /// Adds v if independent of the current span; returns whether it was added.
    bool insert(const BitVector &v) {
        BitVector r = reduce(v);
        if (!r.any()) {
            return false;
        }
        by_pivot_.emplace(r.lowest(), std::move(r));
        return true;
    }
    std::size_t dimension() const {
        return by_pivot_.size();
    }

   private:
    std::size_t ncols_;
    std::map<std::size_t, BitVector> by_pivot_;
};

}  // namespace parity_qaoa::gf2
