#pragma once

#include <cstdint>
#include <vector>

#include "dp4/error.hpp"

namespace dp4 {

// Dense F2 vectors as bit masks; all dimensions here are tiny (<= 64).

inline int f2Parity(uint64_t x) { return __builtin_parityll(x); }

// Row-reduced basis of the span of the given vectors.
inline std::vector<uint64_t> f2RowBasis(std::vector<uint64_t> rows, int ncols) {
    std::vector<uint64_t> basis;
    for (int c = 0; c < ncols; ++c) {
        uint64_t bit = 1ull << c;
        size_t pivot = basis.size();
        bool found = false;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (rows[r] & bit) {
                std::swap(rows[r], rows.back());
                uint64_t pv = rows.back();
                rows.pop_back();
                for (auto& x : rows)
                    if (x & bit) x ^= pv;
                for (auto& x : basis)
                    if (x & bit) x ^= pv;
                basis.insert(basis.begin() + pivot, pv);
                found = true;
                break;
            }
        }
        (void)found;
    }
    return basis;
}

inline bool f2InSpan(const std::vector<uint64_t>& vecs, uint64_t v, int ncols) {
    std::vector<uint64_t> basis = f2RowBasis(vecs, ncols);
    for (int c = 0; c < ncols; ++c) {
        uint64_t bit = 1ull << c;
        if (!(v & bit)) continue;
        bool hit = false;
        for (uint64_t b : basis) {
            if ((b & bit) && (b & (bit - 1)) == 0) {  // b has leading bit c
                v ^= b;
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return v == 0;
}

// Kernel of the matrix whose rows are given: all x with <row, x> = 0 for
// every row. Equivalently the orthogonal complement of the row span.
inline std::vector<uint64_t> f2Kernel(const std::vector<uint64_t>& rows, int ncols) {
    std::vector<uint64_t> work = rows;
    std::vector<int> pivotCol;
    size_t rank = 0;
    for (int c = 0; c < ncols && rank < work.size(); ++c) {
        uint64_t bit = 1ull << c;
        size_t sel = rank;
        while (sel < work.size() && !(work[sel] & bit)) ++sel;
        if (sel == work.size()) continue;
        std::swap(work[rank], work[sel]);
        for (size_t r = 0; r < work.size(); ++r)
            if (r != rank && (work[r] & bit)) work[r] ^= work[rank];
        pivotCol.push_back(c);
        ++rank;
    }
    std::vector<bool> isPivot(ncols, false);
    for (int c : pivotCol) isPivot[c] = true;
    std::vector<uint64_t> kernel;
    for (int c = 0; c < ncols; ++c) {
        if (isPivot[c]) continue;
        uint64_t v = 1ull << c;
        for (size_t r = 0; r < rank; ++r)
            if (work[r] & (1ull << c)) v |= 1ull << pivotCol[r];
        kernel.push_back(v);
    }
    return kernel;
}

// Orthogonal complement of a set of vectors (same thing as f2Kernel, named
// for call sites that think of characters).
inline std::vector<uint64_t> f2Complement(const std::vector<uint64_t>& vecs, int ncols) {
    return f2Kernel(vecs, ncols);
}

// Enumerate the full span of a basis (2^rank elements, basis must be small).
inline std::vector<uint64_t> f2Span(const std::vector<uint64_t>& basis) {
    require(basis.size() <= 20, Errc::GroupTooLarge, "span enumeration too large");
    std::vector<uint64_t> out(1, 0);
    for (uint64_t b : basis) {
        size_t n = out.size();
        for (size_t k = 0; k < n; ++k) out.push_back(out[k] ^ b);
    }
    return out;
}

}  // namespace dp4
