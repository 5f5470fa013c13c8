#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

#include "dp4/error.hpp"

namespace dp4 {

using ZVec = std::vector<mpz_class>;
using ZMat = std::vector<ZVec>;  // row major

inline ZMat zIdentity(size_t n) {
    ZMat I(n, ZVec(n, 0));
    for (size_t k = 0; k < n; ++k) I[k][k] = 1;
    return I;
}

inline ZMat zTranspose(const ZMat& A) {
    if (A.empty()) return {};
    ZMat T(A[0].size(), ZVec(A.size()));
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < A[0].size(); ++j) T[j][i] = A[i][j];
    return T;
}

inline ZMat zMul(const ZMat& A, const ZMat& B) {
    require(A.empty() || B.empty() || A[0].size() == B.size(), Errc::Internal, "zMul shapes");
    if (A.empty() || B.empty()) return {};
    ZMat C(A.size(), ZVec(B[0].size(), 0));
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t k = 0; k < B.size(); ++k) {
            if (A[i][k] == 0) continue;
            for (size_t j = 0; j < B[0].size(); ++j) C[i][j] += A[i][k] * B[k][j];
        }
    return C;
}

inline ZVec zMulVec(const ZMat& A, const ZVec& x) {
    ZVec y(A.size(), 0);
    for (size_t i = 0; i < A.size(); ++i) {
        require(A[i].size() == x.size(), Errc::Internal, "zMulVec shapes");
        for (size_t j = 0; j < x.size(); ++j) y[i] += A[i][j] * x[j];
    }
    return y;
}

inline bool zIsZero(const ZVec& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

// Integer row echelon form by unimodular row operations (a row-style Hermite
// reduction). On return A is in echelon form; if U is given it accumulates
// the operations so that U_out * A_in = A_out.
inline void hermiteRows(ZMat& A, ZMat* U = nullptr) {
    if (A.empty()) {
        if (U) U->clear();
        return;
    }
    if (U) *U = zIdentity(A.size());
    size_t rows = A.size(), cols = A[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        // gcd the column below r into one row
        while (true) {
            size_t best = rows;
            for (size_t i = r; i < rows; ++i) {
                if (A[i][c] == 0) continue;
                if (best == rows || cmp(abs(A[i][c]), abs(A[best][c])) < 0) best = i;
            }
            if (best == rows) break;
            std::swap(A[r], A[best]);
            if (U) std::swap((*U)[r], (*U)[best]);
            bool clean = true;
            for (size_t i = r + 1; i < rows; ++i) {
                if (A[i][c] == 0) continue;
                mpz_class q = A[i][c] / A[r][c];  // truncated division is fine here
                if (q != 0) {
                    for (size_t j = 0; j < cols; ++j) A[i][j] -= q * A[r][j];
                    if (U)
                        for (size_t j = 0; j < (*U)[i].size(); ++j)
                            (*U)[i][j] -= q * (*U)[r][j];
                }
                if (A[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (A[r][c] == 0) continue;
        if (A[r][c] < 0) {
            for (size_t j = 0; j < cols; ++j) A[r][j] = -A[r][j];
            if (U)
                for (auto& x : (*U)[r]) x = -x;
        }
        // reduce the rows above to keep entries small
        for (size_t i = 0; i < r; ++i) {
            if (A[i][c] == 0) continue;
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), A[i][c].get_mpz_t(), A[r][c].get_mpz_t());
            if (q != 0) {
                for (size_t j = 0; j < cols; ++j) A[i][j] -= q * A[r][j];
                if (U)
                    for (size_t j = 0; j < (*U)[i].size(); ++j) (*U)[i][j] -= q * (*U)[r][j];
            }
        }
        ++r;
    }
}

// Basis of the right kernel {x : A x = 0} as a saturated lattice.
inline ZMat zKernel(const ZMat& A) {
    if (A.empty()) return {};
    size_t n = A[0].size();
    ZMat B = zTranspose(A);  // n x m
    ZMat U = zIdentity(n);
    hermiteRows(B, &U);
    ZMat out;
    for (size_t i = 0; i < n; ++i)
        if (zIsZero(B[i])) out.push_back(U[i]);
    return out;
}

// Solves A x = b over the integers. Returns false when no integral solution
// exists.
inline bool zSolve(const ZMat& A, const ZVec& b, ZVec* x = nullptr) {
    if (A.empty()) return zIsZero(b);
    size_t m = A.size(), n = A[0].size();
    require(b.size() == m, Errc::Internal, "zSolve shapes");
    ZMat B = zTranspose(A);  // rows generate the column lattice of A
    ZMat U = zIdentity(n);
    hermiteRows(B, &U);
    ZVec rem = b, y(n, 0);
    for (size_t i = 0; i < n; ++i) {
        size_t c = 0;
        while (c < m && B[i][c] == 0) ++c;
        if (c == m) continue;
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rem[c].get_mpz_t(), B[i][c].get_mpz_t());
        if (r != 0) {
            // pivot does not divide: no solution through this echelon
            // (entries left of the pivot are zero, so this is exact)
        }
        y[i] = q;
        for (size_t j = 0; j < m; ++j) rem[j] -= q * B[i][j];
    }
    if (!zIsZero(rem)) return false;
    if (x) {
        ZVec sol(n, 0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) sol[j] += y[i] * U[i][j];
        *x = sol;
    }
    return true;
}

// Smith normal form invariants with an optional accumulated inverse column
// transform: D = U A V, and rows of Vinv express the new coordinates in the
// old basis (Vinv = V^{-1}).
inline ZVec smithInvariants(ZMat A, ZMat* Vinv = nullptr) {
    if (A.empty() || A[0].empty()) return {};
    size_t m = A.size(), n = A[0].size();
    if (Vinv) *Vinv = zIdentity(n);
    auto colOpAdd = [&](size_t dst, size_t src, const mpz_class& q) {
        // col dst -= q * col src; Vinv: row src += q * row dst
        for (size_t i = 0; i < m; ++i) A[i][dst] -= q * A[i][src];
        if (Vinv)
            for (size_t j = 0; j < n; ++j) (*Vinv)[src][j] += q * (*Vinv)[dst][j];
    };
    auto colSwap = [&](size_t i, size_t j) {
        for (size_t r = 0; r < m; ++r) std::swap(A[r][i], A[r][j]);
        if (Vinv) std::swap((*Vinv)[i], (*Vinv)[j]);
    };
    auto colNeg = [&](size_t i) {
        for (size_t r = 0; r < m; ++r) A[r][i] = -A[r][i];
        if (Vinv)
            for (auto& x : (*Vinv)[i]) x = -x;
    };

    size_t t = 0;
    ZVec diag;
    while (t < m && t < n) {
        // find a nonzero pivot of minimal absolute value
        size_t pi = m, pj = n;
        for (size_t i = t; i < m; ++i)
            for (size_t j = t; j < n; ++j) {
                if (A[i][j] == 0) continue;
                if (pi == m || cmp(abs(A[i][j]), abs(A[pi][pj])) < 0) {
                    pi = i;
                    pj = j;
                }
            }
        if (pi == m) break;
        std::swap(A[t], A[pi]);
        colSwap(t, pj);
        while (true) {
            bool again = false;
            for (size_t i = t + 1; i < m; ++i) {
                if (A[i][t] == 0) continue;
                mpz_class q = A[i][t] / A[t][t];
                for (size_t j = 0; j < n; ++j) A[i][j] -= q * A[t][j];
                if (A[i][t] != 0) {
                    std::swap(A[t], A[i]);
                    again = true;
                }
            }
            for (size_t j = t + 1; j < n; ++j) {
                if (A[t][j] == 0) continue;
                mpz_class q = A[t][j] / A[t][t];
                colOpAdd(j, t, q);
                if (A[t][j] != 0) {
                    colSwap(t, j);
                    again = true;
                }
            }
            if (!again) break;
        }
        // force divisibility of the remaining block by the pivot
        bool redo = false;
        for (size_t i = t + 1; i < m && !redo; ++i)
            for (size_t j = t + 1; j < n && !redo; ++j) {
                if (A[i][j] % A[t][t] != 0) {
                    for (size_t jj = 0; jj < n; ++jj) A[t][jj] += A[i][jj];
                    redo = true;
                }
            }
        if (redo) continue;
        if (A[t][t] < 0) colNeg(t);
        diag.push_back(A[t][t]);
        ++t;
    }
    return diag;
}

// Finite quotient L1 / L2 of two sublattices of Z^n given by basis rows,
// with L2 a finite-index sublattice of L1. Returns the invariant factors
// greater than one together with matching generators expressed in Z^n.
struct FiniteQuotient {
    ZVec invariants;      // d_1 | d_2 | ..., all > 1
    ZMat generators;      // one row per invariant, in ambient coordinates
};

inline FiniteQuotient latticeQuotient(const ZMat& superRows, const ZMat& subRows) {
    FiniteQuotient out;
    if (superRows.empty()) {
        require(subRows.empty() || subRows[0].empty() ||
                    [&] {
                        for (const auto& r : subRows)
                            if (!zIsZero(r)) return false;
                        return true;
                    }(),
                Errc::Internal, "sub lattice exceeds super lattice");
        return out;
    }
    size_t k = superRows.size();
    ZMat St = zTranspose(superRows);  // n x k
    ZMat M;                           // coefficients of sub basis in super basis
    for (const auto& t : subRows) {
        ZVec c;
        bool ok = zSolve(St, t, &c);
        require(ok, Errc::Internal, "sub lattice not contained in super lattice");
        M.push_back(c);
    }
    ZMat Vinv;
    ZVec d = smithInvariants(M, &Vinv);
    require(d.size() == k, Errc::Internal, "quotient is infinite");
    for (size_t i = 0; i < k; ++i) {
        if (d[i] == 1) continue;
        // generator i in super coordinates is row i of Vinv
        ZVec g(superRows[0].size(), 0);
        for (size_t j = 0; j < k; ++j)
            for (size_t c = 0; c < g.size(); ++c) g[c] += Vinv[i][j] * superRows[j][c];
        out.invariants.push_back(d[i]);
        out.generators.push_back(g);
    }
    return out;
}

}  // namespace dp4
