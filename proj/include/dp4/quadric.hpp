#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "dp4/field.hpp"

namespace dp4 {

// Polynomials whose coefficients live in the parameter field: the x0..x4
// coordinates of P^4, or the lambda/mu coordinates of the pencil line.
using XPoly = Polynomial<FieldElement>;

inline std::vector<std::string> ambientNames() { return {"x0", "x1", "x2", "x3", "x4"}; }
inline std::vector<std::string> pencilNames() { return {"lambda", "mu"}; }

inline XPoly xvar(const FieldPtr& F, int i, int nvars = 5) {
    return XPoly::variable(i, FieldElement::one(F), nvars);
}

struct LinearForm {
    FieldPtr F;
    std::vector<FieldElement> c;  // one coefficient per ambient variable

    LinearForm(FieldPtr field, std::vector<FieldElement> coeffs)
        : F(std::move(field)), c(std::move(coeffs)) {
        require(c.size() == 5, Errc::ValidationError, "linear form needs 5 coefficients");
    }

    bool isZero() const {
        for (const auto& x : c)
            if (!x.isZero()) return false;
        return true;
    }

    XPoly toPoly() const {
        XPoly p(5);
        for (int i = 0; i < 5; ++i)
            if (!c[i].isZero()) p = p + xvar(F, i).scaled(c[i]);
        return p;
    }

    FieldElement evaluate(const std::vector<FieldElement>& P) const {
        require(P.size() == 5, Errc::ValidationError, "point needs 5 coordinates");
        FieldElement acc = FieldElement::zero(F);
        for (int i = 0; i < 5; ++i) acc = acc + c[i] * P[i];
        return acc;
    }

    std::string str() const { return toPoly().str(ambientNames()); }
};

// Scale a projective point so its first nonzero coordinate is 1.
inline std::vector<FieldElement> normalizeProjective(std::vector<FieldElement> P) {
    for (const auto& x : P) {
        if (x.isZero()) continue;
        FieldElement inv = x.inverse();
        for (auto& y : P) y = y * inv;
        return P;
    }
    fail(Errc::ValidationError, "projective point has no nonzero coordinate");
}

// Symmetric matrix of a quadratic form in the Hessian convention: the (i,i)
// entry is twice the x_i^2 coefficient, the (i,j) entry is the x_i x_j
// coefficient. Q(x) = x^T M x / 2, so integral forms keep integral matrices.
class QuadricMatrix {
public:
    QuadricMatrix(FieldPtr F, std::vector<std::vector<FieldElement>> entries)
        : F_(std::move(F)), m_(std::move(entries)) {
        require(m_.size() == 5, Errc::ValidationError, "quadric matrix must be 5x5");
        for (const auto& row : m_)
            require(row.size() == 5, Errc::ValidationError, "quadric matrix must be 5x5");
        bool allZero = true;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                require(m_[i][j] == m_[j][i], Errc::ValidationError, "quadric matrix not symmetric");
                if (!m_[i][j].isZero()) allZero = false;
            }
        require(!allZero, Errc::ValidationError, "quadric matrix is zero");
    }

    static QuadricMatrix fromForm(const XPoly& q) {
        require(!q.isZero(), Errc::ZeroForm, "zero quadratic form");
        require(q.nvars() == 5, Errc::ValidationError, "quadratic form needs variables x0..x4");
        const FieldPtr& F = q.leadingCoeff().field();
        std::vector<std::vector<FieldElement>> m(5, std::vector<FieldElement>(5, FieldElement::zero(F)));
        for (const auto& [e, coeff] : q.terms()) {
            int vi = -1, vj = -1;
            unsigned total = 0;
            for (int k = 0; k < 5; ++k) {
                total += e[k];
                if (e[k] == 1) (vi < 0 ? vi : vj) = k;
                if (e[k] == 2) vi = vj = k;
            }
            require(total == 2, Errc::ValidationError, "form is not homogeneous quadratic");
            if (vi == vj) {
                m[vi][vi] = m[vi][vi] + coeff + coeff;
            } else {
                m[vi][vj] = m[vi][vj] + coeff;
                m[vj][vi] = m[vj][vi] + coeff;
            }
        }
        return QuadricMatrix(F, std::move(m));
    }

    const FieldPtr& field() const { return F_; }
    const FieldElement& at(int i, int j) const { return m_[i][j]; }

    XPoly form() const {
        FieldElement half = FieldElement::fromConstant(F_, Constant(mpq_class(1, 2)));
        XPoly q(5);
        for (int i = 0; i < 5; ++i)
            for (int j = i; j < 5; ++j) {
                FieldElement coeff = (i == j) ? m_[i][i] * half : m_[i][j];
                if (coeff.isZero()) continue;
                Expo e(5, 0);
                e[i] += 1;
                e[j] += 1;
                q = q + XPoly::monomialTerm(e, coeff, 5);
            }
        return q;
    }

    std::vector<FieldElement> mulVec(const std::vector<FieldElement>& P) const {
        require(P.size() == 5, Errc::ValidationError, "point needs 5 coordinates");
        std::vector<FieldElement> out(5, FieldElement::zero(F_));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) out[i] = out[i] + m_[i][j] * P[j];
        return out;
    }

    FieldElement evalPoint(const std::vector<FieldElement>& P) const {
        auto g = mulVec(P);
        FieldElement acc = FieldElement::zero(F_);
        for (int i = 0; i < 5; ++i) acc = acc + P[i] * g[i];
        return acc;
    }

    int rank() const {
        std::vector<std::vector<FieldElement>> a = m_;
        int rk = 0;
        for (int col = 0; col < 5 && rk < 5; ++col) {
            int pivot = -1;
            for (int i = rk; i < 5; ++i)
                if (!a[i][col].isZero()) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) continue;
            std::swap(a[rk], a[pivot]);
            FieldElement inv = a[rk][col].inverse();
            for (int i = rk + 1; i < 5; ++i) {
                if (a[i][col].isZero()) continue;
                FieldElement f = a[i][col] * inv;
                for (int j = col; j < 5; ++j) a[i][j] = a[i][j] - f * a[rk][j];
            }
            ++rk;
        }
        return rk;
    }

    // Kernel direction of a rank-4 matrix, normalized projectively.
    std::vector<FieldElement> kernelDirection() const {
        require(rank() == 4, Errc::WrongRank, "kernel direction needs rank exactly 4");
        std::vector<std::vector<FieldElement>> a = m_;
        std::vector<int> pivotCol;
        int rk = 0;
        for (int col = 0; col < 5 && rk < 5; ++col) {
            int pivot = -1;
            for (int i = rk; i < 5; ++i)
                if (!a[i][col].isZero()) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) continue;
            std::swap(a[rk], a[pivot]);
            FieldElement inv = a[rk][col].inverse();
            for (int j = col; j < 5; ++j) a[rk][j] = a[rk][j] * inv;
            for (int i = 0; i < 5; ++i) {
                if (i == rk || a[i][col].isZero()) continue;
                FieldElement f = a[i][col];
                for (int j = col; j < 5; ++j) a[i][j] = a[i][j] - f * a[rk][j];
            }
            pivotCol.push_back(col);
            ++rk;
        }
        int freeCol = -1;
        for (int col = 0; col < 5; ++col) {
            bool isPivot = false;
            for (int p : pivotCol) isPivot |= (p == col);
            if (!isPivot) {
                freeCol = col;
                break;
            }
        }
        require(freeCol >= 0, Errc::Internal, "rank-4 matrix without free column");
        std::vector<FieldElement> v(5, FieldElement::zero(F_));
        v[freeCol] = FieldElement::one(F_);
        for (int r = 0; r < static_cast<int>(pivotCol.size()); ++r)
            v[pivotCol[r]] = -a[r][freeCol];
        return normalizeProjective(std::move(v));
    }

    // Entry-wise lift into an extension of the coefficient field.
    QuadricMatrix lifted(const FieldPtr& ext) const {
        if (ext->sameAs(*F_)) return *this;
        std::vector<std::vector<FieldElement>> m(5, std::vector<FieldElement>(5, FieldElement::zero(ext)));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) m[i][j] = FieldElement::lift(ext, m_[i][j]);
        return QuadricMatrix(ext, std::move(m));
    }

    static QuadricMatrix combine(const FieldElement& l, const QuadricMatrix& A,
                                 const FieldElement& m, const QuadricMatrix& B) {
        require(A.F_->sameAs(*B.F_) && l.field()->sameAs(*A.F_) && m.field()->sameAs(*A.F_),
                Errc::DomainMismatch, "pencil combination over mismatched fields");
        std::vector<std::vector<FieldElement>> e(5, std::vector<FieldElement>(5, FieldElement::zero(A.F_)));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) e[i][j] = l * A.m_[i][j] + m * B.m_[i][j];
        return QuadricMatrix(A.F_, std::move(e));
    }

private:
    FieldPtr F_;
    std::vector<std::vector<FieldElement>> m_;
};

namespace detail {

inline XPoly detRecursive(const std::vector<std::vector<XPoly>>& a, std::vector<int> cols) {
    size_t row = a.size() - cols.size();
    if (cols.size() == 1) return a[row][cols[0]];
    XPoly acc(a[0][0].nvars());
    for (size_t k = 0; k < cols.size(); ++k) {
        if (a[row][cols[k]].isZero()) continue;
        std::vector<int> rest;
        for (size_t j = 0; j < cols.size(); ++j)
            if (j != k) rest.push_back(cols[j]);
        XPoly minor = a[row][cols[k]] * detRecursive(a, rest);
        acc = (k % 2 == 0) ? acc + minor : acc - minor;
    }
    return acc;
}

}  // namespace detail

// Binary quintic det(lambda A + mu A'), a polynomial in (lambda, mu).
using BinaryForm = XPoly;

inline BinaryForm charForm(const QuadricMatrix& A, const QuadricMatrix& B) {
    require(A.field()->sameAs(*B.field()), Errc::DomainMismatch, "charForm over mismatched fields");
    const FieldPtr& F = A.field();
    std::vector<std::vector<XPoly>> entries(5, std::vector<XPoly>(5, XPoly(2)));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            XPoly e(2);
            if (!A.at(i, j).isZero()) e = e + xvar(F, 0, 2).scaled(A.at(i, j));
            if (!B.at(i, j).isZero()) e = e + xvar(F, 1, 2).scaled(B.at(i, j));
            entries[i][j] = e;
        }
    return detail::detRecursive(entries, {0, 1, 2, 3, 4});
}

// A homogeneous binary form is squarefree iff it shares no factor with both
// partial derivatives (char 0; the Euler relation covers the mu-power case).
inline bool isSmoothPencil(const BinaryForm& f) {
    require(!f.isZero(), Errc::ZeroForm, "smoothness of the zero form");
    auto g = polyGcd(f, f.derivative(0));
    g = polyGcd(g, f.derivative(1));
    return g.isConstant();
}

}  // namespace dp4
