#pragma once

#include <cstdint>
#include <vector>

#include "dp4/picard.hpp"

namespace dp4 {

// Finite matrix group acting on a lattice, with its multiplication table;
// element 0 is the identity.
struct GroupAction {
    int rank = 0;
    std::vector<ZMat> mats;
    std::vector<std::vector<int>> mul;  // mul[i][j] = index of g_i g_j
    size_t size() const { return mats.size(); }
};

inline GroupAction groupAction(const GaloisImage& G) {
    require(!G.elements.empty() && G.elements[0].isIdentity(), Errc::ValidationError,
            "element list must start with the identity");
    GroupAction A;
    A.rank = 6;
    for (const auto& g : G.elements) A.mats.push_back(actionMatrix(g));
    size_t n = G.elements.size();
    A.mul.assign(n, std::vector<int>(n, -1));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            int idx = G.indexOf(G.elements[i] * G.elements[j]);
            require(idx >= 0, Errc::ValidationError, "image is not closed under composition");
            A.mul[i][j] = idx;
        }
    return A;
}

// Cyclic group generated by one matrix of finite order.
inline GroupAction cyclicAction(const ZMat& sigma, size_t maxOrder = 64) {
    require(!sigma.empty() && sigma.size() == sigma[0].size(), Errc::ValidationError,
            "action matrix must be square");
    size_t r = sigma.size();
    GroupAction A;
    A.rank = static_cast<int>(r);
    A.mats.push_back(zIdentity(r));
    ZMat p = sigma;
    while (!(p == zIdentity(r))) {
        A.mats.push_back(p);
        require(A.mats.size() <= maxOrder, Errc::NotFiniteOrder,
                "matrix order exceeds the bound");
        p = zMul(p, sigma);
    }
    size_t n = A.mats.size();
    A.mul.assign(n, std::vector<int>(n, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) A.mul[i][j] = static_cast<int>((i + j) % n);
    return A;
}

// One-cocycle, stored as one lattice vector per group element in element-list
// order; values[0] belongs to the identity and must vanish.
struct Cocycle {
    std::vector<ZVec> values;

    PicVector pic(size_t i) const { return PicVector::fromZVec(values.at(i)); }
};

namespace detail {

inline ZVec zAddV(const ZVec& x, const ZVec& y) {
    ZVec z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
}

inline ZVec zSubV(const ZVec& x, const ZVec& y) {
    ZVec z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
    return z;
}

}  // namespace detail

// Exhaustive check of alpha(gh) = alpha(g) + g alpha(h).
inline void requireCocycle(const GroupAction& A, const Cocycle& a, Errc code = Errc::Internal) {
    size_t n = A.size();
    require(a.values.size() == n, Errc::ValidationError, "cocycle arity mismatch");
    require(zIsZero(a.values[0]), code, "cocycle does not vanish at the identity");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            ZVec rhs = detail::zAddV(a.values[i], zMulVec(A.mats[i], a.values[j]));
            require(a.values[static_cast<size_t>(A.mul[i][j])] == rhs, code,
                    "cocycle condition violated");
        }
}

inline Cocycle coboundary(const GroupAction& A, const ZVec& m) {
    require(m.size() == static_cast<size_t>(A.rank), Errc::ValidationError, "coboundary arity");
    Cocycle c;
    for (const auto& M : A.mats) c.values.push_back(detail::zSubV(zMulVec(M, m), m));
    return c;
}

// Solvability of (g - 1) m = alpha(g) for a single m, over the integers.
inline bool isCoboundary(const GroupAction& A, const Cocycle& a) {
    size_t n = A.size(), r = static_cast<size_t>(A.rank);
    require(a.values.size() == n, Errc::ValidationError, "cocycle arity mismatch");
    ZMat S;
    ZVec b;
    for (size_t g = 0; g < n; ++g) {
        for (size_t k = 0; k < r; ++k) {
            ZVec row(r);
            for (size_t c = 0; c < r; ++c) row[c] = A.mats[g][k][c] - (k == c ? 1 : 0);
            S.push_back(std::move(row));
            b.push_back(a.values[g][k]);
        }
    }
    return zSolve(S, b);
}

struct CohomologyGroup {
    ZVec invariantFactors;            // divisibility chain, every factor > 1
    std::vector<Cocycle> generators;  // aligned with invariantFactors

    mpz_class order() const {
        mpz_class o = 1;
        for (const auto& d : invariantFactors) o *= d;
        return o;
    }
};

// 2-torsion of H^1 via the connecting map of 0 -> M -> M -> M/2 -> 0: each
// generator D of (M/2)^G / im(M^G) lifts to d and maps to sigma -> (d -
// sigma d)/2.
inline CohomologyGroup h1TwoTorsion(const GroupAction& A) {
    size_t n = A.size(), r = static_cast<size_t>(A.rank);
    require(r <= 64, Errc::Unsupported, "lattice rank exceeds the bit width");

    std::vector<uint64_t> rows;
    for (const auto& M : A.mats)
        for (size_t k = 0; k < r; ++k) {
            uint64_t mask = 0;
            for (size_t c = 0; c < r; ++c) {
                mpz_class e = M[k][c] - (k == c ? 1 : 0);
                if (e % 2 != 0) mask |= 1ull << c;
            }
            if (mask) rows.push_back(mask);
        }
    auto fixed = f2Kernel(rows, static_cast<int>(r));

    ZMat stacked;
    for (size_t g = 1; g < n; ++g)
        for (size_t k = 0; k < r; ++k) {
            ZVec row(r);
            for (size_t c = 0; c < r; ++c) row[c] = A.mats[g][k][c] - (k == c ? 1 : 0);
            stacked.push_back(std::move(row));
        }
    if (stacked.empty()) stacked.push_back(ZVec(r, 0));
    std::vector<uint64_t> span;
    for (const auto& v : zKernel(stacked)) {
        uint64_t mask = 0;
        for (size_t c = 0; c < r; ++c)
            if (v[c] % 2 != 0) mask |= 1ull << c;
        if (mask) span.push_back(mask);
    }

    CohomologyGroup out;
    for (uint64_t mk : fixed) {
        if (f2InSpan(span, mk, static_cast<int>(r))) continue;
        span.push_back(mk);
        ZVec d(r, 0);
        for (size_t c = 0; c < r; ++c)
            if ((mk >> c) & 1ull) d[c] = 1;
        Cocycle a;
        for (const auto& M : A.mats) {
            ZVec v = detail::zSubV(d, zMulVec(M, d));
            for (auto& x : v) {
                require(x % 2 == 0, Errc::NonIntegralLift, "half-difference is not integral");
                x /= 2;
            }
            a.values.push_back(std::move(v));
        }
        requireCocycle(A, a);
        out.invariantFactors.push_back(2);
        out.generators.push_back(a);
    }
    return out;
}

inline CohomologyGroup h1TwoTorsion(const GaloisImage& G) { return h1TwoTorsion(groupAction(G)); }

// H^1 of a cyclic group: ker(1 + sigma + ... + sigma^{n-1}) / im(1 - sigma).
inline CohomologyGroup h1Cyclic(const ZMat& sigma, size_t maxOrder = 64) {
    GroupAction A = cyclicAction(sigma, maxOrder);
    size_t n = A.size(), r = static_cast<size_t>(A.rank);

    ZMat N(r, ZVec(r, 0));
    for (const auto& M : A.mats)
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < r; ++j) N[i][j] += M[i][j];
    ZMat oneMinus(r, ZVec(r, 0));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) oneMinus[i][j] = (i == j ? 1 : 0) - sigma[i][j];

    auto q = latticeQuotient(zKernel(N), zTranspose(oneMinus));
    CohomologyGroup out;
    out.invariantFactors = q.invariants;
    for (const auto& x : q.generators) {
        // the cocycle generated by alpha(sigma) = x
        Cocycle a;
        a.values.assign(n, ZVec(r, 0));
        for (size_t j = 1; j < n; ++j)
            a.values[j] = detail::zAddV(a.values[j - 1], zMulVec(A.mats[j - 1], x));
        requireCocycle(A, a);
        out.generators.push_back(a);
    }
    return out;
}

// H^1 as ker d1 / im d0 on the inhomogeneous cochain complex C^0 = M,
// C^1 = M^|G|, C^2 = M^(|G|^2), by integer Smith normal form.
inline CohomologyGroup h1Full(const GroupAction& A) {
    size_t n = A.size();
    require(n <= 64, Errc::GroupTooLarge, "group order exceeds the bar-complex bound");
    size_t r = static_cast<size_t>(A.rank);
    size_t c1 = n * r;

    ZMat D1(n * n * r, ZVec(c1, 0));
    for (size_t g = 0; g < n; ++g)
        for (size_t h = 0; h < n; ++h) {
            size_t base = (g * n + h) * r;
            size_t gh = static_cast<size_t>(A.mul[g][h]);
            for (size_t i = 0; i < r; ++i) {
                for (size_t j = 0; j < r; ++j) D1[base + i][h * r + j] += A.mats[g][i][j];
                D1[base + i][gh * r + i] -= 1;
                D1[base + i][g * r + i] += 1;
            }
        }
    ZMat Z1 = zKernel(D1);

    ZMat B1;
    for (size_t k = 0; k < r; ++k) {
        ZVec row(c1, 0);
        for (size_t g = 0; g < n; ++g)
            for (size_t i = 0; i < r; ++i) row[g * r + i] = A.mats[g][i][k] - (i == k ? 1 : 0);
        B1.push_back(std::move(row));
    }

    auto q = latticeQuotient(Z1, B1);
    CohomologyGroup out;
    out.invariantFactors = q.invariants;
    for (const auto& amb : q.generators) {
        Cocycle a;
        for (size_t g = 0; g < n; ++g)
            a.values.push_back(ZVec(amb.begin() + static_cast<long>(g * r),
                                    amb.begin() + static_cast<long>((g + 1) * r)));
        requireCocycle(A, a);
        out.generators.push_back(a);
    }
    return out;
}

inline CohomologyGroup h1Full(const GaloisImage& G) { return h1Full(groupAction(G)); }

// Restriction to a sub-image: the value map restricted to its elements, with
// a coboundary-membership triviality verdict over the subgroup.
struct Restriction {
    Cocycle cocycle;
    bool trivial = false;
};

inline Restriction restrictionMap(const GaloisImage& G, const GaloisImage& H,
                                  const Cocycle& alpha) {
    require(alpha.values.size() == G.elements.size(), Errc::ValidationError,
            "cocycle arity mismatch");
    Restriction out;
    for (const auto& h : H.elements) {
        int idx = G.indexOf(h);
        require(idx >= 0, Errc::NotASubgroupImage,
                "element of the sub-image is missing from the ambient image");
        out.cocycle.values.push_back(alpha.values[static_cast<size_t>(idx)]);
    }
    GroupAction AH = groupAction(H);
    requireCocycle(AH, out.cocycle, Errc::ValidationError);
    out.trivial = isCoboundary(AH, out.cocycle);
    return out;
}

// The cocycle attached to a degree-2 subscheme of the degeneracy locus: it
// sends the coset exchanging the tangent-plane pairs to -H + sum of the
// subscheme's conic classes and is trivial exactly when that divisor reduces
// into the span of the fixed sublattice mod 2. Membership of an image
// element in the exchanging coset is read off its exchange bits at the
// subscheme's slots, which must agree across the subscheme.
struct SubschemeClass {
    Cocycle cocycle;     // aligned with the image's element list
    PicVector divisor;   // -H + sum of the conic classes over the subscheme
    bool trivial = false;
};

inline SubschemeClass subschemeCocycle(const std::vector<ClosedPoint>& locus,
                                       const std::vector<int>& Tset, const FieldPtr& KT,
                                       const GaloisImage& G) {
    std::vector<int> slotOf(locus.size(), 0);
    int s = 0;
    for (size_t i = 0; i < locus.size(); ++i) {
        slotOf[i] = s;
        s += locus[i].degree;
    }

    int total = 0;
    std::vector<int> slots;
    for (size_t a = 0; a < Tset.size(); ++a) {
        int idx = Tset[a];
        require(idx >= 0 && idx < static_cast<int>(locus.size()), Errc::ValidationError,
                "subscheme index out of range");
        for (size_t b = 0; b < a; ++b)
            require(Tset[b] != idx, Errc::ValidationError, "repeated subscheme index");
        require(locus[static_cast<size_t>(idx)].degree == 1, Errc::Unsupported,
                "degree-2 subscheme members are out of scope");
        total += locus[static_cast<size_t>(idx)].degree;
        slots.push_back(slotOf[static_cast<size_t>(idx)]);
    }
    require(total == 2, Errc::StarViolated, "subscheme must have degree two");
    require(KT && KT->hasExt(), Errc::StarViolated,
            "the splitting field of the subscheme must be a quadratic extension");

    PicVector D = -PicVector::H();
    for (int sl : slots) D = D + PicVector::C(sl);

    SubschemeClass out;
    out.divisor = D;
    bool exchanged = false;
    for (const auto& g : G.elements) {
        for (int sl : slots)
            require(g.perm[static_cast<size_t>(sl)] == sl, Errc::Unsupported,
                    "subscheme slots must be fixed by the image permutations");
        unsigned b0 = (g.exchanges >> static_cast<unsigned>(slots[0])) & 1u;
        unsigned b1 = (g.exchanges >> static_cast<unsigned>(slots[1])) & 1u;
        require(b0 == b1, Errc::StarViolated,
                "the subscheme members split over different quadratic fields");
        out.cocycle.values.push_back(b0 ? D.toZVec() : ZVec(6, 0));
        exchanged |= b0 != 0;
    }
    require(exchanged, Errc::StarViolated,
            "the image fixes the splitting field: epsilon is a square on the subscheme");

    GroupAction A = groupAction(G);
    requireCocycle(A, out.cocycle);

    std::vector<uint64_t> span;
    for (const auto& v : fixedSublattice(G)) {
        uint64_t mask = 0;
        for (size_t c = 0; c < 6; ++c)
            if (v.v[c] % 2 != 0) mask |= 1ull << c;
        if (mask) span.push_back(mask);
    }
    uint64_t dm = 0;
    for (size_t c = 0; c < 6; ++c)
        if (D.v[c] % 2 != 0) dm |= 1ull << c;
    out.trivial = f2InSpan(span, dm, 6);
    require(out.trivial == isCoboundary(A, out.cocycle), Errc::Internal,
            "divisor criterion disagrees with coboundary solvability");
    return out;
}

}  // namespace dp4
