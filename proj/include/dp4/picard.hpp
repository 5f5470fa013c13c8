#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "dp4/f2.hpp"
#include "dp4/intlinalg.hpp"
#include "dp4/locus.hpp"
#include "dp4/square_classes.hpp"

namespace dp4 {

// Rank-6 Picard lattice in the conic basis (E, C0..C4), with H = 2E - sum C.
struct PicVector {
    std::array<long long, 6> v{};

    static PicVector zero() { return {}; }
    static PicVector E() {
        PicVector p;
        p.v[0] = 1;
        return p;
    }
    static PicVector C(int i) {
        require(0 <= i && i < 5, Errc::ValidationError, "conic index out of range");
        PicVector p;
        p.v[static_cast<size_t>(i) + 1] = 1;
        return p;
    }
    static PicVector H() {
        PicVector p;
        p.v[0] = 2;
        for (int i = 1; i < 6; ++i) p.v[static_cast<size_t>(i)] = -1;
        return p;
    }

    bool isZero() const {
        for (long long x : v)
            if (x != 0) return false;
        return true;
    }

    PicVector operator+(const PicVector& o) const {
        PicVector r;
        for (int i = 0; i < 6; ++i) r.v[i] = v[i] + o.v[i];
        return r;
    }
    PicVector operator-(const PicVector& o) const {
        PicVector r;
        for (int i = 0; i < 6; ++i) r.v[i] = v[i] - o.v[i];
        return r;
    }
    PicVector operator-() const {
        PicVector r;
        for (int i = 0; i < 6; ++i) r.v[i] = -v[i];
        return r;
    }
    PicVector scaled(long long s) const {
        PicVector r;
        for (int i = 0; i < 6; ++i) r.v[i] = s * v[i];
        return r;
    }
    bool operator==(const PicVector& o) const { return v == o.v; }

    ZVec toZVec() const {
        ZVec z(6);
        for (int i = 0; i < 6; ++i) z[i] = static_cast<long>(v[i]);
        return z;
    }
    static PicVector fromZVec(const ZVec& z) {
        require(z.size() == 6, Errc::Internal, "pic vector arity");
        PicVector p;
        for (int i = 0; i < 6; ++i) {
            require(z[i].fits_slong_p(), Errc::Internal, "pic coordinate overflow");
            p.v[i] = z[i].get_si();
        }
        return p;
    }

    std::string str() const {
        static const char* names[6] = {"E", "C0", "C1", "C2", "C3", "C4"};
        std::ostringstream os;
        bool first = true;
        for (int i = 0; i < 6; ++i) {
            long long c = v[i];
            if (c == 0) continue;
            if (first) {
                if (c < 0) os << "-";
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            long long a = c < 0 ? -c : c;
            if (a != 1) os << a << "*";
            os << names[i];
            first = false;
        }
        if (first) os << "0";
        return os.str();
    }
};

// Intersection pairing: E.E = 11, E.Ci = 3, Ci.Ci = 0, Ci.Cj = 1.
inline long long pairing(const PicVector& x, const PicVector& y) {
    long long s = 0;
    for (int i = 0; i < 6; ++i) {
        if (x.v[i] == 0) continue;
        for (int j = 0; j < 6; ++j) {
            long long g;
            if (i == 0 && j == 0)
                g = 11;
            else if (i == 0 || j == 0)
                g = 3;
            else
                g = (i == j) ? 0 : 1;
            s += x.v[i] * g * y.v[j];
        }
    }
    return s;
}

// Element of (Z/2)^5 x| S5 acting on the conics: C_m maps to C_{perm[m]},
// primed exactly when bit m of exchanges is set (C' = H - C).
struct GammaElement {
    unsigned exchanges = 0;
    std::array<int, 5> perm{0, 1, 2, 3, 4};

    static GammaElement identity() { return {}; }
    bool isIdentity() const { return exchanges == 0 && perm == std::array<int, 5>{0, 1, 2, 3, 4}; }
    bool operator==(const GammaElement& o) const {
        return exchanges == o.exchanges && perm == o.perm;
    }
    bool operator<(const GammaElement& o) const {
        if (exchanges != o.exchanges) return exchanges < o.exchanges;
        return perm < o.perm;
    }

    int exchangeWeight() const { return __builtin_popcount(exchanges); }

    // apply h first, then g; the prime bit transports through h's permutation
    friend GammaElement operator*(const GammaElement& g, const GammaElement& h) {
        GammaElement r;
        unsigned ex = 0;
        for (int m = 0; m < 5; ++m) {
            r.perm[m] = g.perm[static_cast<size_t>(h.perm[m])];
            unsigned bit = ((h.exchanges >> m) & 1u) ^
                           ((g.exchanges >> static_cast<unsigned>(h.perm[m])) & 1u);
            ex |= bit << m;
        }
        r.exchanges = ex;
        return r;
    }

    GammaElement inverse() const {
        GammaElement r;
        unsigned ex = 0;
        for (int m = 0; m < 5; ++m) {
            r.perm[static_cast<size_t>(perm[m])] = m;
            ex |= ((exchanges >> m) & 1u) << static_cast<unsigned>(perm[m]);
        }
        r.exchanges = ex;
        return r;
    }

    std::string str() const {
        if (isIdentity()) return "1";
        std::ostringstream os;
        bool any = false;
        if (exchanges != 0) {
            os << "exch{";
            bool first = true;
            for (int m = 0; m < 5; ++m)
                if ((exchanges >> m) & 1u) {
                    if (!first) os << ",";
                    os << m;
                    first = false;
                }
            os << "}";
            any = true;
        }
        if (perm != std::array<int, 5>{0, 1, 2, 3, 4}) {
            std::array<bool, 5> seen{};
            for (int m = 0; m < 5; ++m) {
                if (seen[m] || perm[m] == m) continue;
                int c = m;
                if (any) os << " ";
                os << "(";
                bool first = true;
                do {
                    if (!first) os << " ";
                    os << c;
                    seen[c] = true;
                    c = perm[c];
                    first = false;
                } while (c != m);
                os << ")";
                any = true;
            }
        }
        return os.str();
    }
};

// Matrix of g on (E, C0..C4) coordinates: C_m -> C_{perm[m]} or H - C_{perm[m]},
// and E = (H + sum C)/2 transforms to (1+w)E - sum_{j not in perm(I)} (w/2) Cj
// - sum_{j in perm(I)} ((w+2)/2) Cj, integral only for even w = |I|.
inline ZMat actionMatrix(const GammaElement& g) {
    int w = g.exchangeWeight();
    require(w % 2 == 0, Errc::OddExchangeSet, "odd exchange set: the image of E is not integral");
    ZMat M(6, ZVec(6, 0));
    M[0][0] = 1 + w;
    for (int j = 0; j < 5; ++j) {
        int src = 0;
        while (g.perm[src] != j) ++src;
        bool primed = (g.exchanges >> static_cast<unsigned>(src)) & 1u;
        M[static_cast<size_t>(j) + 1][0] = primed ? -(w + 2) / 2 : -w / 2;
    }
    for (int m = 0; m < 5; ++m) {
        size_t col = static_cast<size_t>(m) + 1;
        size_t t = static_cast<size_t>(g.perm[m]) + 1;
        if ((g.exchanges >> m) & 1u) {
            M[0][col] = 2;
            for (size_t j = 1; j < 6; ++j) M[j][col] = (j == t) ? -2 : -1;
        } else {
            M[t][col] = 1;
        }
    }
    return M;
}

inline PicVector applyGamma(const GammaElement& g, const PicVector& x) {
    return PicVector::fromZVec(zMulVec(actionMatrix(g), x.toZVec()));
}

// Finite image of the Galois group in Aut(Gamma), with one character label
// per element.
struct GaloisImage {
    std::vector<GammaElement> elements;  // closed under the law; elements[0] = 1
    std::vector<GammaElement> generators;
    std::vector<std::string> charLabels;  // aligned with elements

    int indexOf(const GammaElement& g) const {
        for (size_t i = 0; i < elements.size(); ++i)
            if (elements[i] == g) return static_cast<int>(i);
        return -1;
    }
};

namespace detail {

inline FieldElement extensionElement(const FieldPtr& rf) {
    require(rf->hasExt(), Errc::Internal, "residue field carries no extension");
    return FieldElement(rf->base, RatPart::make(rf->ext->dNum, rf->ext->dDen),
                        RatPart::zero(rf->base->nparams()));
}

}  // namespace detail

// Image of the Galois action computed from the square classes of the epsilon
// table. Degree-1 points contribute an exchange character (the class of
// epsilon over the analysis field); a degree-2 point contributes the swap of
// its two geometric points, driven by the class of its residue-field
// discriminant. A nontrivial epsilon at a degree-2 point would tie exchange
// bits to a root choice inside the residue field; no input in scope produces
// one, so it is rejected rather than guessed.
inline GaloisImage galoisImage(const std::vector<ClosedPoint>& locus,
                               const std::vector<FieldElement>& epsDets, AtomBasis& basis) {
    require(locus.size() == epsDets.size(), Errc::ValidationError, "epsilon table misaligned");
    const FieldPtr& K = basis.field();

    struct Col {
        int slot;      // first geometric index of the point
        bool swap;     // column drives a transposition instead of an exchange
        int pointIdx;  // locus index, for labels
    };
    std::vector<Col> cols;
    std::vector<FieldElement> colValues;
    int slot = 0;
    for (size_t i = 0; i < locus.size(); ++i) {
        const ClosedPoint& T = locus[i];
        require(T.degree == 1 || T.degree == 2, Errc::UnsupportedDegree,
                "locus points must have degree <= 2");
        if (T.degree == 1) {
            require(epsDets[i].field()->sameAs(*K), Errc::DomainMismatch,
                    "degree-1 epsilon must live over the analysis field");
            cols.push_back({slot, false, static_cast<int>(i)});
            colValues.push_back(epsDets[i]);
        } else {
            require(isSquare(epsDets[i]), Errc::Unsupported,
                    "degree-2 point with a nontrivial epsilon class is out of scope");
            const FieldPtr& rf = T.residueField;
            require(rf->hasExt() && rf->base->sameAs(*K), Errc::DomainMismatch,
                    "degree-2 residue field does not extend the analysis field");
            cols.push_back({slot, true, static_cast<int>(i)});
            colValues.push_back(detail::extensionElement(rf));
        }
        slot += T.degree;
    }
    require(slot == 5, Errc::ValidationError, "locus degrees do not sum to 5");

    auto classes = basis.refine(colValues);
    auto relations = basis.relationLattice(classes);
    auto charBasis = f2Complement(relations, static_cast<int>(cols.size()));
    auto characters = f2Span(charBasis);

    auto materialize = [&](uint64_t chi) {
        GammaElement g;
        for (size_t c = 0; c < cols.size(); ++c) {
            if (!((chi >> c) & 1u)) continue;
            if (cols[c].swap) {
                std::swap(g.perm[static_cast<size_t>(cols[c].slot)],
                          g.perm[static_cast<size_t>(cols[c].slot) + 1]);
            } else {
                g.exchanges |= 1u << static_cast<unsigned>(cols[c].slot);
            }
        }
        require(g.exchangeWeight() % 2 == 0, Errc::OddExchangeSet,
                "epsilon table forces an odd exchange set; the product of the classes over the "
                "locus must be a square");
        return g;
    };
    auto labelOf = [&](uint64_t chi) {
        if (chi == 0) return std::string("1");
        std::ostringstream os;
        bool first = true;
        for (size_t c = 0; c < cols.size(); ++c) {
            if (!((chi >> c) & 1u)) continue;
            if (!first) os << " ";
            os << (cols[c].swap ? "swap(T" : "eps(T") << cols[c].pointIdx << ")";
            first = false;
        }
        return os.str();
    };

    GaloisImage out;
    // identity first, the rest in enumeration order
    out.elements.push_back(GammaElement::identity());
    out.charLabels.push_back("1");
    for (uint64_t chi : characters) {
        if (chi == 0) continue;
        out.elements.push_back(materialize(chi));
        out.charLabels.push_back(labelOf(chi));
    }
    for (uint64_t chi : charBasis) out.generators.push_back(materialize(chi));
    return out;
}

// Integer kernel of the stacked (M_g - 1): the fixed sublattice of Pic.
inline std::vector<PicVector> fixedSublattice(const GaloisImage& G) {
    ZMat stacked;
    for (const auto& g : G.elements) {
        if (g.isIdentity()) continue;
        ZMat M = actionMatrix(g);
        for (size_t r = 0; r < 6; ++r) {
            ZVec row(6);
            for (size_t c = 0; c < 6; ++c) row[c] = M[r][c] - (r == c ? 1 : 0);
            stacked.push_back(std::move(row));
        }
    }
    if (stacked.empty()) stacked.push_back(ZVec(6, 0));
    ZMat k = zKernel(stacked);
    std::vector<PicVector> out;
    for (const auto& row : k) out.push_back(PicVector::fromZVec(row));
    return out;
}

// (Pic/2Pic)^G together with its quotient by the reduction of Pic^G.
struct Mod2Fixed {
    std::vector<PicVector> fixedClasses;  // basis of (Pic/2Pic)^G, 0/1 coordinates
    std::vector<PicVector> quotientGens;  // coset generators of the quotient
};

inline Mod2Fixed fixedMod2Quotient(const GaloisImage& G) {
    std::vector<uint64_t> rows;
    for (const auto& g : G.elements) {
        ZMat M = actionMatrix(g);
        for (size_t r = 0; r < 6; ++r) {
            uint64_t mask = 0;
            for (size_t c = 0; c < 6; ++c) {
                mpz_class e = M[r][c] - (r == c ? 1 : 0);
                if (e % 2 != 0) mask |= 1ull << c;
            }
            if (mask) rows.push_back(mask);
        }
    }
    auto fixed = f2Kernel(rows, 6);

    auto toMask = [](const PicVector& p) {
        uint64_t m = 0;
        for (size_t c = 0; c < 6; ++c)
            if (p.v[c] % 2 != 0) m |= 1ull << c;
        return m;
    };
    auto fromMask = [](uint64_t m) {
        PicVector p;
        for (size_t c = 0; c < 6; ++c) p.v[c] = (m >> c) & 1ull;
        return p;
    };

    std::vector<uint64_t> span;
    for (const auto& p : fixedSublattice(G)) {
        uint64_t m = toMask(p);
        if (m) span.push_back(m);
    }

    Mod2Fixed out;
    for (uint64_t m : fixed) out.fixedClasses.push_back(fromMask(m));
    for (uint64_t m : fixed) {
        if (f2InSpan(span, m, 6)) continue;
        span.push_back(m);
        out.quotientGens.push_back(fromMask(m));
    }
    return out;
}

}  // namespace dp4
