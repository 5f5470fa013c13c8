#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dp4/quadric.hpp"
#include "dp4/square_classes.hpp"

namespace dp4 {

// A closed point of the degeneracy locus on P^1. Degree-1 points live over
// the analysis field K itself; degree-2 points carry a quadratic extension.
struct ClosedPoint {
    int id = -1;
    int degree = 1;
    FieldPtr residueField;
    FieldElement lambda, mu;  // coordinates over residueField, mu normalized to 1 unless the point is [1:0]
    std::string display;

    ClosedPoint(FieldPtr F, FieldElement l, FieldElement m)
        : residueField(std::move(F)), lambda(std::move(l)), mu(std::move(m)) {}
};

namespace detail {

inline FieldElement liftTo(const FieldPtr& F, const FieldElement& x) {
    if (x.field()->sameAs(*F)) return x;
    return FieldElement::lift(F, x);
}

inline bool constantPositive(const Constant& c) {
    mpq_class re = c.re(), im = c.im();
    if (re != 0) return re > 0;
    return im > 0;
}

// Display pair for a degree-1 point with value x = lambda/mu, matching the
// primitive fraction with a positive-leading numerator.
inline std::string displayDegreeOne(const FieldElement& x) {
    const auto& names = x.field()->params;
    if (x.isZero()) return "[0 : 1]";
    if (!x.hi().isZero()) return "[" + x.str() + " : 1]";
    CPoly n = x.lo().num, d = x.lo().den;
    if (!constantPositive(n.leadingCoeff())) {
        n = -n;
        d = -d;
    }
    return "[" + n.str(names) + " : " + d.str(names) + "]";
}

inline GaussInt gaussContentOf(const CPoly& p) {
    GaussInt g{0, 0};
    for (const auto& [e, c] : p.terms()) {
        auto f = toGaussFraction(c);
        require(f.second == 1, Errc::Internal, "gauss content of a non-integral polynomial");
        g = gaussGcd(g, f.first);
    }
    return gaussCanonical(g);
}

// Clear all rational denominators so every coefficient is a Gaussian integer,
// then strip the common Gaussian and polynomial content.
inline void primitivize(std::vector<CPoly>& U) {
    mpz_class lcm = 1;
    for (const auto& p : U)
        for (const auto& [e, c] : p.terms()) {
            mpz_class d = toGaussFraction(c).second;
            lcm = lcm / gcd(lcm, d) * d;
        }
    if (lcm != 1) {
        Constant s = Constant(mpq_class(lcm));
        for (auto& p : U) p = p.scaled(s);
    }
    GaussInt g{0, 0};
    for (const auto& p : U)
        if (!p.isZero()) g = gaussGcd(g, gaussContentOf(p));
    if (!(g.x == 1 && g.y == 0)) {
        Constant inv = fromGauss(g).inverse();
        for (auto& p : U) p = p.scaled(inv);
    }
    std::vector<CPoly> nonzero;
    for (const auto& p : U)
        if (!p.isZero()) nonzero.push_back(p);
    if (nonzero.empty()) return;
    CPoly pc = polyGcdMany(nonzero, nonzero[0].nvars());
    if (!pc.isConstant()) {
        for (auto& p : U) {
            if (p.isZero()) continue;
            auto q = divideExact(p, pc);
            require(q.has_value(), Errc::Internal, "polynomial content division failed");
            p = *q;
        }
    }
}

inline int degOf(const std::vector<CPoly>& U) {
    for (size_t k = U.size(); k-- > 0;)
        if (!U[k].isZero()) return static_cast<int>(k);
    return -1;
}

// Integral primitive rescaling: clear rational denominators, strip content.
inline CPoly primitivePoly(const CPoly& p) {
    require(!p.isZero(), Errc::ZeroElement, "primitive part of zero");
    mpz_class l = 1;
    for (const auto& [e, c] : p.terms()) {
        mpz_class d = toGaussFraction(c).second;
        l = l / gcd(l, d) * d;
    }
    CPoly q = (l == 1) ? p : p.scaled(Constant(mpq_class(l)));
    GaussInt g = gaussContentOf(q);
    if (!(g.x == 1 && g.y == 0)) q = q.scaled(fromGauss(g).inverse());
    return q;
}

// Divisor-enumeration atoms: the coprime basis refined by splitting off
// monomial content, whose factorization into variables is immediate.
inline std::vector<CPoly> enumerationAtoms(const std::vector<CPoly>& atoms, int n) {
    std::vector<CPoly> out;
    auto pushUnique = [&](const CPoly& p) {
        for (const auto& q : out)
            if (q == p) return;
        out.push_back(p);
    };
    for (const auto& a : atoms) {
        std::vector<unsigned> mins;
        for (const auto& [e, c] : a.terms()) {
            if (mins.empty()) {
                mins.assign(e.begin(), e.end());
                continue;
            }
            for (int v = 0; v < n; ++v) mins[v] = std::min(mins[v], e[v]);
        }
        CPoly rest = a;
        for (int v = 0; v < n; ++v) {
            if (mins[v] == 0) continue;
            CPoly xv = CPoly::variable(v, Constant(1), n);
            pushUnique(xv);
            for (unsigned k = 0; k < mins[v]; ++k) rest = *divideExact(rest, xv);
        }
        if (!rest.isConstant()) pushUnique(rest);
    }
    return out;
}

// All polynomial-part divisors of p up to units: products of the primitive
// forms of the atoms dividing it. The constant content is enumerated
// separately by the caller, which is exact because primitive times primitive
// stays primitive.
inline std::vector<CPoly> polyDivisors(const CPoly& p, const std::vector<CPoly>& atoms,
                                       size_t maxCount = 20000) {
    CPoly rest = p;
    std::vector<std::pair<CPoly, int>> present;
    for (const auto& a : atoms) {
        int e = removeFactor(rest, a);
        if (e > 0) present.push_back({primitivePoly(a), e});
    }
    require(rest.isConstant(), Errc::Internal, "unrefined coefficient in divisor enumeration");
    std::vector<CPoly> out = {CPoly::constant(Constant(1), p.nvars())};
    for (const auto& [a, e] : present) {
        std::vector<CPoly> next;
        for (const auto& d : out) {
            CPoly acc = d;
            next.push_back(acc);
            for (int k = 0; k < e; ++k) {
                acc = acc * a;
                next.push_back(acc);
            }
        }
        out = std::move(next);
        require(out.size() <= maxCount, Errc::Unsupported, "divisor enumeration too large");
    }
    return out;
}

// Exact division of U by (beta*t + alpha) over the coefficient ring; fails
// (returns false) when any step is inexact.
inline bool divideLinear(std::vector<CPoly>& U, const CPoly& beta, const CPoly& alpha) {
    int d = degOf(U);
    if (d < 1) return false;
    std::vector<CPoly> V(static_cast<size_t>(d), CPoly(beta.nvars()));
    CPoly carry = U[d];
    for (int j = d; j >= 1; --j) {
        auto q = divideExact(carry, beta);
        if (!q.has_value()) return false;
        V[j - 1] = *q;
        carry = U[j - 1] - alpha * V[j - 1];
    }
    if (!carry.isZero()) return false;
    U.assign(V.begin(), V.end());
    return true;
}

struct PendingQuadratic {
    FieldElement beta, gamma, alpha;  // over the base search field
};

}  // namespace detail

// Splits a squarefree binary quintic into its closed points over K.
// Linear factors are found through the coprime-atom structure of the
// coefficients; what remains is peeled off by degree-2 extraction. A factor
// of degree >= 3 that survives both stages is reported, not guessed at.
inline std::vector<ClosedPoint> degeneracyLocus(const BinaryForm& f, const FieldPtr& K) {
    require(!f.isZero(), Errc::ZeroForm, "degeneracy locus of the zero form");
    require(f.nvars() == 2, Errc::ValidationError, "binary form expected");
    for (const auto& [e, c] : f.terms())
        require(e[0] + e[1] == 5, Errc::ValidationError, "pencil form must be a quintic");
    require(isSmoothPencil(f), Errc::ValidationError, "degeneracy locus needs a squarefree form");

    FieldPtr kB = K;
    if (K->hasExt()) {
        require(K->extIsParam(), Errc::Unsupported, "locus over a general extension");
        kB = K->base;
    }
    int n = kB->nparams();

    // Coefficient of lambda^j mu^(5-j), demoted to the base layer.
    std::vector<FieldElement> c(6, FieldElement::zero(kB));
    for (const auto& [e, coeff] : f.terms()) {
        require(coeff.field()->params == kB->params && coeff.field()->mode == kB->mode,
                Errc::DomainMismatch, "pencil form over an unrelated field");
        require(coeff.hi().isZero(), Errc::Unsupported, "locus coefficients must come from the base field");
        c[e[0]] = FieldElement(kB, coeff.lo(), RatPart::zero(n));
    }

    std::vector<ClosedPoint> atInfinity, linearPts;
    std::vector<detail::PendingQuadratic> quadratics;

    if (c[5].isZero()) {
        ClosedPoint p(K, FieldElement::one(K), FieldElement::zero(K));
        p.display = "[1 : 0]";
        atInfinity.push_back(std::move(p));
    }

    int low = 0;
    while (low <= 5 && c[low].isZero()) ++low;
    require(low <= 5, Errc::Internal, "zero quintic slipped through");
    if (low > 0) {
        ClosedPoint p(K, FieldElement::zero(K), FieldElement::one(K));
        p.display = "[0 : 1]";
        linearPts.push_back(std::move(p));
    }

    auto addRoot = [&](const FieldElement& x) {
        // x = lambda/mu over kB or over K (for split quadratic roots)
        ClosedPoint p(K, detail::liftTo(K, x), FieldElement::one(K));
        p.display = detail::displayDegreeOne(p.lambda);
        linearPts.push_back(std::move(p));
    };

    // u(t) = f(t, 1) / t^low as a primitive polynomial over Z[i][params].
    std::vector<CPoly> U;
    {
        CPoly common = CPoly::constant(Constant(1), n);
        for (int j = low; j <= 5; ++j) {
            if (c[j].isZero()) continue;
            const CPoly& den = c[j].lo().den;
            auto g = polyGcd(common, den);
            auto cof = divideExact(den, g);
            common = common * *cof;
        }
        for (int j = low; j <= 5; ++j) {
            if (c[j].isZero()) {
                U.push_back(CPoly(n));
                continue;
            }
            auto cof = divideExact(common, c[j].lo().den);
            require(cof.has_value(), Errc::Internal, "common denominator not divisible");
            U.push_back(c[j].lo().num * *cof);
        }
        detail::primitivize(U);
    }

    AtomBasis basis(kB);
    auto refreshAtoms = [&]() {
        for (const auto& p : U)
            if (!p.isZero() && !p.isConstant()) basis.classOf(FieldElement::fromPoly(kB, p));
    };

    std::vector<Constant> units = {Constant(1), Constant::i(), -Constant(1), -Constant::i()};

    // Linear stage: candidates beta*t + alpha with beta | lead, alpha | trail,
    // coprime sides (a primitive linear factor has coprime coefficients).
    auto linearStage = [&]() {
        bool found = true;
        while (found && detail::degOf(U) >= 1) {
            found = false;
            refreshAtoms();
            int d = detail::degOf(U);
            const CPoly& lead = U[d];
            const CPoly& trail = U[0];
            auto enumAtoms = detail::enumerationAtoms(basis.atoms(), n);
            auto betaPolys = detail::polyDivisors(lead, enumAtoms);
            auto alphaPolys = detail::polyDivisors(trail, enumAtoms);
            auto betaGauss = gaussDivisorsUpToUnits(detail::gaussContentOf(lead));
            auto alphaGauss = gaussDivisorsUpToUnits(detail::gaussContentOf(trail));
            for (const auto& bp : betaPolys) {
                for (const auto& ap : alphaPolys) {
                    if (!polyGcd(bp, ap).isConstant()) continue;
                    for (const auto& bg : betaGauss) {
                        for (const auto& ag : alphaGauss) {
                            if (gaussGcd(bg, ag).norm() != 1) continue;
                            CPoly beta = bp.scaled(fromGauss(bg));
                            for (const auto& w : units) {
                                CPoly alpha = ap.scaled(fromGauss(ag) * w);
                                // root test: sum U_j (-alpha)^j beta^(d-j) == 0
                                CPoly acc(n);
                                CPoly pa = CPoly::constant(Constant(1), n);
                                std::vector<CPoly> pas;
                                for (int j = 0; j <= d; ++j) {
                                    pas.push_back(pa);
                                    pa = pa * -alpha;
                                }
                                CPoly pb = CPoly::constant(Constant(1), n);
                                for (int j = d; j >= 0; --j) {
                                    if (!U[j].isZero()) acc = acc + U[j] * pas[j] * pb;
                                    pb = pb * beta;
                                }
                                if (!acc.isZero()) continue;
                                require(detail::divideLinear(U, beta, alpha), Errc::Internal,
                                        "verified root does not divide");
                                addRoot(FieldElement::fromFraction(kB, -alpha, beta));
                                found = true;
                                break;
                            }
                            if (found) break;
                        }
                        if (found) break;
                    }
                    if (found) break;
                }
                if (found) break;
            }
        }
    };

    // Quadratic stage: for each (beta, alpha) divisor pair the middle
    // coefficient gamma is pinned by the gcd of the two division remainders,
    // a polynomial identity over K[gamma].
    using PG = Polynomial<FieldElement>;
    auto tryQuadratic = [&]() -> bool {
        int d = detail::degOf(U);
        if (d < 2) return false;
        refreshAtoms();
        auto enumAtoms = detail::enumerationAtoms(basis.atoms(), n);
        auto betaPolys = detail::polyDivisors(U[d], enumAtoms);
        auto alphaPolys = detail::polyDivisors(U[0], enumAtoms);
        auto betaGauss = gaussDivisorsUpToUnits(detail::gaussContentOf(U[d]));
        auto alphaGauss = gaussDivisorsUpToUnits(detail::gaussContentOf(U[0]));
        auto asField = [&](const CPoly& p) { return FieldElement::fromPoly(kB, p); };
        PG gammaVar = PG::variable(0, FieldElement::one(kB), 1);
        for (const auto& bp : betaPolys)
            for (const auto& bg : betaGauss)
                for (const auto& ap : alphaPolys)
                    for (const auto& ag : alphaGauss)
                        for (const auto& w : units) {
                            FieldElement beta = asField(bp.scaled(fromGauss(bg)));
                            FieldElement alpha = asField(ap.scaled(fromGauss(ag) * w));
                            // divide sum U_j t^j by beta t^2 + gamma t + alpha symbolically
                            std::vector<PG> r;
                            for (int j = 0; j <= d; ++j) r.push_back(PG::constant(asField(U[j]), 1));
                            FieldElement binv = beta.inverse();
                            for (int j = d; j >= 2; --j) {
                                PG q = r[j].scaled(binv);
                                r[j - 1] = r[j - 1] - q * gammaVar;
                                r[j - 2] = r[j - 2] - q.scaled(alpha);
                            }
                            PG g = polyGcd(r[1], r[0]);
                            std::vector<FieldElement> roots;
                            if (g.degreeIn(0) == 1) {
                                auto coeffs = g.univariate(0);
                                FieldElement hi = coeffs[1].constantTerm(FieldElement::zero(kB));
                                FieldElement lo = coeffs[0].constantTerm(FieldElement::zero(kB));
                                roots.push_back(-(lo / hi));
                            } else if (g.degreeIn(0) == 2) {
                                auto coeffs = g.univariate(0);
                                FieldElement g2 = coeffs[2].constantTerm(FieldElement::zero(kB));
                                FieldElement g1 = coeffs[1].constantTerm(FieldElement::zero(kB));
                                FieldElement g0 = coeffs[0].constantTerm(FieldElement::zero(kB));
                                FieldElement disc = g1 * g1 - mulInt(g2 * g0, 4);
                                if (isSquare(disc)) {
                                    auto m = sqrtElement(disc);
                                    if (m.has_value()) {
                                        FieldElement twoG2 = mulInt(g2, 2);
                                        roots.push_back((-g1 + *m) / twoG2);
                                        roots.push_back((-g1 - *m) / twoG2);
                                    }
                                }
                            }
                            for (const auto& gamma : roots) {
                                std::vector<FieldElement> vals = {gamma};
                                FieldElement z = FieldElement::zero(kB);
                                if (!r[1].evaluate(vals, z).isZero()) continue;
                                if (!r[0].evaluate(vals, z).isZero()) continue;
                                // numeric division for the quotient
                                std::vector<FieldElement> rr;
                                for (int j = 0; j <= d; ++j) rr.push_back(asField(U[j]));
                                std::vector<FieldElement> V(static_cast<size_t>(d - 1), z);
                                for (int j = d; j >= 2; --j) {
                                    FieldElement q = rr[j] * binv;
                                    V[j - 2] = q;
                                    rr[j - 1] = rr[j - 1] - q * gamma;
                                    rr[j - 2] = rr[j - 2] - q * alpha;
                                }
                                require(rr[1].isZero() && rr[0].isZero(), Errc::Internal,
                                        "quadratic remainder mismatch");
                                quadratics.push_back({beta, gamma, alpha});
                                // rebuild U from the quotient and re-primitivize
                                std::vector<CPoly> next;
                                CPoly common = CPoly::constant(Constant(1), n);
                                for (const auto& v : V) {
                                    auto g2 = polyGcd(common, v.lo().den);
                                    common = common * *divideExact(v.lo().den, g2);
                                }
                                for (const auto& v : V) {
                                    auto cof = divideExact(common, v.lo().den);
                                    next.push_back(v.lo().num * *cof);
                                }
                                detail::primitivize(next);
                                U = std::move(next);
                                return true;
                            }
                        }
        return false;
    };

    linearStage();
    while (detail::degOf(U) >= 3) {
        if (!tryQuadratic()) fail(Errc::UnsupportedFactorDegree, "irreducible factor of degree >= 3");
        linearStage();
    }
    if (detail::degOf(U) == 1) {
        addRoot(FieldElement::fromFraction(kB, -U[0], U[1]));
        U = {CPoly::constant(Constant(1), n)};
    }
    if (detail::degOf(U) == 2) {
        quadratics.push_back({FieldElement::fromPoly(kB, U[2]), FieldElement::fromPoly(kB, U[1]),
                              FieldElement::fromPoly(kB, U[0])});
    }

    // Materialize the quadratic factors: split ones become two degree-1
    // points over K, the rest become degree-2 closed points.
    std::vector<ClosedPoint> quadPts;
    for (const auto& q : quadratics) {
        FieldElement disc = q.gamma * q.gamma - mulInt(q.beta * q.alpha, 4);
        FieldElement discK = detail::liftTo(K, disc);
        FieldElement twoBeta = detail::liftTo(K, mulInt(q.beta, 2));
        if (isSquare(discK)) {
            auto m = sqrtElement(discK);
            require(m.has_value(), Errc::Unsupported,
                    "split quadratic point with unrepresentable square root");
            FieldElement gK = detail::liftTo(K, q.gamma);
            addRoot((-gK + *m) / twoBeta);
            addRoot((-gK - *m) / twoBeta);
            continue;
        }
        require(!K->hasExt(), Errc::Unsupported, "degree-2 point over an extended field");
        AtomBasis local(kB);
        FieldElement rep = local.representative(local.classOf(disc));
        FieldPtr rf = extendFieldByPoly(kB, rep.lo().num, rep.lo().den, rep.str());
        auto h = sqrtElement(disc / rep);
        require(h.has_value(), Errc::Unsupported,
                "discriminant square part is not representable");
        FieldElement root = (detail::liftTo(rf, -q.gamma) +
                             detail::liftTo(rf, *h) * FieldElement::extGenerator(rf)) /
                            detail::liftTo(rf, mulInt(q.beta, 2));
        ClosedPoint p(rf, root, FieldElement::one(rf));
        p.degree = 2;
        p.display = "[t : 1], (" + q.beta.str() + ")*t^2 + (" + q.gamma.str() + ")*t + (" +
                    q.alpha.str() + ") = 0";
        quadPts.push_back(std::move(p));
    }

    // Order: [1:0] first, then degree-1 points by (size of the t-value, display),
    // then degree-2 points by display.
    auto keyOf = [](const ClosedPoint& p) -> std::pair<int, std::string> {
        if (p.lambda.isZero()) return {-1, p.display};
        if (!p.lambda.hi().isZero()) return {50, p.display};
        const RatPart& r = p.lambda.lo();
        return {r.num.totalDegree() + r.den.totalDegree(), p.display};
    };
    std::stable_sort(linearPts.begin(), linearPts.end(),
                     [&](const ClosedPoint& a, const ClosedPoint& b) { return keyOf(a) < keyOf(b); });
    std::stable_sort(quadPts.begin(), quadPts.end(),
                     [](const ClosedPoint& a, const ClosedPoint& b) { return a.display < b.display; });

    std::vector<ClosedPoint> out = std::move(atInfinity);
    for (auto& p : linearPts) out.push_back(std::move(p));
    for (auto& p : quadPts) out.push_back(std::move(p));
    int total = 0;
    for (auto& p : out) total += p.degree;
    require(total == 5, Errc::Internal, "locus degrees do not sum to 5");
    for (size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

inline std::vector<ClosedPoint> degeneracyLocus(const BinaryForm& f) {
    require(!f.isZero(), Errc::ZeroForm, "degeneracy locus of the zero form");
    return degeneracyLocus(f, f.leadingCoeff().field());
}

// The pencil member at a closed point, over its residue field. Rank must be 4.
inline QuadricMatrix quadricAt(const ClosedPoint& T, const QuadricMatrix& A, const QuadricMatrix& B) {
    QuadricMatrix Al = A.lifted(T.residueField);
    QuadricMatrix Bl = B.lifted(T.residueField);
    QuadricMatrix Q = QuadricMatrix::combine(T.lambda, Al, T.mu, Bl);
    require(Q.rank() == 4, Errc::UnexpectedRank, "pencil member is not a rank-4 quadric");
    return Q;
}

inline std::vector<FieldElement> vertexOf(const QuadricMatrix& Q) { return Q.kernelDirection(); }

// First coordinate hyperplane that misses the vertex.
inline LinearForm admissibleHyperplane(const QuadricMatrix& Q) {
    auto v = vertexOf(Q);
    const FieldPtr& F = Q.field();
    for (int i = 0; i < 5; ++i) {
        if (v[i].isZero()) continue;
        std::vector<FieldElement> c(5, FieldElement::zero(F));
        c[i] = FieldElement::one(F);
        return LinearForm(F, std::move(c));
    }
    fail(Errc::Internal, "vertex has no nonzero coordinate");
}

namespace detail {

inline FieldElement detSmall(std::vector<std::vector<FieldElement>> a, const FieldPtr& F) {
    size_t n = a.size();
    FieldElement det = FieldElement::one(F);
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        while (pivot < n && a[pivot][col].isZero()) ++pivot;
        if (pivot == n) return FieldElement::zero(F);
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det = det * a[col][col];
        FieldElement inv = a[col][col].inverse();
        for (size_t i = col + 1; i < n; ++i) {
            if (a[i][col].isZero()) continue;
            FieldElement f = a[i][col] * inv;
            for (size_t j = col; j < n; ++j) a[i][j] = a[i][j] - f * a[col][j];
        }
    }
    return det;
}

}  // namespace detail

// Determinant of Q restricted to the hyperplane H (which must miss the
// vertex); its square class is the discriminant epsilon.
inline FieldElement epsDeterminant(const QuadricMatrix& Q, const LinearForm& H) {
    const FieldPtr& F = Q.field();
    require(H.F->sameAs(*F), Errc::DomainMismatch, "hyperplane over a different field");
    require(!H.isZero(), Errc::ValidationError, "zero hyperplane");
    auto v = vertexOf(Q);
    require(!H.evaluate(v).isZero(), Errc::VertexOnHyperplane, "hyperplane contains the vertex");
    int p = 0;
    while (H.c[p].isZero()) ++p;
    FieldElement hpInv = H.c[p].inverse();
    // columns of the substitution x_p = -(1/h_p) sum_{i != p} h_i x_i
    std::vector<int> keep;
    for (int i = 0; i < 5; ++i)
        if (i != p) keep.push_back(i);
    std::vector<std::vector<FieldElement>> S(5, std::vector<FieldElement>(4, FieldElement::zero(F)));
    for (int col = 0; col < 4; ++col) S[keep[col]][col] = FieldElement::one(F);
    for (int col = 0; col < 4; ++col) S[p][col] = -(H.c[keep[col]] * hpInv);
    std::vector<std::vector<FieldElement>> N(4, std::vector<FieldElement>(4, FieldElement::zero(F)));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            FieldElement acc = FieldElement::zero(F);
            for (int r = 0; r < 5; ++r)
                for (int s = 0; s < 5; ++s) acc = acc + S[r][i] * Q.at(r, s) * S[s][j];
            N[i][j] = acc;
        }
    FieldElement det = detail::detSmall(std::move(N), F);
    require(!det.isZero(), Errc::Internal, "restricted quadric is degenerate");
    return det;
}

inline SquareClass discriminantEps(const QuadricMatrix& Q, const LinearForm& H, AtomBasis& basis) {
    return basis.classOf(epsDeterminant(Q, H));
}

// Gradient form of Q at a smooth point P on it.
inline LinearForm tangentForm(const QuadricMatrix& Q, const std::vector<FieldElement>& P) {
    require(Q.evalPoint(P).isZero(), Errc::NotOnQuadric, "point is not on the quadric");
    auto g = Q.mulVec(P);
    bool allZero = true;
    for (const auto& x : g) allZero &= x.isZero();
    require(!allZero, Errc::SingularPoint, "tangent form at a singular point");
    return LinearForm(Q.field(), std::move(g));
}

// The tangent-hyperplane section of a rank-4 quadric is a rank-2 form
// scale * (u^2 - alpha * v^2); the two planes are u = +-sqrt(alpha) v. The
// factorization is returned symbolically so no second extension layer is
// needed; when alpha has a representable square root the concrete forms are
// filled in as well.
struct SplitSection {
    FieldElement scale, alpha;
    LinearForm u, v;
    XPoly restricted;
    bool splitsOverField = false;       // alpha is a square in the coefficient field
    std::optional<LinearForm> f1, f2;   // concrete factors when representable
    std::string extensionLabel;
};

inline SplitSection splitTangentSection(const QuadricMatrix& Q, const std::vector<FieldElement>& P,
                                        const FieldElement* epsWitness = nullptr) {
    const FieldPtr& F = Q.field();
    LinearForm l = tangentForm(Q, P);
    int p = 0;
    while (l.c[p].isZero()) ++p;
    FieldElement hpInv = l.c[p].inverse();
    XPoly sub(5);
    for (int i = 0; i < 5; ++i)
        if (i != p && !l.c[i].isZero()) sub = sub - xvar(F, i).scaled(l.c[i] * hpInv);
    XPoly R = Q.form().substitute(p, sub);
    require(!R.isZero(), Errc::RankNotTwo, "tangent section vanished");
    QuadricMatrix N = QuadricMatrix::fromForm(R);
    require(N.rank() == 2, Errc::RankNotTwo, "tangent section is not a rank-2 form");

    // if the diagonal vanishes, mix a cross-term variable pair to create one
    int mixI = -1, mixJ = -1;
    XPoly Rw = R;
    {
        bool hasDiag = false;
        for (int i = 0; i < 5; ++i) hasDiag |= !N.at(i, i).isZero();
        if (!hasDiag) {
            for (int i = 0; i < 5 && mixI < 0; ++i)
                for (int j = 0; j < 5 && mixI < 0; ++j)
                    if (i != j && !N.at(i, j).isZero()) {
                        mixI = i;
                        mixJ = j;
                    }
            Rw = R.substitute(mixI, xvar(F, mixI) + xvar(F, mixJ));
        }
    }
    QuadricMatrix Nw = QuadricMatrix::fromForm(Rw);

    FieldElement half = FieldElement::fromConstant(F, Constant(mpq_class(1, 2)));
    int i0 = 0;
    while (Nw.at(i0, i0).isZero()) ++i0;
    FieldElement q = Nw.at(i0, i0) * half;
    FieldElement i0inv = Nw.at(i0, i0).inverse();
    std::vector<FieldElement> uc(5, FieldElement::zero(F));
    for (int j = 0; j < 5; ++j) uc[j] = Nw.at(i0, j) * i0inv;
    LinearForm u(F, uc);
    XPoly uPoly = u.toPoly();
    XPoly Rrest = Rw - (uPoly * uPoly).scaled(q);
    require(!Rrest.isZero(), Errc::RankNotTwo, "tangent section has rank 1");
    QuadricMatrix Nr = QuadricMatrix::fromForm(Rrest);
    int j0 = 0;
    while (Nr.at(j0, j0).isZero()) ++j0;
    FieldElement r = Nr.at(j0, j0) * half;
    FieldElement j0inv = Nr.at(j0, j0).inverse();
    std::vector<FieldElement> vc(5, FieldElement::zero(F));
    for (int j = 0; j < 5; ++j) vc[j] = Nr.at(j0, j) * j0inv;
    LinearForm v(F, vc);
    XPoly vPoly = v.toPoly();
    require(Rrest == (vPoly * vPoly).scaled(r), Errc::RankNotTwo, "tangent section rank exceeds 2");

    if (mixI >= 0) {
        // undo x_mixI -> x_mixI + x_mixJ on the factors
        auto unmix = [&](LinearForm& w) {
            w.c[mixJ] = w.c[mixJ] - w.c[mixI];
        };
        unmix(u);
        unmix(v);
    }
    SplitSection out{q, -(r / q), u, v, R, false, std::nullopt, std::nullopt, std::string()};
    XPoly up = out.u.toPoly(), vp = out.v.toPoly();
    require(R == (up * up - (vp * vp).scaled(out.alpha)).scaled(out.scale), Errc::Internal,
            "tangent section factorization failed");
    if (epsWitness != nullptr)
        require(isSquare(out.alpha * *epsWitness), Errc::Internal,
                "tangent section discriminant disagrees with epsilon");
    if (isSquare(out.alpha)) {
        out.splitsOverField = true;
        auto m = sqrtElement(out.alpha);
        if (m.has_value()) {
            std::vector<FieldElement> f1c(5, FieldElement::zero(F)), f2c(5, FieldElement::zero(F));
            for (int j = 0; j < 5; ++j) {
                f1c[j] = out.scale * (out.u.c[j] + *m * out.v.c[j]);
                f2c[j] = out.u.c[j] - *m * out.v.c[j];
            }
            out.f1 = LinearForm(F, std::move(f1c));
            out.f2 = LinearForm(F, std::move(f2c));
        } else {
            out.extensionLabel = "square class trivial, root not representable";
        }
    } else {
        out.extensionLabel = "sqrt(" + out.alpha.str() + ")";
    }
    return out;
}

// Norm of an epsilon determinant down to the analysis field.
inline FieldElement epsNorm(const ClosedPoint& T, const FieldElement& det, const FieldPtr& K) {
    if (T.degree == 1) return det;
    FieldElement nrm = det.normToBase();
    return detail::liftTo(K, nrm);
}

// All degree-2 subschemes satisfying (*): square norm product over K and a
// non-square epsilon at every member.
inline std::vector<std::vector<int>> starSubschemes(const std::vector<ClosedPoint>& locus,
                                                    const std::vector<FieldElement>& epsDets,
                                                    const FieldPtr& K) {
    require(locus.size() == epsDets.size(), Errc::ValidationError, "epsilon table misaligned");
    size_t m = locus.size();
    std::vector<bool> nontrivial(m);
    std::vector<FieldElement> norms;
    for (size_t i = 0; i < m; ++i) {
        nontrivial[i] = !isSquare(epsDets[i]);
        norms.push_back(epsNorm(locus[i], epsDets[i], K));
    }
    std::vector<std::vector<int>> out;
    for (size_t i = 0; i < m; ++i) {
        if (locus[i].degree == 2) {
            if (nontrivial[i] && isSquare(norms[i])) out.push_back({static_cast<int>(i)});
            continue;
        }
        for (size_t j = i + 1; j < m; ++j) {
            if (locus[j].degree != 1) continue;
            if (!nontrivial[i] || !nontrivial[j]) continue;
            if (isSquare(norms[i] * norms[j])) out.push_back({static_cast<int>(i), static_cast<int>(j)});
        }
    }
    return out;
}

}  // namespace dp4
