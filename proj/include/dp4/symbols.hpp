#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dp4/locus.hpp"
#include "dp4/valuation.hpp"

namespace dp4 {

namespace detail {

inline bool isHomogeneous(const XPoly& p) {
    if (p.isZero()) return true;
    unsigned d = expoTotal(p.terms().front().first);
    for (const auto& t : p.terms())
        if (expoTotal(t.first) != d) return false;
    return true;
}

}  // namespace detail

// Quotient of two homogeneous forms of equal degree in x0..x4: a function on
// the surface. Stored gcd-reduced with a monic denominator, which is a
// canonical representative, so == decides equality of functions.
class RationalFunctionOnX {
public:
    RationalFunctionOnX(FieldPtr F, XPoly num, XPoly den)
        : F_(std::move(F)), num_(std::move(num)), den_(std::move(den)) {
        require(num_.nvars() == 5 && den_.nvars() == 5, Errc::ValidationError,
                "rational function needs variables x0..x4");
        require(!den_.isZero(), Errc::ValidationError, "zero denominator");
        require(detail::isHomogeneous(num_) && detail::isHomogeneous(den_), Errc::ValidationError,
                "rational function parts must be homogeneous");
        require(num_.isZero() || num_.totalDegree() == den_.totalDegree(), Errc::ValidationError,
                "numerator and denominator degrees differ");
        reduce();
    }

    static RationalFunctionOnX constant(const FieldPtr& F, const FieldElement& c) {
        return RationalFunctionOnX(F, XPoly::constant(c, 5),
                                   XPoly::constant(FieldElement::one(F), 5));
    }
    static RationalFunctionOnX one(const FieldPtr& F) {
        return constant(F, FieldElement::one(F));
    }

    const FieldPtr& field() const { return F_; }
    const XPoly& num() const { return num_; }
    const XPoly& den() const { return den_; }

    bool isZero() const { return num_.isZero(); }
    bool isConstantFn() const { return num_.isConstant() && den_.isConstant(); }
    FieldElement constantValue() const {
        require(isConstantFn(), Errc::ValidationError, "not a constant function");
        return num_.constantTerm(FieldElement::zero(F_)) /
               den_.constantTerm(FieldElement::zero(F_));
    }

    RationalFunctionOnX operator*(const RationalFunctionOnX& o) const {
        checkField(o);
        return RationalFunctionOnX(F_, num_ * o.num_, den_ * o.den_);
    }
    RationalFunctionOnX operator/(const RationalFunctionOnX& o) const {
        checkField(o);
        require(!o.isZero(), Errc::ZeroElement, "division by the zero function");
        return RationalFunctionOnX(F_, num_ * o.den_, den_ * o.num_);
    }
    RationalFunctionOnX operator+(const RationalFunctionOnX& o) const {
        checkField(o);
        return RationalFunctionOnX(F_, num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    RationalFunctionOnX operator-(const RationalFunctionOnX& o) const {
        checkField(o);
        return RationalFunctionOnX(F_, num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    }
    RationalFunctionOnX operator-() const { return RationalFunctionOnX(F_, -num_, den_); }

    bool operator==(const RationalFunctionOnX& o) const {
        return F_->sameAs(*o.F_) && num_ == o.num_ && den_ == o.den_;
    }
    bool operator!=(const RationalFunctionOnX& o) const { return !(*this == o); }

    std::string str() const {
        auto names = ambientNames();
        std::string n = num_.termCount() > 1 ? "(" + num_.str(names) + ")" : num_.str(names);
        if (den_.isConstant() && den_.leadingCoeff().isOne()) return n;
        return n + " / (" + den_.str(names) + ")";
    }

private:
    void reduce() {
        if (num_.isZero()) {
            den_ = XPoly::constant(FieldElement::one(F_), 5);
            return;
        }
        XPoly g = polyGcd(num_, den_);
        if (!g.isConstant()) {
            num_ = *divideExact(num_, g);
            den_ = *divideExact(den_, g);
        }
        FieldElement lead = den_.leadingCoeff();
        if (!lead.isOne()) {
            FieldElement inv = lead.inverse();
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }
    void checkField(const RationalFunctionOnX& o) const {
        require(F_->sameAs(*o.F_), Errc::DomainMismatch, "mixed fields in rational function");
    }

    FieldPtr F_;
    XPoly num_, den_;
};

// p = content * odd * (square), with odd monic squarefree; p is a square in
// the fraction field exactly when odd = 1 and content is a field square.
struct OddDecomposition {
    FieldElement content;
    XPoly odd;
};

inline OddDecomposition oddDecomposition(XPoly p) {
    require(!p.isZero(), Errc::ZeroElement, "odd decomposition of zero");
    const FieldPtr& F = p.leadingCoeff().field();
    while (!p.isConstant()) {
        XPoly r = squarefreePart(p);
        auto h = divideExact(p, r);
        require(h.has_value(), Errc::Internal, "radical does not divide its polynomial");
        XPoly g = polyGcd(r, *h);
        if (g.isConstant()) break;
        auto q = divideExact(p, g * g);
        require(q.has_value(), Errc::Internal, "repeated factor does not divide");
        p = *q;
    }
    if (p.isConstant())
        return {p.constantTerm(FieldElement::zero(F)),
                XPoly::constant(FieldElement::one(F), p.nvars())};
    return {p.leadingCoeff(), p.normalized()};
}

// Decomposition of num * den, done factor-wise: num and den are coprime in a
// reduced function, so their odd parts multiply exactly.
inline OddDecomposition oddDecompositionFn(const RationalFunctionOnX& f) {
    require(!f.isZero(), Errc::ZeroElement, "odd decomposition of the zero function");
    OddDecomposition dn = oddDecomposition(f.num());
    OddDecomposition dd = oddDecomposition(f.den());
    return {dn.content * dd.content, dn.odd * dd.odd};
}

// The square class of f in K(x0..x4) as a field constant, when it has one.
inline std::optional<FieldElement> squareClassConstant(const RationalFunctionOnX& f) {
    OddDecomposition d = oddDecompositionFn(f);
    if (!d.odd.isConstant()) return std::nullopt;
    return d.content;
}

inline bool isSquareFn(const RationalFunctionOnX& f) {
    auto c = squareClassConstant(f);
    return c.has_value() && isSquare(*c);
}

// --- quaternion symbols ------------------------------------------------------

struct SymbolSlot {
    FieldElement u;
    RationalFunctionOnX f;
};

// Formal sum of quaternion symbols (u, f) over K(X), mod 2. Slots are kept
// as constructed (sorted for determinism); normalized() reduces by the group
// laws, and triviality is decided on the normalized form.
class QuaternionSymbol {
public:
    explicit QuaternionSymbol(FieldPtr F) : F_(std::move(F)) {}

    QuaternionSymbol(FieldPtr F, std::vector<SymbolSlot> slots)
        : F_(std::move(F)), slots_(std::move(slots)) {
        for (const auto& s : slots_) {
            require(s.u.field()->sameAs(*F_) && s.f.field()->sameAs(*F_), Errc::DomainMismatch,
                    "slot entries over the wrong field");
            require(!s.u.isZero(), Errc::ValidationError, "zero first slot entry");
            require(!s.f.isZero(), Errc::ValidationError, "zero second slot entry");
        }
        sortSlots();
    }

    const FieldPtr& field() const { return F_; }
    const std::vector<SymbolSlot>& slots() const { return slots_; }

    QuaternionSymbol operator+(const QuaternionSymbol& o) const {
        require(F_->sameAs(*o.F_), Errc::DomainMismatch, "symbols over different fields");
        std::vector<SymbolSlot> all = slots_;
        all.insert(all.end(), o.slots_.begin(), o.slots_.end());
        return QuaternionSymbol(F_, std::move(all));
    }

    // Group-law reduction: merge slots sharing an entry (bilinearity), then
    // drop slots that are trivial because the first entry is a square, the
    // second is a square, or the second is -u times a square.
    QuaternionSymbol normalized() const {
        std::vector<SymbolSlot> w = slots_;
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < w.size(); ++i)
                for (size_t j = i + 1; j < w.size();) {
                    if (w[j].u == w[i].u) {
                        w[i].f = w[i].f * w[j].f;
                        w.erase(w.begin() + static_cast<long>(j));
                        changed = true;
                    } else {
                        ++j;
                    }
                }
            for (size_t i = 0; i < w.size(); ++i)
                for (size_t j = i + 1; j < w.size();) {
                    if (w[j].f == w[i].f) {
                        w[i].u = w[i].u * w[j].u;
                        w.erase(w.begin() + static_cast<long>(j));
                        changed = true;
                    } else {
                        ++j;
                    }
                }
        }
        std::vector<SymbolSlot> keep;
        for (auto& s : w) {
            if (isSquare(s.u)) continue;
            auto c = squareClassConstant(s.f);
            if (c.has_value() && (isSquare(*c) || isSquare(*c * s.u))) continue;
            keep.push_back(std::move(s));
        }
        return QuaternionSymbol(F_, std::move(keep));
    }

    bool isTrivial() const { return normalized().slots_.empty(); }

    // Equality of Brauer classes, as far as normalization can certify it.
    bool equivalentTo(const QuaternionSymbol& o) const { return (*this + o).isTrivial(); }

    bool operator==(const QuaternionSymbol& o) const {
        if (!F_->sameAs(*o.F_) || slots_.size() != o.slots_.size()) return false;
        for (size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i].u != o.slots_[i].u || slots_[i].f != o.slots_[i].f) return false;
        return true;
    }
    bool operator!=(const QuaternionSymbol& o) const { return !(*this == o); }

    std::string str() const {
        if (slots_.empty()) return "0";
        std::ostringstream os;
        for (size_t i = 0; i < slots_.size(); ++i) {
            if (i) os << " + ";
            os << "(" << slots_[i].u.str() << ", " << slots_[i].f.str() << ")";
        }
        return os.str();
    }

private:
    void sortSlots() {
        std::stable_sort(slots_.begin(), slots_.end(), [](const SymbolSlot& a, const SymbolSlot& b) {
            std::string au = a.u.str(), bu = b.u.str();
            if (au != bu) return au < bu;
            return a.f.str() < b.f.str();
        });
    }

    FieldPtr F_;
    std::vector<SymbolSlot> slots_;
};

// --- construction from tangent data ------------------------------------------

// N_{K(T)/K} of a linear form with degree-2 residue field coefficients: the
// product with the conjugated form, whose coefficients descend to the base.
inline XPoly normOfLinearForm(const LinearForm& l) {
    const FieldPtr& rf = l.F;
    require(rf->hasExt(), Errc::NoExtensionLayer, "norm of a base-layer form");
    const FieldPtr& base = rf->base;
    std::vector<FieldElement> cc(5, FieldElement::zero(rf));
    for (int i = 0; i < 5; ++i) cc[i] = l.c[i].conj();
    XPoly prod = l.toPoly() * LinearForm(rf, cc).toPoly();
    XPoly out(5);
    for (const auto& t : prod.terms()) {
        const FieldElement& x = t.second;
        require(x.hi().isZero(), Errc::Internal, "norm coefficient failed to descend");
        out = out + XPoly::monomialTerm(t.first, FieldElement(base, x.lo(), RatPart::zero(base->nparams())), 5);
    }
    return out;
}

// The algebra (eps, l^{-2} prod_T N_{K(T)/K}(l_T)) attached to a subscheme
// satisfying (*). A trivial eps yields the split (empty) symbol.
inline QuaternionSymbol buildAlgebra(const std::vector<ClosedPoint>& locus,
                                     const std::vector<int>& Tset,
                                     const std::vector<LinearForm>& tangentForms,
                                     const LinearForm& l, const SquareClass& eps,
                                     AtomBasis& basis) {
    const FieldPtr& K = basis.field();
    require(l.F->sameAs(*K), Errc::DomainMismatch, "l over the wrong field");
    require(!l.isZero(), Errc::ValidationError, "l must be nonzero");
    require(tangentForms.size() == Tset.size(), Errc::MissingTangentForm,
            "one tangent form per subscheme member is required");

    int total = 0;
    std::vector<bool> seen(locus.size(), false);
    for (size_t k = 0; k < Tset.size(); ++k) {
        int i = Tset[k];
        require(i >= 0 && i < static_cast<int>(locus.size()), Errc::ValidationError,
                "subscheme index out of range");
        require(!seen[i], Errc::ValidationError, "repeated subscheme member");
        seen[i] = true;
        total += locus[i].degree;
        require(!tangentForms[k].isZero(), Errc::MissingTangentForm,
                "zero tangent form for a subscheme member");
    }
    require(total == 2, Errc::StarViolated, "the subscheme must have degree 2");

    XPoly num = XPoly::constant(FieldElement::one(K), 5);
    for (size_t k = 0; k < Tset.size(); ++k) {
        const ClosedPoint& T = locus[Tset[k]];
        const LinearForm& lt = tangentForms[k];
        if (T.degree == 1) {
            require(lt.F->sameAs(*K), Errc::DomainMismatch,
                    "tangent form of a rational point must live over the analysis field");
            num = num * lt.toPoly();
        } else {
            require(lt.F->sameAs(*T.residueField), Errc::DomainMismatch,
                    "tangent form must live over the point's residue field");
            require(T.residueField->base->sameAs(*K), Errc::DomainMismatch,
                    "residue field does not extend the analysis field");
            num = num * normOfLinearForm(lt);
        }
    }

    if (basis.trivial(eps)) return QuaternionSymbol(K);

    XPoly lp = l.toPoly();
    RationalFunctionOnX f(K, num, lp * lp);
    return QuaternionSymbol(K, {SymbolSlot{basis.representative(eps), f}});
}

// Galois conjugation over the extension layer, applied coefficient-wise.
inline QuaternionSymbol conjugateSymbol(const QuaternionSymbol& A) {
    const FieldPtr& F = A.field();
    require(F->hasExt(), Errc::NoExtensionLayer, "conjugation needs an extension layer");
    auto conjPoly = [&](const XPoly& p) {
        XPoly out(5);
        for (const auto& t : p.terms()) out = out + XPoly::monomialTerm(t.first, t.second.conj(), 5);
        return out;
    };
    std::vector<SymbolSlot> slots;
    for (const auto& s : A.slots())
        slots.push_back(SymbolSlot{s.u.conj(),
                                   RationalFunctionOnX(F, conjPoly(s.f.num()), conjPoly(s.f.den()))});
    return QuaternionSymbol(F, std::move(slots));
}

// --- rewrite certificates ------------------------------------------------------

enum class RewriteRule {
    bilinearity,
    killSquare,
    normOfExtension,
    substituteRelation,
    constantSquare,
    swapNegation,
};

inline const char* ruleName(RewriteRule r) {
    switch (r) {
        case RewriteRule::bilinearity: return "bilinearity";
        case RewriteRule::killSquare: return "killSquare";
        case RewriteRule::normOfExtension: return "normOfExtension";
        case RewriteRule::substituteRelation: return "substituteRelation";
        case RewriteRule::constantSquare: return "constantSquare";
        case RewriteRule::swapNegation: return "swapNegation";
    }
    return "unknown";
}

// One checkable link in a simplification chain. Witnesses: killSquare carries
// the removed square factor, constantSquare the removed constant,
// normOfExtension the elements s, t with the slot a multiple of s^2 - u t^2
// (omitted witnesses trigger a small monomial search), substituteRelation the
// index of the defining quadric used.
struct RewriteStep {
    RewriteRule rule;
    QuaternionSymbol before, after;
    std::optional<RationalFunctionOnX> squareWitness;
    std::optional<FieldElement> constantWitness;
    std::optional<XPoly> witnessS, witnessT;
    int relationIndex = -1;

    static RewriteStep bilinearity(QuaternionSymbol b, QuaternionSymbol a) {
        return RewriteStep{RewriteRule::bilinearity, std::move(b), std::move(a),
                           std::nullopt, std::nullopt, std::nullopt, std::nullopt, -1};
    }
    static RewriteStep swapNegation(QuaternionSymbol b, QuaternionSymbol a) {
        return RewriteStep{RewriteRule::swapNegation, std::move(b), std::move(a),
                           std::nullopt, std::nullopt, std::nullopt, std::nullopt, -1};
    }
    static RewriteStep killSquare(QuaternionSymbol b, QuaternionSymbol a, RationalFunctionOnX w) {
        return RewriteStep{RewriteRule::killSquare, std::move(b), std::move(a),
                           std::move(w), std::nullopt, std::nullopt, std::nullopt, -1};
    }
    static RewriteStep constantSquare(QuaternionSymbol b, QuaternionSymbol a, FieldElement c) {
        return RewriteStep{RewriteRule::constantSquare, std::move(b), std::move(a),
                           std::nullopt, std::move(c), std::nullopt, std::nullopt, -1};
    }
    static RewriteStep normOfExtension(QuaternionSymbol b, QuaternionSymbol a,
                                       std::optional<XPoly> s = std::nullopt,
                                       std::optional<XPoly> t = std::nullopt) {
        return RewriteStep{RewriteRule::normOfExtension, std::move(b), std::move(a),
                           std::nullopt, std::nullopt, std::move(s), std::move(t), -1};
    }
    static RewriteStep substituteRelation(QuaternionSymbol b, QuaternionSymbol a, int relIdx) {
        return RewriteStep{RewriteRule::substituteRelation, std::move(b), std::move(a),
                           std::nullopt, std::nullopt, std::nullopt, std::nullopt, relIdx};
    }

    std::string describe() const {
        std::ostringstream os;
        os << ruleName(rule) << ": " << before.str() << "  ->  " << after.str();
        auto names = ambientNames();
        if (squareWitness) os << "  [factor " << squareWitness->str() << "]";
        if (constantWitness) os << "  [constant " << constantWitness->str() << "]";
        if (witnessS && witnessT)
            os << "  [s = " << witnessS->str(names) << ", t = " << witnessT->str(names) << "]";
        if (relationIndex >= 0) os << "  [relation " << relationIndex << "]";
        return os.str();
    }
};

namespace detail {

[[noreturn]] inline void rejectStep(size_t idx, const std::string& reason) {
    fail(Errc::StepRejected, "step " + std::to_string(idx) + ": " + reason);
}

// Monomial witness search for the norm rule: when the slot's odd part is a
// two-term form alpha*m1 + beta*m2 with square monomials, solve for constant
// multipliers making it s^2 - u t^2 times a square.
inline std::optional<std::pair<XPoly, XPoly>> searchNormWitness(const FieldElement& u,
                                                                const RationalFunctionOnX& g) {
    OddDecomposition d = oddDecompositionFn(g);
    if (d.odd.isConstant() || d.odd.termCount() != 2) return std::nullopt;
    const auto& t1 = d.odd.terms()[0];
    const auto& t2 = d.odd.terms()[1];
    Expo e1 = t1.first, e2 = t2.first;
    for (int k = 0; k < 5; ++k)
        if (e1[k] % 2 || e2[k] % 2) return std::nullopt;
    for (int k = 0; k < 5; ++k) {
        e1[k] /= 2;
        e2[k] /= 2;
    }
    // odd = m1 + beta*m2 (monic); content*odd should be s^2 - u t^2, with
    // either monomial playing the square role.
    if (auto delta = sqrtElement(d.content))
        if (auto gamma = sqrtElement(-(d.content * t2.second) / u))
            return std::make_pair(XPoly::monomialTerm(e1, *delta, 5),
                                  XPoly::monomialTerm(e2, *gamma, 5));
    if (auto delta = sqrtElement(d.content * t2.second))
        if (auto gamma = sqrtElement(-d.content / u))
            return std::make_pair(XPoly::monomialTerm(e2, *delta, 5),
                                  XPoly::monomialTerm(e1, *gamma, 5));
    return std::nullopt;
}

inline void checkNormSlot(const FieldElement& u, const RationalFunctionOnX& g, const XPoly& s,
                          const XPoly& t, size_t idx) {
    XPoly N = s * s - (t * t).scaled(u);
    if (N.isZero()) rejectStep(idx, "norm witnesses give the zero form");
    OddDecomposition dg = oddDecompositionFn(g);
    OddDecomposition d = oddDecomposition(dg.odd * N);
    if (!d.odd.isConstant() || !isSquare(dg.content * d.content))
        rejectStep(idx, "slot is not a square times the witnessed norm form");
}

inline void checkStep(const RewriteStep& st, const std::vector<QuadricMatrix>& relations,
                      size_t idx) {
    require(st.before.field()->sameAs(*st.after.field()), Errc::DomainMismatch,
            "step sides over different fields");
    switch (st.rule) {
        case RewriteRule::bilinearity:
        case RewriteRule::swapNegation: {
            if (!(st.before + st.after).isTrivial())
                rejectStep(idx, "sides are not formally equal under normalization");
            return;
        }
        case RewriteRule::killSquare: {
            if (!st.squareWitness) rejectStep(idx, "missing square factor witness");
            if (!isSquareFn(*st.squareWitness)) rejectStep(idx, "witnessed factor is not a square");
            if (!(st.before + st.after).isTrivial())
                rejectStep(idx, "sides do not differ by a square factor");
            return;
        }
        case RewriteRule::constantSquare: {
            if (!st.constantWitness) rejectStep(idx, "missing constant witness");
            if (st.constantWitness->isZero() || !isSquare(*st.constantWitness))
                rejectStep(idx, "witnessed constant is not a nonzero square");
            if (!(st.before + st.after).isTrivial())
                rejectStep(idx, "sides do not differ by a constant square");
            return;
        }
        case RewriteRule::normOfExtension: {
            QuaternionSymbol d = (st.before + st.after).normalized();
            if (d.slots().empty()) return;
            if (d.slots().size() != 1)
                rejectStep(idx, "sides differ in more than one slot");
            const SymbolSlot& s = d.slots()[0];
            if (st.witnessS && st.witnessT) {
                checkNormSlot(s.u, s.f, *st.witnessS, *st.witnessT, idx);
                return;
            }
            auto found = searchNormWitness(s.u, s.f);
            if (!found) rejectStep(idx, "no norm witnesses supplied and the search found none");
            checkNormSlot(s.u, s.f, found->first, found->second, idx);
            return;
        }
        case RewriteRule::substituteRelation: {
            if (st.relationIndex < 0 || st.relationIndex >= static_cast<int>(relations.size()))
                rejectStep(idx, "relation index out of range");
            const QuadricMatrix& rel = relations[static_cast<size_t>(st.relationIndex)];
            require(rel.field()->sameAs(*st.before.field()), Errc::DomainMismatch,
                    "relation over the wrong field");
            const auto& bs = st.before.slots();
            const auto& as = st.after.slots();
            if (bs.size() != as.size()) rejectStep(idx, "substitution changed the slot count");
            int diff = -1;
            for (size_t i = 0; i < bs.size(); ++i) {
                if (bs[i].u != as[i].u) rejectStep(idx, "substitution changed a first entry");
                if (bs[i].f == as[i].f) continue;
                if (diff >= 0) rejectStep(idx, "substitution changed more than one slot");
                diff = static_cast<int>(i);
            }
            if (diff < 0) return;
            RationalFunctionOnX delta = bs[static_cast<size_t>(diff)].f - as[static_cast<size_t>(diff)].f;
            XPoly q = rel.form();
            if (!divideExact(delta.num(), q).has_value())
                rejectStep(idx, "slot difference is not a multiple of the defining form");
            return;
        }
    }
    rejectStep(idx, "unknown rule");
}

}  // namespace detail

// Replays a certificate chain, checking every step in isolation and the
// continuity of the chain; returns the final symbol.
inline QuaternionSymbol verifySimplification(const std::vector<RewriteStep>& steps,
                                             const std::vector<QuadricMatrix>& relations) {
    require(!steps.empty(), Errc::ValidationError, "empty rewrite chain");
    for (size_t i = 0; i < steps.size(); ++i) {
        if (i > 0 && !(steps[i].before == steps[i - 1].after))
            detail::rejectStep(i, "chain discontinuity");
        detail::checkStep(steps[i], relations, i);
    }
    return steps.back().after;
}

// --- tame residues --------------------------------------------------------------

namespace detail {

// Gauss extension of v to K(x0..x4): minimum coefficient value.
inline long gaussValue(const XPoly& p, const Valuation& v) {
    require(!p.isZero(), Errc::ZeroElement, "gauss value of zero");
    bool first = true;
    long m = 0;
    for (const auto& t : p.terms()) {
        long val = v.value(t.second);
        m = first ? val : std::min(m, val);
        first = false;
    }
    return m;
}

// Coefficient-wise reduction of pi^{-m} p at v; nonzero by choice of m.
inline XPoly reduceAtGauss(const XPoly& p, const Valuation& v, long m) {
    FieldElement pi = v.uniformizer();
    FieldElement scale = FieldElement::one(v.field());
    for (long k = 0; k < m; ++k) scale = scale / pi;
    for (long k = 0; k > m; --k) scale = scale * pi;
    const FieldPtr& R = v.residueField();
    XPoly out(5);
    for (const auto& t : p.terms()) {
        FieldElement c = t.second * scale;
        if (v.value(c) > 0) continue;
        out = out + XPoly::monomialTerm(t.first, v.reduceUnit(c), 5);
    }
    require(!out.isZero(), Errc::IndeterminateReduction, "slot entry reduced to zero at " + v.name());
    (void)R;
    return out;
}

// Class of the unit part of f at v as a residue field constant.
inline FieldElement reducedClassConstant(const RationalFunctionOnX& f, const Valuation& v) {
    long mn = gaussValue(f.num(), v);
    long md = gaussValue(f.den(), v);
    XPoly rn = reduceAtGauss(f.num(), v, mn);
    XPoly rd = reduceAtGauss(f.den(), v, md);
    OddDecomposition d = oddDecomposition(rn * rd);
    require(d.odd.isConstant(), Errc::Unsupported,
            "residue with nonconstant polynomial content at " + v.name());
    return d.content;
}

}  // namespace detail

// Tame residue of the symbol at v: per slot (u, f) the class of
// (-1)^{v(u)v(f)} u^{v(f)} f^{-v(u)} in the residue field, summed over slots.
inline SquareClass tameResidue(const QuaternionSymbol& A, const Valuation& v,
                               AtomBasis& residueBasis) {
    require(v.field()->sameAs(*A.field()), Errc::DomainMismatch,
            "valuation lives on a different field");
    require(residueBasis.field()->sameAs(*v.residueField()), Errc::DomainMismatch,
            "basis is not over the residue field");
    const FieldPtr& R = v.residueField();
    FieldElement acc = FieldElement::one(R);
    FieldElement pi = v.uniformizer();
    for (const auto& s : A.slots()) {
        long m = v.value(s.u);
        long n = detail::gaussValue(s.f.num(), v) - detail::gaussValue(s.f.den(), v);
        if (n % 2) {
            FieldElement u0 = s.u;
            for (long k = 0; k < m; ++k) u0 = u0 / pi;
            for (long k = 0; k > m; --k) u0 = u0 * pi;
            acc = acc * v.reduceUnit(u0);
        }
        if (m % 2) acc = acc * detail::reducedClassConstant(s.f, v);
        if ((m * n) % 2) acc = -acc;
    }
    return residueBasis.classOf(acc);
}

}  // namespace dp4
