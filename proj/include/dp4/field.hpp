#pragma once

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dp4/constant.hpp"
#include "dp4/error.hpp"
#include "dp4/polynomial.hpp"

namespace dp4 {

using CPoly = Polynomial<Constant>;

// How constants of Q(i) behave under square-class tests. In cyclotomic mode
// the ground field is closed enough that every nonzero constant is treated as
// a square; gaussian mode tests squares exactly in Q(i).
enum class ConstantMode { cyclotomic, gaussian };

inline bool constantIsSquare(const Constant& c, ConstantMode mode) {
    if (c.isZero()) return false;
    return mode == ConstantMode::cyclotomic || c.isSquareQi();
}

inline std::string modeName(ConstantMode m) {
    return m == ConstantMode::cyclotomic ? "cyclotomic" : "gaussian";
}

class FieldDescriptor;
using FieldPtr = std::shared_ptr<const FieldDescriptor>;

// A field in the tower: Q(i)(params), optionally extended by one square root.
// The extension generator is dNum/dDen over the base layer; paramIndex >= 0
// marks the special case d = single parameter, which admits a flattened
// polynomial model with s = sqrt(d) as an extra variable.
class FieldDescriptor {
public:
    struct Ext {
        CPoly dNum, dDen;
        std::string label;
        int paramIndex;
    };

    ConstantMode mode;
    std::vector<std::string> params;
    std::optional<Ext> ext;
    FieldPtr base;  // same params, no ext; null when ext is absent

    int paramIndex(const std::string& name) const {
        for (size_t k = 0; k < params.size(); ++k)
            if (params[k] == name) return static_cast<int>(k);
        return -1;
    }

    int nparams() const { return static_cast<int>(params.size()); }
    bool hasExt() const { return ext.has_value(); }
    bool extIsParam() const { return ext && ext->paramIndex >= 0; }

    std::string extName() const {
        require(ext.has_value(), Errc::NoExtensionLayer, "field has no extension layer");
        return "sqrt(" + ext->label + ")";
    }

    // Variable count of the flattened polynomial model (s appended last).
    int flatVars() const { return nparams() + (extIsParam() ? 1 : 0); }

    std::vector<std::string> flatNames() const {
        std::vector<std::string> n = params;
        if (extIsParam()) n.push_back(extName());
        return n;
    }

    bool sameAs(const FieldDescriptor& o) const {
        if (mode != o.mode || params != o.params || ext.has_value() != o.ext.has_value())
            return false;
        if (ext) {
            if (!(ext->dNum == o.ext->dNum) || !(ext->dDen == o.ext->dDen)) return false;
        }
        return true;
    }

    std::string str() const {
        std::ostringstream os;
        os << modeName(mode) << "(";
        for (size_t k = 0; k < params.size(); ++k) os << (k ? "," : "") << params[k];
        os << ")";
        if (ext) os << "(" << extName() << ")";
        return os.str();
    }
};

inline FieldPtr makeField(ConstantMode mode, std::vector<std::string> params) {
    auto F = std::make_shared<FieldDescriptor>();
    F->mode = mode;
    F->params = std::move(params);
    return F;
}

inline FieldPtr extendFieldByParam(const FieldPtr& base, const std::string& param) {
    require(base && !base->hasExt(), Errc::ValidationError,
            "extension must sit on an unextended base field");
    int idx = base->paramIndex(param);
    require(idx >= 0, Errc::ValidationError, "unknown extension parameter: " + param);
    auto F = std::make_shared<FieldDescriptor>(*base);
    int n = base->nparams();
    Constant one(1);
    F->ext = FieldDescriptor::Ext{CPoly::variable(idx, one, n), CPoly::constant(one, n), param,
                                  idx};
    F->base = base;
    return F;
}

inline FieldPtr extendFieldByPoly(const FieldPtr& base, CPoly dNum, CPoly dDen,
                                  std::string label) {
    require(base && !base->hasExt(), Errc::ValidationError,
            "extension must sit on an unextended base field");
    require(!dNum.isZero() && !dDen.isZero(), Errc::ZeroElement, "zero extension generator");
    auto F = std::make_shared<FieldDescriptor>(*base);
    F->ext = FieldDescriptor::Ext{std::move(dNum), std::move(dDen), std::move(label), -1};
    F->base = base;
    return F;
}

// Reduced fraction of parameter polynomials; denominator monic, never zero.
struct RatPart {
    CPoly num, den;

    static RatPart make(CPoly n, CPoly d) {
        require(!d.isZero(), Errc::ZeroElement, "zero denominator");
        RatPart r{std::move(n), std::move(d)};
        r.reduce();
        return r;
    }
    static RatPart zero(int nvars) {
        return {CPoly(nvars), CPoly::constant(Constant(1), nvars)};
    }

    bool isZero() const { return num.isZero(); }

    void reduce() {
        if (num.isZero()) {
            den = CPoly::constant(Constant(1), den.nvars());
            return;
        }
        CPoly g = polyGcd(num, den);
        if (!g.isConstant()) {
            num = *divideExact(num, g);
            den = *divideExact(den, g);
        }
        Constant c = den.leadingCoeff().inverse();
        num = num.scaled(c);
        den = den.scaled(c);
    }

    RatPart operator+(const RatPart& o) const {
        return make(num * o.den + o.num * den, den * o.den);
    }
    RatPart operator-(const RatPart& o) const {
        return make(num * o.den - o.num * den, den * o.den);
    }
    RatPart operator*(const RatPart& o) const { return make(num * o.num, den * o.den); }
    RatPart operator-() const { return {-num, den}; }
    RatPart inverse() const {
        require(!num.isZero(), Errc::ZeroElement, "inverse of zero");
        return make(den, num);
    }

    bool operator==(const RatPart& o) const { return num == o.num && den == o.den; }
};

// Element of a tower field: lo + hi * sqrt(d). The hi part is identically
// zero whenever the descriptor has no extension layer.
class FieldElement {
public:
    explicit FieldElement(FieldPtr F)
        : F_(std::move(F)), lo_(RatPart::zero(F_->nparams())), hi_(RatPart::zero(F_->nparams())) {}

    FieldElement(FieldPtr F, RatPart lo, RatPart hi)
        : F_(std::move(F)), lo_(std::move(lo)), hi_(std::move(hi)) {
        require(hi_.isZero() || F_->hasExt(), Errc::NoExtensionLayer,
                "nonzero ext component over unextended field");
    }

    static FieldElement zero(const FieldPtr& F) { return FieldElement(F); }
    static FieldElement one(const FieldPtr& F) { return fromConstant(F, Constant(1)); }
    static FieldElement fromConstant(const FieldPtr& F, const Constant& c) {
        int n = F->nparams();
        return FieldElement(F, RatPart{CPoly::constant(c, n), CPoly::constant(Constant(1), n)},
                            RatPart::zero(n));
    }
    static FieldElement fromPoly(const FieldPtr& F, CPoly num) {
        int n = F->nparams();
        require(num.nvars() == n, Errc::Internal, "fromPoly arity");
        return FieldElement(F, RatPart::make(std::move(num), CPoly::constant(Constant(1), n)),
                            RatPart::zero(n));
    }
    static FieldElement fromFraction(const FieldPtr& F, CPoly num, CPoly den) {
        int n = F->nparams();
        return FieldElement(F, RatPart::make(std::move(num), std::move(den)), RatPart::zero(n));
    }
    static FieldElement param(const FieldPtr& F, const std::string& name) {
        int idx = F->paramIndex(name);
        require(idx >= 0, Errc::ValidationError, "unknown parameter: " + name);
        return fromPoly(F, CPoly::variable(idx, Constant(1), F->nparams()));
    }
    // sqrt(d), the extension generator.
    static FieldElement extGenerator(const FieldPtr& F) {
        require(F->hasExt(), Errc::NoExtensionLayer, "extGenerator on unextended field");
        int n = F->nparams();
        FieldElement r(F);
        r.hi_ = RatPart{CPoly::constant(Constant(1), n), CPoly::constant(Constant(1), n)};
        return r;
    }

    const FieldPtr& field() const { return F_; }
    const RatPart& lo() const { return lo_; }
    const RatPart& hi() const { return hi_; }

    bool isZero() const { return lo_.isZero() && hi_.isZero(); }
    bool isOne() const {
        return hi_.isZero() && lo_.den.isConstant() && !lo_.num.isZero() && lo_.num.isConstant() &&
               lo_.num.leadingCoeff().isOne() && lo_.den.leadingCoeff().isOne();
    }

    FieldElement operator+(const FieldElement& o) const {
        checkField(o);
        return FieldElement(F_, lo_ + o.lo_, hi_ + o.hi_);
    }
    FieldElement operator-(const FieldElement& o) const {
        checkField(o);
        return FieldElement(F_, lo_ - o.lo_, hi_ - o.hi_);
    }
    FieldElement operator-() const { return FieldElement(F_, -lo_, -hi_); }

    FieldElement operator*(const FieldElement& o) const {
        checkField(o);
        if (hi_.isZero() && o.hi_.isZero()) return FieldElement(F_, lo_ * o.lo_, hi_);
        RatPart d = extRat();
        RatPart lo = lo_ * o.lo_ + hi_ * o.hi_ * d;
        RatPart hi = lo_ * o.hi_ + hi_ * o.lo_;
        return FieldElement(F_, std::move(lo), std::move(hi));
    }

    FieldElement inverse() const {
        require(!isZero(), Errc::ZeroElement, "inverse of zero field element");
        if (hi_.isZero()) return FieldElement(F_, lo_.inverse(), hi_);
        RatPart n = lo_ * lo_ - hi_ * hi_ * extRat();
        require(!n.isZero(), Errc::Internal, "norm vanished: extension generator is a square");
        RatPart ni = n.inverse();
        return FieldElement(F_, lo_ * ni, -(hi_ * ni));
    }
    FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }

    FieldElement scaledConstant(const Constant& c) const {
        int n = F_->nparams();
        CPoly cp = CPoly::constant(c, n);
        return FieldElement(F_, RatPart::make(lo_.num * cp, lo_.den),
                            RatPart::make(hi_.num * cp, hi_.den));
    }

    // Galois conjugate over the base layer: sqrt(d) -> -sqrt(d).
    FieldElement conj() const {
        require(F_->hasExt(), Errc::NoExtensionLayer, "conjugate over unextended field");
        return FieldElement(F_, lo_, -hi_);
    }

    // Norm to the base layer, as an element of the base descriptor.
    FieldElement normToBase() const {
        require(F_->hasExt(), Errc::NoExtensionLayer, "norm over unextended field");
        RatPart n = lo_ * lo_ - hi_ * hi_ * extRat();
        return FieldElement(F_->base, n, RatPart::zero(F_->nparams()));
    }

    // Inclusion of a base-layer element into this descriptor's field.
    static FieldElement lift(const FieldPtr& F, const FieldElement& x) {
        require(!x.field()->hasExt(), Errc::DomainMismatch, "lift expects a base-layer element");
        require(x.field()->params == F->params && x.field()->mode == F->mode,
                Errc::DomainMismatch, "lift between unrelated fields");
        return FieldElement(F, x.lo_, RatPart::zero(F->nparams()));
    }

    bool operator==(const FieldElement& o) const {
        return F_->sameAs(*o.F_) && lo_ == o.lo_ && hi_ == o.hi_;
    }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    bool isCompositeLiteral() const {
        if (!hi_.isZero()) return true;
        if (!lo_.den.isConstant()) return true;
        if (lo_.num.termCount() >= 2) return true;
        if (lo_.num.isZero()) return false;
        return lo_.num.leadingCoeff().isCompositeLiteral();
    }

    std::string str() const {
        const auto& names = F_->params;
        auto part = [&](const RatPart& r) {
            std::string n = r.num.str(names);
            if (r.den.isConstant() && r.den.leadingCoeff().isOne()) return n;
            std::string d = r.den.str(names);
            std::string ns = r.num.termCount() > 1 ? "(" + n + ")" : n;
            return ns + "/(" + d + ")";
        };
        if (hi_.isZero()) return part(lo_);
        std::string h;
        if (hi_.num.isConstant() && hi_.den.isConstant() && hi_.num.leadingCoeff().isOne())
            h = F_->extName();
        else
            h = "(" + part(hi_) + ")*" + F_->extName();
        if (lo_.isZero()) return h;
        return part(lo_) + " + " + h;
    }

private:
    RatPart extRat() const {
        require(F_->hasExt(), Errc::NoExtensionLayer, "extension generator absent");
        return RatPart::make(F_->ext->dNum, F_->ext->dDen);
    }
    void checkField(const FieldElement& o) const {
        require(F_->sameAs(*o.F_), Errc::DomainMismatch, "mixed field descriptors");
    }

    FieldPtr F_;
    RatPart lo_, hi_;
};

inline FieldElement oneLike(const FieldElement& x) { return FieldElement::one(x.field()); }
inline FieldElement mulInt(const FieldElement& x, long n) {
    return x.scaledConstant(Constant(n));
}

// --- flattened polynomial model -------------------------------------------
//
// For a base field the model is Q(i)[params]; for an extension by a single
// parameter p the model is Q(i)[params, s] with p identified with s^2. The
// parameter slot p keeps degree zero after flattening.

struct FlatFraction {
    CPoly num, den;  // reduced, den monic
};

inline CPoly liftVars(const CPoly& p, int flatVars) {
    CPoly out(flatVars);
    for (const auto& t : p.terms()) {
        Expo e = t.first;
        e.resize(flatVars, 0);
        out = out + CPoly::monomialTerm(e, t.second, flatVars);
    }
    return out;
}

inline FlatFraction reduceFlat(CPoly num, CPoly den) {
    require(!den.isZero(), Errc::ZeroElement, "flat fraction with zero denominator");
    if (num.isZero()) return {CPoly(num.nvars()), CPoly::constant(Constant(1), den.nvars())};
    CPoly g = polyGcd(num, den);
    if (!g.isConstant()) {
        num = *divideExact(num, g);
        den = *divideExact(den, g);
    }
    Constant c = den.leadingCoeff().inverse();
    return {num.scaled(c), den.scaled(c)};
}

// Flatten lo + hi*sqrt(p) into Q(i)[params, s]/(p = s^2). Requires the field
// to be unextended or extended by a single parameter.
inline FlatFraction flattenElement(const FieldElement& x) {
    const FieldDescriptor& F = *x.field();
    int n = F.nparams();
    if (!F.hasExt()) {
        return reduceFlat(x.lo().num, x.lo().den);
    }
    require(F.extIsParam(), Errc::Unsupported,
            "flattened model needs a single-parameter extension generator");
    int fv = n + 1;
    int a = F.ext->paramIndex;
    CPoly s2 = CPoly::variable(fv - 1, Constant(1), fv, 2);
    auto conv = [&](const CPoly& p) { return liftVars(p, fv).substitute(a, s2); };
    CPoly ln = conv(x.lo().num), ld = conv(x.lo().den);
    CPoly hn = conv(x.hi().num), hd = conv(x.hi().den);
    CPoly s = CPoly::variable(fv - 1, Constant(1), fv);
    return reduceFlat(ln * hd + hn * ld * s, ld * hd);
}

// Inverse of flattenElement: split by s-parity of a flat polynomial.
inline FieldElement unflattenElement(const FieldPtr& F, const FlatFraction& f) {
    int n = F->nparams();
    if (!F->hasExt()) {
        require(f.num.nvars() == n && f.den.nvars() == n, Errc::Internal, "unflatten arity");
        return FieldElement(F, RatPart::make(f.num, f.den), RatPart::zero(n));
    }
    require(F->extIsParam(), Errc::Unsupported, "unflatten needs a parameter extension");
    int fv = n + 1;
    int a = F->ext->paramIndex;
    int s = fv - 1;
    // Clear s from the denominator: multiply by the s-conjugate.
    auto sconj = [&](const CPoly& p) {
        CPoly out(fv);
        for (const auto& t : p.terms()) {
            Constant c = (t.first[s] % 2) ? -t.second : t.second;
            out = out + CPoly::monomialTerm(t.first, c, fv);
        }
        return out;
    };
    CPoly num = f.num * sconj(f.den);
    CPoly den = f.den * sconj(f.den);
    auto splitBack = [&](const CPoly& p, bool odd) {
        CPoly out(n);
        for (const auto& t : p.terms()) {
            if ((t.first[s] % 2 != 0) != odd) continue;
            Expo e(t.first.begin(), t.first.begin() + n);
            e[a] += (t.first[s] - (odd ? 1 : 0)) / 2;
            out = out + CPoly::monomialTerm(e, t.second, n);
        }
        return out;
    };
    CPoly denBase = splitBack(den, false);
    require(splitBack(den, true).isZero(), Errc::Internal, "unflatten: denominator not s-even");
    return FieldElement(F, RatPart::make(splitBack(num, false), denBase),
                        RatPart::make(splitBack(num, true), denBase));
}

// --- exact square tests -----------------------------------------------------

inline std::optional<FieldElement> sqrtElement(const FieldElement& x);

// Exact square test in the element's own field.
inline bool isSquare(const FieldElement& x) {
    if (x.isZero()) return true;
    const FieldDescriptor& F = *x.field();
    if (!F.hasExt() || F.extIsParam()) {
        FlatFraction f = flattenElement(x);
        auto dec = squareDecomposition(f.num * f.den);
        return dec && constantIsSquare(dec->first, F.mode);
    }
    // General quadratic layer: x = lo + hi*sqrt(d).
    FieldElement d(F.base, RatPart::make(F.ext->dNum, F.ext->dDen),
                   RatPart::zero(F.nparams()));
    FieldElement lo(F.base, x.lo(), RatPart::zero(F.nparams()));
    if (x.hi().isZero()) {
        return isSquare(lo) || isSquare(lo * d);
    }
    FieldElement n = x.normToBase();
    if (!isSquare(n)) return false;
    auto m = sqrtElement(n);
    if (!m) {
        // In gaussian mode a square always has a representable root, so this
        // branch is the honest boundary of the cyclotomic constant model.
        fail(Errc::Unsupported,
             "square test needs a representable sqrt of " + n.str() + " in the base layer");
    }
    FieldElement half = FieldElement::fromConstant(x.field()->base, Constant(mpq_class(1, 2)));
    FieldElement zp = (lo + *m) * half;
    FieldElement zm = (lo - *m) * half;
    return isSquare(zp) || isSquare(zm);
}

// Concrete square root within the representable model, when one exists.
inline std::optional<FieldElement> sqrtElement(const FieldElement& x) {
    const FieldPtr& F = x.field();
    if (x.isZero()) return FieldElement::zero(F);
    if (!F->hasExt() || F->extIsParam()) {
        FlatFraction f = flattenElement(x);
        auto dec = squareDecomposition(f.num * f.den);
        if (!dec) return std::nullopt;
        auto cr = dec->first.sqrtQi();
        if (!cr) return std::nullopt;  // square class may be trivial yet not representable
        FieldElement r = unflattenElement(F, reduceFlat(dec->second.scaled(*cr), f.den));
        return r;
    }
    FieldElement d(F->base, RatPart::make(F->ext->dNum, F->ext->dDen),
                   RatPart::zero(F->nparams()));
    FieldElement lo(F->base, x.lo(), RatPart::zero(F->nparams()));
    FieldElement hi(F->base, x.hi(), RatPart::zero(F->nparams()));
    FieldElement half = FieldElement::fromConstant(F->base, Constant(mpq_class(1, 2)));
    if (x.hi().isZero()) {
        if (auto r = sqrtElement(lo)) return FieldElement(F, r->lo(), RatPart::zero(F->nparams()));
        if (auto r = sqrtElement(lo / d)) {
            // sqrt(lo) = sqrt(lo/d) * sqrt(d)
            return FieldElement(F, RatPart::zero(F->nparams()), r->lo());
        }
        return std::nullopt;
    }
    FieldElement n = x.normToBase();
    auto m = sqrtElement(n);
    if (!m) return std::nullopt;
    for (int sign = 0; sign < 2; ++sign) {
        FieldElement z = (sign ? lo - *m : lo + *m) * half;
        if (auto p = sqrtElement(z)) {
            if (p->isZero()) continue;
            FieldElement q = hi * half / *p;
            FieldElement cand(F, p->lo(), q.lo());
            if (cand * cand == x) return cand;
        }
    }
    return std::nullopt;
}

}  // namespace dp4
