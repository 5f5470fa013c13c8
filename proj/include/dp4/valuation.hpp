#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dp4/error.hpp"
#include "dp4/field.hpp"

namespace dp4 {

namespace detail {

// Minimal exponent of variable v across terms: the v-adic order of a
// polynomial when v itself is the uniformizer.
inline long varOrder(const CPoly& p, int v) {
    require(!p.isZero(), Errc::ZeroElement, "order of zero polynomial");
    long m = -1;
    for (const auto& t : p.terms()) {
        long e = t.first[v];
        m = (m < 0) ? e : std::min(m, e);
    }
    return m;
}

inline CPoly dropVarPower(const CPoly& p, int v, long k) {
    CPoly out(p.nvars());
    for (const auto& t : p.terms()) {
        Expo e = t.first;
        require(static_cast<long>(e[v]) >= k, Errc::Internal, "dropVarPower underflow");
        e[v] -= static_cast<unsigned>(k);
        out = out + CPoly::monomialTerm(e, t.second, p.nvars());
    }
    return out;
}

inline CPoly remapVars(const CPoly& p, const std::vector<int>& map, int newVars) {
    CPoly out(newVars);
    for (const auto& t : p.terms()) {
        Expo e(newVars, 0);
        for (size_t k = 0; k < t.first.size(); ++k) {
            if (t.first[k] == 0) continue;
            require(map[k] >= 0, Errc::Internal, "remapVars drops a live variable");
            e[map[k]] += t.first[k];
        }
        out = out + CPoly::monomialTerm(e, t.second, newVars);
    }
    return out;
}

}  // namespace detail

// Discrete valuation on the analysis field, normalized so the uniformizer
// has value 1. Three families are supported: a parameter p = 0, the
// extension generator sqrt(d) = 0 (d a parameter), and a general prime atom
// that is linear in one of the parameters.
class Valuation {
public:
    enum class Kind { param, extGen, atom };

    static Valuation atParam(const FieldPtr& K, const std::string& param) {
        int idx = K->paramIndex(param);
        require(idx >= 0, Errc::ValidationError, "unknown parameter: " + param);
        require(!(K->extIsParam() && K->ext->paramIndex == idx), Errc::ValidationError,
                "at " + param + " = 0 the extension generator ramifies; use the sqrt valuation");
        require(!K->hasExt() || K->extIsParam(), Errc::Unsupported,
                "valuations over a general extension layer are not supported");
        Valuation v;
        v.kind_ = Kind::param;
        v.K_ = K;
        v.paramIdx_ = idx;
        v.buildResidueDroppingParam(idx, true);
        return v;
    }

    static Valuation atExtGen(const FieldPtr& K) {
        require(K->hasExt(), Errc::NoExtensionLayer, "field has no extension layer");
        require(K->extIsParam(), Errc::Unsupported,
                "sqrt valuation needs a single-parameter generator");
        Valuation v;
        v.kind_ = Kind::extGen;
        v.K_ = K;
        v.paramIdx_ = K->ext->paramIndex;
        v.buildResidueDroppingParam(v.paramIdx_, false);
        return v;
    }

    static Valuation atAtom(const FieldPtr& K, const CPoly& atom) {
        require(!K->hasExt() || K->extIsParam(), Errc::Unsupported,
                "valuations over a general extension layer are not supported");
        require(atom.nvars() == K->nparams(), Errc::DomainMismatch, "atom lives in wrong ring");
        require(!atom.isZero() && !atom.isConstant(), Errc::ValidationError,
                "atom must be nonconstant");
        // A single variable is the parameter case.
        if (atom.termCount() == 1 && atom.totalDegree() == 1) {
            for (int k = 0; k < atom.nvars(); ++k)
                if (atom.degreeIn(k) == 1) return atParam(K, K->params[k]);
        }
        int ext = K->extIsParam() ? K->ext->paramIndex : -1;
        int pivot = -1;
        for (int k = 0; k < atom.nvars(); ++k) {
            if (atom.degreeIn(k) != 1) continue;
            // the coefficient of the pivot must not involve the pivot (linearity)
            if (pivot < 0 || (pivot == ext && k != ext)) pivot = k;
        }
        require(pivot >= 0, Errc::Unsupported, "atom is not linear in any parameter");
        Valuation v;
        v.kind_ = Kind::atom;
        v.K_ = K;
        v.atom_ = atom.normalized();
        v.pivot_ = pivot;
        auto u = atom.univariate(pivot);
        require(u.size() == 2, Errc::Internal, "atom univariate split");
        v.pivotA_ = u[1];  // atom = A*pivot + B
        v.pivotB_ = u[0];
        v.buildResidueForAtom();
        return v;
    }

    Kind kind() const { return kind_; }
    const FieldPtr& field() const { return K_; }
    const FieldPtr& residueField() const { return residue_; }

    FieldElement uniformizer() const {
        switch (kind_) {
            case Kind::param:
                return FieldElement::param(K_, K_->params[paramIdx_]);
            case Kind::extGen:
                return FieldElement::extGenerator(K_);
            case Kind::atom:
                return FieldElement::fromPoly(K_, atom_);
        }
        fail(Errc::Internal, "uniformizer");
    }

    std::string name() const {
        switch (kind_) {
            case Kind::param:
                return K_->params[paramIdx_] + " = 0";
            case Kind::extGen:
                return K_->extName() + " = 0";
            case Kind::atom:
                return atom_.str(K_->params) + " = 0";
        }
        fail(Errc::Internal, "name");
    }

    long value(const FieldElement& x) const {
        require(!x.isZero(), Errc::ZeroElement, "valuation of zero");
        require(x.field()->sameAs(*K_), Errc::DomainMismatch, "element from another field");
        switch (kind_) {
            case Kind::param: {
                std::optional<long> vlo = x.lo().isZero()
                                              ? std::nullopt
                                              : std::optional<long>(partValue(x.lo()));
                std::optional<long> vhi = x.hi().isZero()
                                              ? std::nullopt
                                              : std::optional<long>(partValue(x.hi()));
                if (!vlo) return *vhi;
                if (!vhi) return *vlo;
                return std::min(*vlo, *vhi);
            }
            case Kind::extGen: {
                FlatFraction f = flattenElement(x);
                int s = K_->flatVars() - 1;
                return detail::varOrder(f.num, s) - detail::varOrder(f.den, s);
            }
            case Kind::atom: {
                std::optional<long> vlo = x.lo().isZero()
                                              ? std::nullopt
                                              : std::optional<long>(partValue(x.lo()));
                std::optional<long> vhi = x.hi().isZero()
                                              ? std::nullopt
                                              : std::optional<long>(partValue(x.hi()));
                if (!vlo) return *vhi;
                if (!vhi) return *vlo;
                return std::min(*vlo, *vhi);
            }
        }
        fail(Errc::Internal, "value");
    }

    // Image of a unit (value 0) in the residue field.
    FieldElement reduceUnit(const FieldElement& x) const {
        require(value(x) == 0, Errc::IndeterminateReduction,
                "reduction needs a unit at " + name());
        switch (kind_) {
            case Kind::param:
            case Kind::atom: {
                FieldElement lo = reducePart(x.lo());
                FieldElement hi = reducePart(x.hi());
                if (!K_->hasExt()) return lo;
                require(residue_->hasExt(), Errc::Internal, "residue lost its extension");
                return FieldElement(residue_, lo.lo(), hi.lo());
            }
            case Kind::extGen: {
                FlatFraction f = flattenElement(x);
                int fv = K_->flatVars();
                int s = fv - 1;
                require(detail::varOrder(f.den, s) == 0, Errc::Internal, "unit with s in den");
                auto setS0 = [&](const CPoly& p) {
                    return p.substitute(s, CPoly(fv));
                };
                CPoly num = setS0(f.num), den = setS0(f.den);
                require(!den.isZero(), Errc::Internal, "reduction denominator vanished");
                std::vector<int> map(fv, -1);
                int j = 0;
                for (int k = 0; k < K_->nparams(); ++k)
                    if (k != paramIdx_) map[k] = j++;
                return FieldElement(residue_,
                                    RatPart::make(detail::remapVars(num, map, j),
                                                  detail::remapVars(den, map, j)),
                                    RatPart::zero(j));
            }
        }
        fail(Errc::Internal, "reduceUnit");
    }

private:
    // value on one tower component, given as a reduced fraction
    long partValue(const RatPart& r) const {
        if (kind_ == Kind::param)
            return detail::varOrder(r.num, paramIdx_) - detail::varOrder(r.den, paramIdx_);
        CPoly n = r.num, d = r.den;
        return removeFactor(n, atom_) - removeFactor(d, atom_);
    }

    // Reduce a base-layer fraction with nonnegative part value; positive
    // value reduces to zero.
    FieldElement reducePart(const RatPart& r) const {
        FieldPtr rbase = residue_->hasExt() ? residue_->base : residue_;
        if (r.isZero()) return FieldElement::zero(rbase);
        long v = partValue(r);
        require(v >= 0, Errc::Internal, "part with negative value in a unit");
        if (v > 0) return FieldElement::zero(rbase);
        int n = K_->nparams();
        CPoly num = r.num, den = r.den;
        if (kind_ == Kind::param) {
            long mn = detail::varOrder(num, paramIdx_);
            long md = detail::varOrder(den, paramIdx_);
            long m = std::min(mn, md);
            num = detail::dropVarPower(num, paramIdx_, m);
            den = detail::dropVarPower(den, paramIdx_, m);
            CPoly z(n);
            num = num.substitute(paramIdx_, z);
            den = den.substitute(paramIdx_, z);
            require(!den.isZero(), Errc::Internal, "reduction denominator vanished");
            std::vector<int> map(n, -1);
            int j = 0;
            for (int k = 0; k < n; ++k)
                if (k != paramIdx_) map[k] = j++;
            return FieldElement(rbase,
                                RatPart::make(detail::remapVars(num, map, j),
                                              detail::remapVars(den, map, j)),
                                RatPart::zero(j));
        }
        // atom kind: strip atom powers, then substitute pivot = -B/A by
        // homogenizing with A powers.
        CPoly rem = num;
        removeFactor(rem, atom_);
        num = rem;
        rem = den;
        removeFactor(rem, atom_);
        den = rem;
        auto subst = [&](const CPoly& p) {
            auto u = p.univariate(pivot_);
            // sum c_i * (-B)^i * A^(deg - i), denominator A^deg
            int deg = static_cast<int>(u.size()) - 1;
            CPoly acc(n);
            CPoly negB = -pivotB_;
            for (int i = 0; i <= deg; ++i) {
                CPoly term = u[i];
                for (int t = 0; t < i; ++t) term = term * negB;
                for (int t = i; t < deg; ++t) term = term * pivotA_;
                acc = acc + term;
            }
            return std::pair<CPoly, int>(acc, deg);
        };
        auto [nn, dn] = subst(num);
        auto [nd, dd] = subst(den);
        require(!nd.isZero() && !nn.isZero(), Errc::Internal, "atom reduction vanished");
        // balance the A^deg denominators
        for (int t = dn; t < dd; ++t) nn = nn * pivotA_;
        for (int t = dd; t < dn; ++t) nd = nd * pivotA_;
        std::vector<int> map(n, -1);
        int j = 0;
        for (int k = 0; k < n; ++k)
            if (k != pivot_) map[k] = j++;
        return FieldElement(rbase,
                            RatPart::make(detail::remapVars(nn, map, j),
                                          detail::remapVars(nd, map, j)),
                            RatPart::zero(j));
    }

    void buildResidueDroppingParam(int idx, bool keepExt) {
        std::vector<std::string> params;
        for (int k = 0; k < K_->nparams(); ++k)
            if (k != idx) params.push_back(K_->params[k]);
        FieldPtr base = makeField(K_->mode, params);
        if (keepExt && K_->hasExt()) {
            require(K_->extIsParam() && K_->ext->paramIndex != idx, Errc::Internal,
                    "residue extension parameter collision");
            residue_ = extendFieldByParam(base, K_->ext->label);
        } else {
            residue_ = base;
        }
    }

    void buildResidueForAtom() {
        int n = K_->nparams();
        std::vector<std::string> params;
        for (int k = 0; k < n; ++k)
            if (k != pivot_) params.push_back(K_->params[k]);
        FieldPtr base = makeField(K_->mode, params);
        if (!K_->hasExt()) {
            residue_ = base;
            return;
        }
        int ext = K_->ext->paramIndex;
        std::vector<int> map(n, -1);
        int j = 0;
        for (int k = 0; k < n; ++k)
            if (k != pivot_) map[k] = j++;
        if (ext != pivot_) {
            // sqrt(d) survives as a parameter extension; exactness of the
            // minimum formula needs d nonsquare in the residue, automatic
            // for an untouched parameter.
            residue_ = extendFieldByParam(base, K_->ext->label);
            return;
        }
        // The extension parameter is being substituted: the residue field is
        // base(sqrt(-B/A)).
        CPoly dn = detail::remapVars(-pivotB_, map, j);
        CPoly dd = detail::remapVars(pivotA_, map, j);
        FieldElement dval = FieldElement::fromFraction(base, dn, dd);
        require(!dval.isZero(), Errc::Unsupported, "degenerate substituted generator");
        require(!isSquare(dval), Errc::Unsupported,
                "substituted extension generator becomes a square in the residue field");
        residue_ = extendFieldByPoly(base, dn, dd, "(" + dn.str(params) + ")/(" +
                                                       dd.str(params) + ")");
    }

    Kind kind_ = Kind::param;
    FieldPtr K_;
    int paramIdx_ = -1;                   // param / extGen kinds
    CPoly atom_{0}, pivotA_{0}, pivotB_{0};  // atom kind: atom = A*pivot + B
    int pivot_ = -1;
    FieldPtr residue_;
};

inline long valuationOf(const FieldElement& x, const Valuation& v) { return v.value(x); }

}  // namespace dp4
