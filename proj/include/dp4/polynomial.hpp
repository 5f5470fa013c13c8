#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dp4/error.hpp"

namespace dp4 {

// Exponent vector; length is the ambient variable count.
using Expo = std::vector<unsigned>;

inline unsigned expoTotal(const Expo& e) {
    unsigned t = 0;
    for (unsigned x : e) t += x;
    return t;
}

// Graded lexicographic order: total degree first, then lex with variable 0
// most significant. Returns <0, 0, >0.
inline int grlexCmp(const Expo& a, const Expo& b) {
    unsigned ta = expoTotal(a), tb = expoTotal(b);
    if (ta != tb) return ta < tb ? -1 : 1;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

// Sparse multivariate polynomial over a coefficient field C. Terms are kept
// sorted in descending graded-lex order with no zero coefficients; terms_[0]
// is the leading term. C must provide field arithmetic, isZero/isOne, str(),
// and an ADL-visible oneLike(const C&).
template <class C>
class Polynomial {
public:
    using Term = std::pair<Expo, C>;

    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(const C& c, int nvars) {
        Polynomial p(nvars);
        if (!c.isZero()) p.terms_.push_back({Expo(nvars, 0), c});
        return p;
    }

    static Polynomial variable(int idx, const C& one, int nvars, unsigned e = 1) {
        require(idx >= 0 && idx < nvars, Errc::Internal, "variable index out of range");
        Polynomial p(nvars);
        Expo ex(nvars, 0);
        ex[idx] = e;
        if (e == 0) return constant(one, nvars);
        p.terms_.push_back({ex, one});
        return p;
    }

    static Polynomial monomialTerm(const Expo& e, const C& c, int nvars) {
        Polynomial p(nvars);
        if (!c.isZero()) p.terms_.push_back({e, c});
        return p;
    }

    int nvars() const { return nvars_; }
    bool isZero() const { return terms_.empty(); }
    size_t termCount() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }

    bool isConstant() const {
        return terms_.empty() || (terms_.size() == 1 && expoTotal(terms_[0].first) == 0);
    }
    // Constant term (the coefficient of the all-zero monomial).
    C constantTerm(const C& zero) const {
        if (!terms_.empty() && expoTotal(terms_.back().first) == 0) return terms_.back().second;
        return zero;
    }

    const Term& leadingTerm() const {
        require(!terms_.empty(), Errc::ZeroElement, "leading term of zero polynomial");
        return terms_[0];
    }
    const C& leadingCoeff() const { return leadingTerm().second; }

    int totalDegree() const {
        if (terms_.empty()) return -1;
        return static_cast<int>(expoTotal(terms_[0].first));
    }

    int degreeIn(int v) const {
        int d = -1;
        for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.first[v]));
        return terms_.empty() ? -1 : d;
    }

    bool dependsOn(int v) const {
        for (const auto& t : terms_)
            if (t.first[v] > 0) return true;
        return false;
    }

    Polynomial operator-() const {
        Polynomial r(nvars_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.push_back({t.first, -t.second});
        return r;
    }

    Polynomial operator+(const Polynomial& o) const {
        checkVars(o);
        Polynomial r(nvars_);
        r.terms_.reserve(terms_.size() + o.terms_.size());
        size_t i = 0, j = 0;
        while (i < terms_.size() && j < o.terms_.size()) {
            int c = grlexCmp(terms_[i].first, o.terms_[j].first);
            if (c > 0) {
                r.terms_.push_back(terms_[i++]);
            } else if (c < 0) {
                r.terms_.push_back(o.terms_[j++]);
            } else {
                C s = terms_[i].second + o.terms_[j].second;
                if (!s.isZero()) r.terms_.push_back({terms_[i].first, s});
                ++i;
                ++j;
            }
        }
        for (; i < terms_.size(); ++i) r.terms_.push_back(terms_[i]);
        for (; j < o.terms_.size(); ++j) r.terms_.push_back(o.terms_[j]);
        return r;
    }

    Polynomial operator-(const Polynomial& o) const { return *this + (-o); }

    Polynomial operator*(const Polynomial& o) const {
        checkVars(o);
        if (isZero() || o.isZero()) return Polynomial(nvars_);
        struct Desc {
            bool operator()(const Expo& a, const Expo& b) const { return grlexCmp(a, b) > 0; }
        };
        std::map<Expo, C, Desc> acc;
        for (const auto& a : terms_) {
            for (const auto& b : o.terms_) {
                Expo e(nvars_);
                for (int k = 0; k < nvars_; ++k) e[k] = a.first[k] + b.first[k];
                C prod = a.second * b.second;
                auto it = acc.find(e);
                if (it == acc.end()) {
                    if (!prod.isZero()) acc.emplace(std::move(e), std::move(prod));
                } else {
                    it->second = it->second + prod;
                    if (it->second.isZero()) acc.erase(it);
                }
            }
        }
        Polynomial r(nvars_);
        r.terms_.assign(acc.begin(), acc.end());
        return r;
    }

    Polynomial scaled(const C& c) const {
        if (c.isZero()) return Polynomial(nvars_);
        Polynomial r(nvars_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.push_back({t.first, t.second * c});
        return r;
    }

    bool operator==(const Polynomial& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    // Monic with respect to the graded-lex leading coefficient.
    Polynomial normalized() const {
        if (isZero()) return *this;
        return scaled(leadingCoeff().inverse());
    }

    Polynomial derivative(int v) const {
        Polynomial r(nvars_);
        for (const auto& t : terms_) {
            if (t.first[v] == 0) continue;
            Expo e = t.first;
            long n = e[v];
            e[v] -= 1;
            C c = mulInt(t.second, n);
            if (!c.isZero()) r.terms_.push_back({std::move(e), std::move(c)});
        }
        return r;
    }

    // Substitute variable v by a polynomial value (same ambient ring).
    Polynomial substitute(int v, const Polynomial& value) const {
        auto coeffs = univariate(v);
        if (coeffs.empty()) return Polynomial(nvars_);
        Polynomial acc = coeffs.back();
        for (size_t k = coeffs.size() - 1; k-- > 0;) acc = acc * value + coeffs[k];
        return acc;
    }

    C evaluate(const std::vector<C>& vals, const C& zero) const {
        require(static_cast<int>(vals.size()) == nvars_, Errc::Internal, "evaluate arity");
        C sum = zero;
        for (const auto& t : terms_) {
            C prod = t.second;
            for (int k = 0; k < nvars_; ++k)
                for (unsigned j = 0; j < t.first[k]; ++j) prod = prod * vals[k];
            sum = sum + prod;
        }
        return sum;
    }

    // Coefficients as polynomials of v-degree zero, indexed by v-degree.
    std::vector<Polynomial> univariate(int v) const {
        int d = degreeIn(v);
        if (d < 0) return {};
        std::vector<Polynomial> out(d + 1, Polynomial(nvars_));
        for (const auto& t : terms_) {
            Expo e = t.first;
            unsigned k = e[v];
            e[v] = 0;
            out[k].terms_.push_back({std::move(e), t.second});
        }
        for (auto& p : out)
            std::sort(p.terms_.begin(), p.terms_.end(), [](const Term& a, const Term& b) {
                return grlexCmp(a.first, b.first) > 0;
            });
        return out;
    }

    static Polynomial fromUnivariate(const std::vector<Polynomial>& coeffs, int v, int nvars) {
        Polynomial r(nvars);
        for (size_t k = 0; k < coeffs.size(); ++k) {
            Polynomial term = coeffs[k];
            for (auto& t : term.terms_) t.first[v] += static_cast<unsigned>(k);
            std::sort(term.terms_.begin(), term.terms_.end(), [](const Term& a, const Term& b) {
                return grlexCmp(a.first, b.first) > 0;
            });
            r = r + term;
        }
        return r;
    }

    std::string str(const std::vector<std::string>& names) const {
        require(static_cast<int>(names.size()) == nvars_, Errc::Internal, "str arity");
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& t : terms_) {
            C c = t.second;
            bool neg = false;
            C negc = -c;
            std::string cs = c.str();
            if (!cs.empty() && cs[0] == '-' && !negc.str().empty() && negc.str()[0] != '-') {
                neg = true;
                c = negc;
                cs = negc.str();
            }
            if (first) {
                if (neg) os << "-";
                first = false;
            } else {
                os << (neg ? " - " : " + ");
            }
            bool anyVar = expoTotal(t.first) > 0;
            bool coeffShown = !c.isOne() || !anyVar;
            if (coeffShown) {
                if (c.isCompositeLiteral() && anyVar)
                    os << "(" << cs << ")";
                else
                    os << cs;
            }
            bool needStar = coeffShown && anyVar;
            for (int k = 0; k < nvars_; ++k) {
                if (t.first[k] == 0) continue;
                if (needStar) os << "*";
                needStar = true;
                os << names[k];
                if (t.first[k] > 1) os << "^" << t.first[k];
            }
        }
        return os.str();
    }

private:
    void checkVars(const Polynomial& o) const {
        require(nvars_ == o.nvars_, Errc::Internal, "mixed variable counts");
    }

    int nvars_;
    std::vector<Term> terms_;
};

template <class C>
std::optional<Polynomial<C>> divideExact(const Polynomial<C>& p, const Polynomial<C>& d) {
    require(!d.isZero(), Errc::ZeroElement, "division by zero polynomial");
    Polynomial<C> q(p.nvars());
    Polynomial<C> r = p;
    const auto& dl = d.leadingTerm();
    while (!r.isZero()) {
        const auto& rl = r.leadingTerm();
        Expo e(p.nvars());
        for (int k = 0; k < p.nvars(); ++k) {
            if (rl.first[k] < dl.first[k]) return std::nullopt;
            e[k] = rl.first[k] - dl.first[k];
        }
        auto t = Polynomial<C>::monomialTerm(e, rl.second / dl.second, p.nvars());
        q = q + t;
        r = r - t * d;
    }
    return q;
}

// Multiplicity of divisor d in p (d non-constant); p is replaced by p / d^mult.
template <class C>
int removeFactor(Polynomial<C>& p, const Polynomial<C>& d) {
    int m = 0;
    while (!p.isZero()) {
        auto q = divideExact(p, d);
        if (!q) break;
        p = *q;
        ++m;
    }
    return m;
}

namespace detail {

// Pseudo-remainder of A by B in variable v: lc(B)^(degA-degB+1) * A mod B,
// computed on univariate coefficient vectors.
template <class C>
std::vector<Polynomial<C>> prem(std::vector<Polynomial<C>> A, const std::vector<Polynomial<C>>& B,
                                int v, int nvars) {
    auto deg = [](const std::vector<Polynomial<C>>& u) -> int {
        for (size_t k = u.size(); k-- > 0;)
            if (!u[k].isZero()) return static_cast<int>(k);
        return -1;
    };
    int da = deg(A), db = deg(B);
    require(db >= 0, Errc::ZeroElement, "prem by zero");
    const Polynomial<C>& lb = B[db];
    int e = da - db + 1;
    while (true) {
        int dr = deg(A);
        if (dr < db) break;
        Polynomial<C> lr = A[dr];
        // A = lb*A - lr*x^(dr-db)*B
        for (auto& c : A) c = c * lb;
        for (int k = 0; k <= db; ++k) A[dr - db + k] = A[dr - db + k] - lr * B[k];
        --e;
    }
    // Scale by remaining lb powers so the result equals the exact pseudo-remainder.
    for (; e > 0; --e)
        for (auto& c : A) c = c * lb;
    (void)v;
    (void)nvars;
    return A;
}

}  // namespace detail

template <class C>
Polynomial<C> polyGcd(const Polynomial<C>& a, const Polynomial<C>& b);

template <class C>
Polynomial<C> polyGcdMany(const std::vector<Polynomial<C>>& ps, int nvars) {
    Polynomial<C> g(nvars);
    for (const auto& p : ps) {
        g = polyGcd(g, p);
        if (!g.isZero() && g.isConstant()) return g.normalized();
    }
    return g;
}

// GCD via primitive subresultant PRS, recursing on coefficient contents.
// Result is zero or monic under graded-lex.
template <class C>
Polynomial<C> polyGcd(const Polynomial<C>& a, const Polynomial<C>& b) {
    if (a.isZero()) return b.normalized();
    if (b.isZero()) return a.normalized();
    int v = -1;
    for (int k = a.nvars(); k-- > 0;) {
        if (a.dependsOn(k) || b.dependsOn(k)) {
            v = k;
            break;
        }
    }
    if (v < 0) return Polynomial<C>::constant(oneLike(a.leadingCoeff()), a.nvars());

    auto ua = a.univariate(v);
    auto ub = b.univariate(v);
    Polynomial<C> contA = polyGcdMany(ua, a.nvars());
    Polynomial<C> contB = polyGcdMany(ub, a.nvars());
    Polynomial<C> ppA = *divideExact(a, contA);
    Polynomial<C> ppB = *divideExact(b, contB);
    Polynomial<C> cont = polyGcd(contA, contB);

    auto A = ppA.univariate(v);
    auto B = ppB.univariate(v);
    auto deg = [](const std::vector<Polynomial<C>>& u) -> int {
        for (size_t k = u.size(); k-- > 0;)
            if (!u[k].isZero()) return static_cast<int>(k);
        return -1;
    };
    if (deg(A) < deg(B)) std::swap(A, B);

    C one = oneLike(a.leadingCoeff());
    Polynomial<C> g = Polynomial<C>::constant(one, a.nvars());
    Polynomial<C> h = g;
    Polynomial<C> result(a.nvars());
    while (true) {
        int da = deg(A), db = deg(B);
        int d = da - db;
        auto R = detail::prem(A, B, v, a.nvars());
        int dr = deg(R);
        if (dr < 0) {
            result = Polynomial<C>::fromUnivariate(B, v, a.nvars());
            break;
        }
        if (dr == 0) {
            result = Polynomial<C>::constant(one, a.nvars());
            break;
        }
        A = B;
        Polynomial<C> divisor = g;
        for (int k = 0; k < d; ++k) divisor = divisor * h;
        B = R;
        for (auto& c : B) {
            auto q = divideExact(c, divisor);
            require(q.has_value(), Errc::Internal, "subresultant division failed");
            c = *q;
        }
        g = A[deg(A)];
        if (d == 1) {
            h = g;
        } else if (d > 1) {
            Polynomial<C> num = g;
            for (int k = 1; k < d; ++k) num = num * g;
            Polynomial<C> den = h;
            for (int k = 2; k < d; ++k) den = den * h;
            auto q = divideExact(num, den);
            require(q.has_value(), Errc::Internal, "subresultant h update failed");
            h = *q;
        }
    }
    // Strip the content of the PRS output in v, then restore the shared content.
    auto ur = result.univariate(v);
    Polynomial<C> rc = polyGcdMany(ur, a.nvars());
    if (!rc.isZero()) result = *divideExact(result, rc);
    return (cont * result).normalized();
}

// Product of the distinct irreducible factors, monic under graded-lex.
template <class C>
Polynomial<C> squarefreePart(const Polynomial<C>& p) {
    require(!p.isZero(), Errc::ZeroElement, "squarefreePart(0)");
    if (p.isConstant()) return Polynomial<C>::constant(oneLike(p.leadingCoeff()), p.nvars());
    Polynomial<C> g = p;
    for (int v = 0; v < p.nvars(); ++v) {
        if (!p.dependsOn(v)) continue;
        g = polyGcd(g, p.derivative(v));
        if (g.isConstant()) break;
    }
    auto q = divideExact(p, g);
    require(q.has_value(), Errc::Internal, "squarefreePart division failed");
    return q->normalized();
}

// Monic square root of a monic polynomial, when it exists.
template <class C>
std::optional<Polynomial<C>> monicSquareRoot(const Polynomial<C>& p) {
    require(!p.isZero(), Errc::ZeroElement, "monicSquareRoot(0)");
    require(p.leadingCoeff().isOne(), Errc::Internal, "monicSquareRoot expects monic input");
    const Expo& le = p.leadingTerm().first;
    Expo he(p.nvars());
    for (int k = 0; k < p.nvars(); ++k) {
        if (le[k] % 2) return std::nullopt;
        he[k] = le[k] / 2;
    }
    C one = oneLike(p.leadingCoeff());
    Polynomial<C> r = Polynomial<C>::monomialTerm(he, one, p.nvars());
    C two = one + one;
    for (size_t guard = 0;; ++guard) {
        require(guard < 100000, Errc::Internal, "monicSquareRoot diverged");
        Polynomial<C> rem = p - r * r;
        if (rem.isZero()) return r;
        const auto& lt = rem.leadingTerm();
        const auto& lr = r.leadingTerm();
        Expo e(p.nvars());
        for (int k = 0; k < p.nvars(); ++k) {
            if (lt.first[k] < lr.first[k]) return std::nullopt;
            e[k] = lt.first[k] - lr.first[k];
        }
        if (grlexCmp(e, lr.first) >= 0) return std::nullopt;
        r = r + Polynomial<C>::monomialTerm(e, lt.second / two, p.nvars());
    }
}

// p as c * g^2 with g monic; fails when p is not a square up to a coefficient
// of the ground field.
template <class C>
std::optional<std::pair<C, Polynomial<C>>> squareDecomposition(const Polynomial<C>& p) {
    require(!p.isZero(), Errc::ZeroElement, "squareDecomposition(0)");
    C c = p.leadingCoeff();
    auto g = monicSquareRoot(p.scaled(c.inverse()));
    if (!g) return std::nullopt;
    return std::make_pair(c, *g);
}

}  // namespace dp4
