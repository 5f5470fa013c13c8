#pragma once

#include <gmpxx.h>

#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "dp4/error.hpp"
#include "dp4/gaussian.hpp"

namespace dp4 {

// Element of Q(i) with exact rational components. This is the coefficient
// field for every polynomial in the library.
class Constant {
public:
    Constant() : re_(0), im_(0) {}
    Constant(long n) : re_(n), im_(0) {}
    Constant(mpq_class re) : re_(std::move(re)), im_(0) { canon(); }
    Constant(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) { canon(); }

    static Constant i() { return Constant(mpq_class(0), mpq_class(1)); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool isZero() const { return re_ == 0 && im_ == 0; }
    bool isOne() const { return re_ == 1 && im_ == 0; }
    bool isRational() const { return im_ == 0; }

    Constant operator+(const Constant& o) const { return Constant(re_ + o.re_, im_ + o.im_); }
    Constant operator-(const Constant& o) const { return Constant(re_ - o.re_, im_ - o.im_); }
    Constant operator-() const { return Constant(-re_, -im_); }
    Constant operator*(const Constant& o) const {
        return Constant(re_ * o.re_ - im_ * o.im_, re_ * o.im_ + im_ * o.re_);
    }
    Constant inverse() const {
        require(!isZero(), Errc::ZeroElement, "inverse of zero constant");
        mpq_class n = re_ * re_ + im_ * im_;
        return Constant(re_ / n, -im_ / n);
    }
    Constant operator/(const Constant& o) const { return *this * o.inverse(); }

    Constant conj() const { return Constant(re_, -im_); }
    mpq_class normQ() const { return re_ * re_ + im_ * im_; }

    bool operator==(const Constant& o) const { return re_ == o.re_ && im_ == o.im_; }
    bool operator!=(const Constant& o) const { return !(*this == o); }

    // Total order used only for canonical term layouts and printing.
    int cmp(const Constant& o) const {
        int c = ::cmp(re_, o.re_);
        if (c) return c;
        return ::cmp(im_, o.im_);
    }

    // Exact square test in Q(i).
    bool isSquareQi() const { return sqrtQi().has_value(); }

    std::optional<Constant> sqrtQi() const {
        if (isZero()) return Constant();
        if (im_ == 0) {
            if (re_ > 0) {
                auto r = sqrtQ(re_);
                if (r) return Constant(*r);
                return std::nullopt;
            }
            auto r = sqrtQ(-re_);
            if (r) return Constant(mpq_class(0), *r);
            return std::nullopt;
        }
        // w = x + y*i with w^2 = this: x^2 = (re + |this|)/2, y = im/(2x).
        auto q = sqrtQ(normQ());
        if (!q) return std::nullopt;
        mpq_class x2 = (re_ + *q) / 2;
        auto x = sqrtQ(x2);
        if (!x || *x == 0) return std::nullopt;
        mpq_class y = im_ / (2 * (*x));
        return Constant(*x, y);
    }

    std::string str() const {
        std::ostringstream os;
        if (im_ == 0) {
            os << re_;
        } else if (re_ == 0) {
            if (im_ == 1)
                os << "i";
            else if (im_ == -1)
                os << "-i";
            else
                os << im_ << "*i";
        } else {
            os << re_;
            if (im_ > 0)
                os << "+";
            if (im_ == 1)
                os << "i";
            else if (im_ == -1)
                os << "-i";
            else
                os << im_ << "*i";
        }
        return os.str();
    }

    // True when the printed form needs parentheses before a '*'.
    bool isCompositeLiteral() const {
        return (re_ != 0 && im_ != 0) || (im_ == 0 && re_ < 0) || (re_ == 0 && im_ < 0);
    }

    static std::optional<mpq_class> sqrtQ(const mpq_class& q) {
        if (q < 0) return std::nullopt;
        mpq_class c = q;
        c.canonicalize();
        const mpz_class& num = c.get_num();
        const mpz_class& den = c.get_den();
        if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
            return std::nullopt;
        mpz_class rn, rd;
        mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
        mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
        return mpq_class(rn) / mpq_class(rd);
    }

private:
    void canon() {
        re_.canonicalize();
        im_.canonicalize();
    }

    mpq_class re_, im_;
};

inline Constant oneLike(const Constant&) { return Constant(1); }
inline Constant mulInt(const Constant& c, long n) { return c * Constant(n); }

// Clears denominators: returns (g, d) with c = g/d, g in Z[i], d a positive integer.
inline std::pair<GaussInt, mpz_class> toGaussFraction(const Constant& c) {
    mpz_class d;
    mpz_lcm(d.get_mpz_t(), c.re().get_den().get_mpz_t(), c.im().get_den().get_mpz_t());
    mpq_class sr = c.re() * d, si = c.im() * d;
    return {GaussInt(sr.get_num(), si.get_num()), d};
}

inline Constant fromGauss(const GaussInt& z) {
    return Constant(mpq_class(z.x), mpq_class(z.y));
}

}  // namespace dp4
