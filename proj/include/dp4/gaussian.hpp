#pragma once

#include <gmpxx.h>

#include <map>
#include <utility>
#include <vector>

#include "dp4/error.hpp"

namespace dp4 {

// Gaussian integer x + y*i with exact mpz components.
struct GaussInt {
    mpz_class x, y;

    GaussInt() : x(0), y(0) {}
    GaussInt(mpz_class re, mpz_class im) : x(std::move(re)), y(std::move(im)) {}

    bool isZero() const { return x == 0 && y == 0; }
    mpz_class norm() const { return x * x + y * y; }

    GaussInt operator+(const GaussInt& o) const { return {x + o.x, y + o.y}; }
    GaussInt operator-(const GaussInt& o) const { return {x - o.x, y - o.y}; }
    GaussInt operator*(const GaussInt& o) const { return {x * o.x - y * o.y, x * o.y + y * o.x}; }
    GaussInt operator-() const { return {-x, -y}; }
    bool operator==(const GaussInt& o) const { return x == o.x && y == o.y; }
};

inline GaussInt conj(const GaussInt& z) { return {z.x, -z.y}; }

// Rounded quotient for the Euclidean division z = q*w + r with N(r) <= N(w)/2.
inline GaussInt gaussDivRound(const GaussInt& z, const GaussInt& w) {
    mpz_class n = w.norm();
    GaussInt t = z * conj(w);  // q = t / n rounded componentwise
    auto roundDiv = [&](const mpz_class& a) {
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t());
        if (2 * r > n) q += 1;
        return q;
    };
    return {roundDiv(t.x), roundDiv(t.y)};
}

inline bool gaussDivides(const GaussInt& d, const GaussInt& z, GaussInt* quot = nullptr) {
    if (d.isZero()) return z.isZero();
    mpz_class n = d.norm();
    GaussInt t = z * conj(d);
    if (t.x % n != 0 || t.y % n != 0) return false;
    if (quot) *quot = {t.x / n, t.y / n};
    return true;
}

inline GaussInt gaussGcd(GaussInt a, GaussInt b) {
    while (!b.isZero()) {
        GaussInt q = gaussDivRound(a, b);
        GaussInt r = a - q * b;
        a = b;
        b = r;
    }
    return a;
}

// Canonical associate: the unit multiple with x > 0, y >= 0 (and 0 stays 0).
// For x + y*i with x > 0, y >= 0 this is a normal form for Z[i]/units.
inline GaussInt gaussCanonical(const GaussInt& z) {
    if (z.isZero()) return z;
    GaussInt w = z;
    for (int k = 0; k < 3 && !(w.x > 0 && w.y >= 0); ++k) w = w * GaussInt(0, 1);
    require(w.x > 0 && w.y >= 0, Errc::Internal, "gaussCanonical");
    return w;
}

inline const std::vector<GaussInt>& gaussUnits() {
    static const std::vector<GaussInt> u = {
        GaussInt(1, 0), GaussInt(-1, 0), GaussInt(0, 1), GaussInt(0, -1)};
    return u;
}

// Trial-division factorization of |n|. Fails loudly when a cofactor resists
// the bound rather than returning a wrong answer.
inline std::map<mpz_class, unsigned> factorInt(mpz_class n, unsigned long bound = 1000000) {
    std::map<mpz_class, unsigned> out;
    n = abs(n);
    require(n != 0, Errc::ZeroElement, "factorInt(0)");
    for (mpz_class p = 2; p * p <= n && p <= bound; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            out[p] += 1;
            n /= p;
        }
    }
    if (n > 1) {
        require(mpz_probab_prime_p(n.get_mpz_t(), 30) != 0, Errc::Unsupported,
                "integer constant too large to factor: " + n.get_str());
        out[n] += 1;
    }
    return out;
}

// Writes prime p = 1 (mod 4) as x^2 + y^2 via a sqrt of -1 mod p.
inline GaussInt sumOfTwoSquares(const mpz_class& p) {
    mpz_class e = (p - 1) / 4;
    mpz_class r = 0;
    for (mpz_class g = 2; g < p; ++g) {
        mpz_class t;
        mpz_powm(t.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        if (t != 1 && t != p - 1 && (t * t) % p == p - 1) {
            r = t;
            break;
        }
    }
    require(r != 0, Errc::Internal, "sumOfTwoSquares: no sqrt(-1) mod " + p.get_str());
    // gcd(p, r + i) in Z[i] has norm p
    GaussInt g = gaussGcd(GaussInt(p, 0), GaussInt(r, 1));
    require(g.norm() == p, Errc::Internal, "sumOfTwoSquares: gcd norm mismatch");
    return g;
}

// Factorization into canonical Gaussian primes; the unit cofactor makes the
// product exact.
struct GaussFactorization {
    GaussInt unit;
    std::vector<std::pair<GaussInt, unsigned>> primes;
};

inline GaussFactorization gaussFactor(const GaussInt& z) {
    require(!z.isZero(), Errc::ZeroElement, "gaussFactor(0)");
    GaussFactorization out;
    auto rat = factorInt(z.norm());
    GaussInt rem = z;
    for (auto& [p, e] : rat) {
        std::vector<GaussInt> primesAbove;
        if (p == 2) {
            primesAbove = {gaussCanonical(GaussInt(1, 1))};
        } else if (p % 4 == 1) {
            GaussInt pi = sumOfTwoSquares(p);
            primesAbove = {gaussCanonical(pi), gaussCanonical(conj(pi))};
        } else {
            primesAbove = {gaussCanonical(GaussInt(p, 0))};
        }
        for (const auto& pi : primesAbove) {
            unsigned mult = 0;
            GaussInt q;
            while (gaussDivides(pi, rem, &q)) {
                rem = q;
                ++mult;
            }
            if (mult) out.primes.push_back({pi, mult});
        }
    }
    require(rem.norm() == 1, Errc::Internal, "gaussFactor: non-unit remainder");
    out.unit = rem;
    return out;
}

// All divisors of z up to units, as canonical associates. Count is guarded.
inline std::vector<GaussInt> gaussDivisorsUpToUnits(const GaussInt& z, size_t maxCount = 4096) {
    auto f = gaussFactor(z);
    std::vector<GaussInt> divs = {GaussInt(1, 0)};
    for (auto& [p, e] : f.primes) {
        size_t base = divs.size();
        require(base * (e + 1) <= maxCount, Errc::Unsupported, "divisor set too large");
        GaussInt pk(1, 0);
        std::vector<GaussInt> next;
        next.reserve(base * (e + 1));
        for (unsigned k = 0; k <= e; ++k) {
            for (size_t i = 0; i < base; ++i) next.push_back(gaussCanonical(divs[i] * pk));
            pk = pk * p;
        }
        divs = std::move(next);
    }
    return divs;
}

}  // namespace dp4
