#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dp4/error.hpp"
#include "dp4/f2.hpp"
#include "dp4/field.hpp"
#include "dp4/gaussian.hpp"

namespace dp4 {

// Left kernel over F2: all e with XOR of the selected rows zero.
inline std::vector<uint64_t> f2LeftKernel(const std::vector<uint64_t>& rows, int ncols) {
    std::vector<uint64_t> cols(ncols, 0);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < ncols; ++j)
            if (rows[i] & (1ull << j)) cols[j] |= 1ull << i;
    return f2Kernel(cols, static_cast<int>(rows.size()));
}

// Square class of a field element relative to an AtomBasis: exponents mod 2
// over the basis atoms plus a canonical constant class.
struct SquareClass {
    uint64_t mask = 0;
    Constant constant = Constant(1);
    uint64_t generation = 0;
};

// Constant modulo squares, canonicalized: trivial constants become 1; in
// gaussian mode the result is a squarefree Gaussian integer times a unit in
// {1, i}.
inline Constant canonicalConstantClass(const Constant& c, ConstantMode mode) {
    require(!c.isZero(), Errc::ZeroElement, "constant class of zero");
    if (mode == ConstantMode::cyclotomic) return Constant(1);
    if (c.isSquareQi()) return Constant(1);
    auto [g, den] = toGaussFraction(c);
    GaussInt z = g * GaussInt(den, 0);  // same class as c
    auto f = gaussFactor(z);
    // class representative: unit class in {1, i} times the odd-exponent
    // canonical primes (-1 and prime squares are squares and drop out)
    GaussInt rep = (f.unit.y != 0) ? GaussInt(0, 1) : GaussInt(1, 0);
    for (auto& [p, e] : f.primes)
        if (e % 2) rep = rep * p;
    return fromGauss(rep);
}

// Session-scoped multiplicative basis: pairwise coprime squarefree monic
// atoms in the flattened polynomial model of the field. The basis grows
// monotonically; a refinement that splits an existing atom bumps the
// generation and invalidates previously issued classes.
class AtomBasis {
public:
    explicit AtomBasis(FieldPtr F) : F_(std::move(F)) {
        require(!F_->hasExt() || F_->extIsParam(), Errc::Unsupported,
                "atom basis needs a flattenable field");
    }

    const FieldPtr& field() const { return F_; }
    const std::vector<CPoly>& atoms() const { return atoms_; }
    uint64_t generation() const { return generation_; }

    void registerElement(const FieldElement& x) {
        require(!x.isZero(), Errc::ZeroElement, "square class of zero");
        FlatFraction f = flattenElement(x);
        absorb(f.num * f.den);
    }

    SquareClass classOf(const FieldElement& x) {
        require(!x.isZero(), Errc::ZeroElement, "square class of zero");
        FlatFraction f = flattenElement(x);
        CPoly prod = f.num * f.den;
        absorb(prod);
        // Extraction can expose a factor finer than the current atoms (a
        // repeated factor hiding inside one); absorb it and retry.
        while (true) {
            CPoly p = prod;
            SquareClass cls;
            for (size_t i = 0; i < atoms_.size(); ++i) {
                int m = removeFactor(p, atoms_[i]);
                if (m % 2) cls.mask |= 1ull << i;
            }
            if (p.isConstant()) {
                cls.constant = canonicalConstantClass(p.leadingCoeff(), F_->mode);
                cls.generation = generation_;
                return cls;
            }
            size_t before = atoms_.size();
            uint64_t gen = generation_;
            absorb(p);
            require(atoms_.size() > before || generation_ != gen, Errc::Internal,
                    "classOf failed to refine a leftover factor");
        }
    }

    // Classes for a batch, all issued at one final generation: a classOf can
    // still split an atom (staling earlier answers), so passes repeat until
    // the basis is stable. Terminates because the atom count is capped.
    std::vector<SquareClass> refine(const std::vector<FieldElement>& xs) {
        for (const auto& x : xs) registerElement(x);
        while (true) {
            uint64_t gen = generation_;
            std::vector<SquareClass> out;
            out.reserve(xs.size());
            for (const auto& x : xs) out.push_back(classOf(x));
            if (generation_ == gen) return out;
        }
    }

    SquareClass trivialClass() const { return SquareClass{0, Constant(1), generation_}; }

    bool trivial(const SquareClass& c) const {
        checkGen(c);
        return c.mask == 0 && constantIsSquare(c.constant, F_->mode);
    }

    SquareClass multiply(const SquareClass& a, const SquareClass& b) const {
        checkGen(a);
        checkGen(b);
        return SquareClass{a.mask ^ b.mask,
                           canonicalConstantClass(a.constant * b.constant, F_->mode),
                           generation_};
    }

    bool equal(const SquareClass& a, const SquareClass& b) const {
        checkGen(a);
        checkGen(b);
        return a.mask == b.mask && a.constant == b.constant;
    }

    // Class as a field element: product of the odd atoms times the constant.
    FieldElement representative(const SquareClass& c) const {
        checkGen(c);
        int fv = F_->flatVars();
        CPoly p = CPoly::constant(c.constant, fv);
        for (size_t i = 0; i < atoms_.size(); ++i)
            if (c.mask & (1ull << i)) p = p * atoms_[i];
        return unflattenElement(F_, reduceFlat(p, CPoly::constant(Constant(1), fv)));
    }

    std::string describe(const SquareClass& c) const {
        checkGen(c);
        if (trivial(c)) return "1";
        std::ostringstream os;
        bool first = true;
        if (!constantIsSquare(c.constant, F_->mode)) {
            os << c.constant.str();
            first = false;
        }
        auto names = F_->flatNames();
        for (size_t i = 0; i < atoms_.size(); ++i) {
            if (!(c.mask & (1ull << i))) continue;
            if (!first) os << " * ";
            first = false;
            if (atoms_[i].termCount() > 1)
                os << "(" << atoms_[i].str(names) << ")";
            else
                os << atoms_[i].str(names);
        }
        return os.str();
    }

    // All F2 relation vectors e with prod_i classes[e_i] a square. Constants
    // contribute extra coordinates in gaussian mode.
    std::vector<uint64_t> relationLattice(const std::vector<SquareClass>& classes) const {
        require(classes.size() <= 64, Errc::Unsupported, "too many classes");
        std::vector<uint64_t> rows;
        int extra = 0;
        std::map<std::string, int> primeBit;  // canonical gaussian prime -> extra bit
        int nAtoms = static_cast<int>(atoms_.size());
        for (const auto& c : classes) {
            checkGen(c);
            uint64_t row = c.mask;
            if (F_->mode == ConstantMode::gaussian && !constantIsSquare(c.constant, F_->mode)) {
                auto [g, den] = toGaussFraction(c.constant);
                GaussInt z = g * GaussInt(den, 0);
                auto f = gaussFactor(z);
                for (auto& [p, e] : f.primes) {
                    if (e % 2 == 0) continue;
                    std::string key = p.x.get_str() + "," + p.y.get_str();
                    auto it = primeBit.find(key);
                    if (it == primeBit.end()) it = primeBit.emplace(key, extra++).first;
                    row ^= 1ull << (nAtoms + it->second);
                }
                if (f.unit.y != 0) {  // unit class i; -1 is a square
                    auto it = primeBit.find("unit");
                    if (it == primeBit.end()) it = primeBit.emplace("unit", extra++).first;
                    row ^= 1ull << (nAtoms + it->second);
                }
            }
            require(nAtoms + extra <= 64, Errc::Unsupported, "relation matrix too wide");
            rows.push_back(row);
        }
        return f2LeftKernel(rows, nAtoms + extra);
    }

private:
    void checkGen(const SquareClass& c) const {
        require(c.generation == generation_, Errc::Internal,
                "stale square class: basis was refined after it was issued");
    }

    void absorb(CPoly p) {
        require(!p.isZero(), Errc::ZeroElement, "absorb zero");
        require(p.nvars() == F_->flatVars(), Errc::DomainMismatch, "absorb arity");
        if (p.isConstant()) return;
        CPoly q = squarefreePart(p);
        for (size_t i = 0; i < atoms_.size() && !q.isConstant(); ++i) {
            CPoly g = polyGcd(q, atoms_[i]);
            if (g.isConstant()) continue;
            if (!(g == atoms_[i])) {
                // split atom i into g and atoms_[i] / g
                CPoly rest = *divideExact(atoms_[i], g);
                atoms_[i] = g;
                atoms_.push_back(rest.normalized());
                ++generation_;
            }
            q = *divideExact(q, g);
            if (!q.isZero() && !q.isConstant()) q = q.normalized();
        }
        if (!q.isConstant()) {
            require(atoms_.size() < 64, Errc::Unsupported, "atom basis exceeds 64 atoms");
            atoms_.push_back(q.normalized());
        }
    }

    FieldPtr F_;
    std::vector<CPoly> atoms_;
    uint64_t generation_ = 0;
};

}  // namespace dp4
