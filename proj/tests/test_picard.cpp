#include <catch2/catch_amalgamated.hpp>

#include <dp4/picard.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace dp4;

namespace {

FieldPtr kField() { return makeField(ConstantMode::cyclotomic, {"a", "b", "c"}); }

FieldElement P(const FieldPtr& f, const char* name) { return FieldElement::param(f, name); }

XPoly xsq(const FieldPtr& F, int i) { return xvar(F, i) * xvar(F, i); }

QuadricMatrix pencilA(const FieldPtr& F) {
    return QuadricMatrix::fromForm(xsq(F, 0).scaled(P(F, "a")) + xsq(F, 1).scaled(P(F, "b")) +
                                   xsq(F, 2) + xsq(F, 4).scaled(P(F, "c")));
}

QuadricMatrix pencilB(const FieldPtr& F) {
    return QuadricMatrix::fromForm(xsq(F, 0).scaled(P(F, "b") * P(F, "c")) + xsq(F, 1) +
                                   xsq(F, 2) + xsq(F, 3).scaled(P(F, "a")));
}

std::vector<FieldElement> epsTable(const std::vector<ClosedPoint>& locus, const QuadricMatrix& A,
                                   const QuadricMatrix& B) {
    std::vector<FieldElement> out;
    for (const auto& T : locus) {
        QuadricMatrix Q = quadricAt(T, A, B);
        out.push_back(epsDeterminant(Q, admissibleHyperplane(Q)));
    }
    return out;
}

GammaElement exch(std::initializer_list<int> bits) {
    GammaElement g;
    for (int m : bits) g.exchanges |= 1u << static_cast<unsigned>(m);
    return g;
}

std::set<unsigned> exchangeSets(const GaloisImage& G) {
    std::set<unsigned> out;
    for (const auto& g : G.elements) out.insert(g.exchanges);
    return out;
}

unsigned mask(std::initializer_list<int> bits) {
    unsigned m = 0;
    for (int b : bits) m |= 1u << static_cast<unsigned>(b);
    return m;
}

GammaElement randomEvenElement(std::mt19937& rng) {
    GammaElement g;
    std::uniform_int_distribution<unsigned> ex(0, 31);
    do {
        g.exchanges = ex(rng);
    } while (__builtin_popcount(g.exchanges) % 2 != 0);
    for (int m = 4; m > 0; --m) {
        std::uniform_int_distribution<int> pick(0, m);
        std::swap(g.perm[static_cast<size_t>(m)], g.perm[static_cast<size_t>(pick(rng))]);
    }
    return g;
}

PicVector randomVector(std::mt19937& rng) {
    PicVector p;
    std::uniform_int_distribution<long long> coord(-4, 4);
    for (int i = 0; i < 6; ++i) p.v[static_cast<size_t>(i)] = coord(rng);
    return p;
}

template <class Fn>
Errc codeOf(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Internal;
}

}  // namespace

TEST_CASE("intersection pairing on the conic basis", "[picard]") {
    PicVector E = PicVector::E(), H = PicVector::H();

    SECTION("pairing table") {
        REQUIRE(pairing(E, E) == 11);
        for (int i = 0; i < 5; ++i) {
            REQUIRE(pairing(E, PicVector::C(i)) == 3);
            REQUIRE(pairing(PicVector::C(i), PicVector::C(i)) == 0);
            for (int j = 0; j < 5; ++j)
                if (j != i) REQUIRE(pairing(PicVector::C(i), PicVector::C(j)) == 1);
        }
        REQUIRE(pairing(H, H) == 4);
        for (int i = 0; i < 5; ++i) REQUIRE(pairing(H, PicVector::C(i)) == 2);
    }

    SECTION("H is 2E minus the sum of the conics") {
        PicVector s = E.scaled(2);
        for (int i = 0; i < 5; ++i) s = s - PicVector::C(i);
        REQUIRE(s == H);
        REQUIRE(H.str() == "2*E - C0 - C1 - C2 - C3 - C4");
    }

    SECTION("pairing is symmetric and bilinear on random vectors") {
        std::mt19937 rng(20260816);
        for (int trial = 0; trial < 100; ++trial) {
            PicVector x = randomVector(rng), y = randomVector(rng), z = randomVector(rng);
            REQUIRE(pairing(x, y) == pairing(y, x));
            REQUIRE(pairing(x + y, z) == pairing(x, z) + pairing(y, z));
        }
    }
}

TEST_CASE("action matrices of lattice automorphisms", "[picard]") {
    SECTION("identity acts trivially") {
        ZMat M = actionMatrix(GammaElement::identity());
        REQUIRE(M == zIdentity(6));
    }

    SECTION("the exchange at {0,1} sends E to 3E - 2C0 - 2C1 - C2 - C3 - C4") {
        GammaElement g = exch({0, 1});
        REQUIRE(applyGamma(g, PicVector::E()) ==
                PicVector::E().scaled(3) - PicVector::C(0).scaled(2) - PicVector::C(1).scaled(2) -
                    PicVector::C(2) - PicVector::C(3) - PicVector::C(4));
        REQUIRE(applyGamma(g, PicVector::C(0)) == PicVector::H() - PicVector::C(0));
        REQUIRE(applyGamma(g, PicVector::C(2)) == PicVector::C(2));
    }

    SECTION("odd exchange sets do not act integrally") {
        REQUIRE(codeOf([&] { actionMatrix(exch({0})); }) == Errc::OddExchangeSet);
        REQUIRE(codeOf([&] { actionMatrix(exch({0, 1, 2})); }) == Errc::OddExchangeSet);
    }

    SECTION("the image of E is pinned by the images of H and the conics") {
        // E = (H + sum C)/2, so 2 g(E) = H + sum over m of g(C_m)
        std::mt19937 rng(7);
        for (int trial = 0; trial < 100; ++trial) {
            GammaElement g = randomEvenElement(rng);
            PicVector lhs = applyGamma(g, PicVector::E()).scaled(2);
            PicVector rhs = PicVector::H();
            for (int m = 0; m < 5; ++m) rhs = rhs + applyGamma(g, PicVector::C(m));
            REQUIRE(lhs == rhs);
        }
    }

    SECTION("the action preserves the pairing and fixes H") {
        std::mt19937 rng(20260816);
        for (int trial = 0; trial < 100; ++trial) {
            GammaElement g = randomEvenElement(rng);
            REQUIRE(applyGamma(g, PicVector::H()) == PicVector::H());
            PicVector x = randomVector(rng), y = randomVector(rng);
            REQUIRE(pairing(applyGamma(g, x), applyGamma(g, y)) == pairing(x, y));
        }
    }

    SECTION("matrices compose along the group law") {
        std::mt19937 rng(99);
        for (int trial = 0; trial < 100; ++trial) {
            GammaElement g = randomEvenElement(rng), h = randomEvenElement(rng);
            REQUIRE(actionMatrix(g * h) == zMul(actionMatrix(g), actionMatrix(h)));
            REQUIRE(zMul(actionMatrix(g), actionMatrix(g.inverse())) == zIdentity(6));
        }
    }

    SECTION("group law sanity") {
        std::mt19937 rng(3);
        for (int trial = 0; trial < 100; ++trial) {
            GammaElement g = randomEvenElement(rng), h = randomEvenElement(rng),
                         k = randomEvenElement(rng);
            REQUIRE((g * h) * k == g * (h * k));
            REQUIRE(g * GammaElement::identity() == g);
            REQUIRE(GammaElement::identity() * g == g);
            REQUIRE(g * g.inverse() == GammaElement::identity());
            REQUIRE(g.inverse() * g == GammaElement::identity());
        }
    }
}

TEST_CASE("galois image of the reference pencil", "[picard]") {
    auto k = kField();
    auto A = pencilA(k), B = pencilB(k);
    auto locus = degeneracyLocus(charForm(A, B));
    auto eps = epsTable(locus, A, B);

    std::set<unsigned> expected = {mask({}),           mask({2, 3}),       mask({2, 4}),
                                   mask({3, 4}),       mask({0, 1}),       mask({0, 1, 2, 3}),
                                   mask({0, 1, 2, 4}), mask({0, 1, 3, 4})};

    SECTION("over the base field the image is (Z/2)^3 of even exchanges") {
        AtomBasis basis(k);
        GaloisImage G = galoisImage(locus, eps, basis);
        REQUIRE(G.elements.size() == 8);
        REQUIRE(G.elements[0].isIdentity());
        REQUIRE(G.charLabels[0] == "1");
        for (const auto& g : G.elements) REQUIRE(g.perm == std::array<int, 5>{0, 1, 2, 3, 4});
        REQUIRE(exchangeSets(G) == expected);
        REQUIRE(G.generators.size() == 3);

        // the generators generate: their products already exhaust the image
        std::set<unsigned> spanned;
        for (unsigned i = 0; i < 8; ++i) {
            GammaElement g;
            for (unsigned j = 0; j < 3; ++j)
                if ((i >> j) & 1u) g = g * G.generators[j];
            spanned.insert(g.exchanges);
        }
        REQUIRE(spanned == expected);
    }

    SECTION("over the quadratic extension the image is unchanged") {
        auto L = extendFieldByParam(k, "a");
        auto locusL = degeneracyLocus(charForm(A, B), L);
        auto epsL = epsTable(locusL, A, B);
        AtomBasis basis(L);
        GaloisImage G = galoisImage(locusL, epsL, basis);
        REQUIRE(G.elements.size() == 8);
        REQUIRE(exchangeSets(G) == expected);
    }

    SECTION("an all-square epsilon table gives the trivial image") {
        std::vector<FieldElement> ones(locus.size(), FieldElement::one(k));
        AtomBasis basis(k);
        GaloisImage G = galoisImage(locus, ones, basis);
        REQUIRE(G.elements.size() == 1);
        REQUIRE(G.elements[0].isIdentity());
        REQUIRE(G.generators.empty());
    }

    SECTION("a lone nontrivial class forces an odd exchange set") {
        std::vector<FieldElement> bad(locus.size(), FieldElement::one(k));
        bad[0] = P(k, "a");
        AtomBasis basis(k);
        REQUIRE(codeOf([&] { galoisImage(locus, bad, basis); }) == Errc::OddExchangeSet);
    }

    SECTION("misaligned epsilon table is rejected") {
        std::vector<FieldElement> eps4(eps.begin(), eps.end() - 1);
        AtomBasis basis(k);
        REQUIRE(codeOf([&] { galoisImage(locus, eps4, basis); }) == Errc::ValidationError);
    }

    SECTION("points of degree three and higher are out of scope") {
        std::vector<ClosedPoint> fake = locus;
        std::vector<FieldElement> eps3(eps.begin(), eps.end() - 2);
        fake.erase(fake.begin() + 3, fake.end());
        fake[2].degree = 3;
        AtomBasis basis(k);
        REQUIRE(codeOf([&] { galoisImage(fake, eps3, basis); }) == Errc::UnsupportedDegree);
    }
}

TEST_CASE("galois image with degree-2 points", "[picard]") {
    auto k = makeField(ConstantMode::cyclotomic, {"a", "b"});
    FieldElement a = P(k, "a"), b = P(k, "b");
    XPoly l = XPoly::variable(0, FieldElement::one(k), 2);
    XPoly m = XPoly::variable(1, FieldElement::one(k), 2);
    // mu (lambda^2 - a mu^2)(lambda^2 - b mu^2): one rational point, two conjugate pairs
    XPoly f = m * (l * l - (m * m).scaled(a)) * (l * l - (m * m).scaled(b));
    auto locus = degeneracyLocus(f, k);
    REQUIRE(locus.size() == 3);
    REQUIRE(locus[0].degree == 1);
    REQUIRE(locus[1].degree == 2);
    REQUIRE(locus[2].degree == 2);

    SECTION("square epsilon classes produce pure swaps") {
        std::vector<FieldElement> eps;
        eps.push_back(FieldElement::one(k));
        for (int i = 1; i < 3; ++i) {
            // (1 + sqrt(d))^2 is a square of the residue field, nontrivial as an element
            FieldElement g = FieldElement::extGenerator(locus[static_cast<size_t>(i)].residueField);
            eps.push_back((oneLike(g) + g) * (oneLike(g) + g));
        }
        AtomBasis basis(k);
        GaloisImage G = galoisImage(locus, eps, basis);
        REQUIRE(G.elements.size() == 4);
        std::set<std::array<int, 5>> perms;
        for (const auto& g : G.elements) {
            REQUIRE(g.exchanges == 0);
            perms.insert(g.perm);
        }
        std::set<std::array<int, 5>> expected = {{0, 1, 2, 3, 4},
                                                 {0, 2, 1, 3, 4},
                                                 {0, 1, 2, 4, 3},
                                                 {0, 2, 1, 4, 3}};
        REQUIRE(perms == expected);
    }

    SECTION("a nontrivial epsilon class at a degree-2 point is rejected") {
        std::vector<FieldElement> eps;
        eps.push_back(FieldElement::one(k));
        eps.push_back(FieldElement::lift(locus[1].residueField, b));
        eps.push_back(FieldElement::one(locus[2].residueField));
        AtomBasis basis(k);
        REQUIRE(codeOf([&] { galoisImage(locus, eps, basis); }) == Errc::Unsupported);
    }
}

TEST_CASE("fixed sublattice and its mod-2 quotient", "[picard]") {
    auto k = kField();
    auto A = pencilA(k), B = pencilB(k);
    auto locus = degeneracyLocus(charForm(A, B));
    auto eps = epsTable(locus, A, B);
    AtomBasis basis(k);
    GaloisImage G = galoisImage(locus, eps, basis);

    SECTION("the reference image fixes exactly the hyperplane class") {
        auto fixed = fixedSublattice(G);
        REQUIRE(fixed.size() == 1);
        bool isH = fixed[0] == PicVector::H() || fixed[0] == -PicVector::H();
        REQUIRE(isH);
    }

    SECTION("the trivial image fixes everything") {
        GaloisImage triv;
        triv.elements.push_back(GammaElement::identity());
        triv.charLabels.push_back("1");
        REQUIRE(fixedSublattice(triv).size() == 6);
        auto q = fixedMod2Quotient(triv);
        REQUIRE(q.fixedClasses.size() == 6);
        REQUIRE(q.quotientGens.empty());
    }

    SECTION("the reference quotient is generated by C0 + C1") {
        auto q = fixedMod2Quotient(G);
        REQUIRE(q.fixedClasses.size() == 2);
        REQUIRE(q.quotientGens.size() == 1);
        // modulo the reduction of H the generator is C0 + C1
        uint64_t gen = 0, c01 = 0b000110, hbar = 0b111110;
        for (int i = 0; i < 6; ++i)
            if (q.quotientGens[0].v[static_cast<size_t>(i)] % 2 != 0)
                gen |= 1ull << static_cast<unsigned>(i);
        REQUIRE((gen == c01 || gen == (c01 ^ hbar)));
    }

    SECTION("every fixed class is actually fixed mod 2") {
        auto q = fixedMod2Quotient(G);
        for (const auto& cls : q.fixedClasses) {
            for (const auto& g : G.elements) {
                PicVector moved = applyGamma(g, cls) - cls;
                for (int i = 0; i < 6; ++i) REQUIRE(moved.v[static_cast<size_t>(i)] % 2 == 0);
            }
        }
    }

    SECTION("the full even-exchange group has trivial quotient") {
        GaloisImage full;
        std::vector<unsigned> sets;
        for (unsigned e = 0; e < 32; ++e)
            if (__builtin_popcount(e) % 2 == 0) sets.push_back(e);
        std::sort(sets.begin(), sets.end());
        for (unsigned e : sets) {
            GammaElement g;
            g.exchanges = e;
            if (e == 0)
                full.elements.insert(full.elements.begin(), g);
            else
                full.elements.push_back(g);
            full.charLabels.push_back("");
        }
        REQUIRE(full.elements.size() == 16);
        auto fixed = fixedSublattice(full);
        REQUIRE(fixed.size() == 1);
        auto q = fixedMod2Quotient(full);
        REQUIRE(q.quotientGens.empty());
    }
}
