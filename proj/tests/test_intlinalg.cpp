#include <catch2/catch_amalgamated.hpp>

#include <dp4/f2.hpp>
#include <dp4/intlinalg.hpp>

#include <random>

using namespace dp4;

namespace {

ZMat mat(std::vector<std::vector<long>> rows) {
    ZMat m;
    for (auto& r : rows) {
        ZVec v;
        for (long e : r) v.emplace_back(e);
        m.push_back(std::move(v));
    }
    return m;
}

ZVec vec(std::vector<long> entries) {
    ZVec v;
    for (long e : entries) v.emplace_back(e);
    return v;
}

mpz_class det3(const ZMat& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
         - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
         + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

bool inRowSpan(ZMat rows, const ZVec& v) {
    // v in rowspan(rows) iff hermite form unchanged by appending v
    ZMat a = rows;
    hermiteRows(a);
    ZMat b = rows;
    b.push_back(v);
    hermiteRows(b);
    while (!a.empty() && zIsZero(a.back())) a.pop_back();
    while (!b.empty() && zIsZero(b.back())) b.pop_back();
    return a == b;
}

}  // namespace

TEST_CASE("hermite row reduction", "[intlinalg]") {
    SECTION("echelon shape and span preservation") {
        ZMat a = mat({{2, 4, 4}, {-6, 6, 12}, {10, 4, 16}});
        ZMat original = a;
        ZMat u;
        hermiteRows(a, &u);
        // every original row recoverable: u * original == a
        REQUIRE(zMul(u, original) == a);
        // staircase: pivots strictly to the right, positive
        size_t lastPivot = 0;
        bool seenZero = false;
        for (size_t i = 0; i < a.size(); ++i) {
            size_t j = 0;
            while (j < a[i].size() && a[i][j] == 0) ++j;
            if (j == a[i].size()) {
                seenZero = true;
                continue;
            }
            REQUIRE_FALSE(seenZero);
            if (i > 0) REQUIRE(j > lastPivot);
            REQUIRE(a[i][j] > 0);
            lastPivot = j;
        }
    }
    SECTION("known form") {
        ZMat a = mat({{3, 3, 1}, {0, 1, 1}});
        hermiteRows(a);
        REQUIRE(a == mat({{3, 0, -2}, {0, 1, 1}}));
    }
}

TEST_CASE("integer kernel", "[intlinalg]") {
    SECTION("rank-one matrix") {
        ZMat a = mat({{1, 2, 3}, {2, 4, 6}});
        ZMat k = zKernel(a);
        REQUIRE(k.size() == 2);
        for (const auto& x : k) REQUIRE(zIsZero(zMulVec(a, x)));
        // (2, -1, 0) and (3, 0, -1) must lie in the kernel lattice
        REQUIRE(inRowSpan(k, vec({2, -1, 0})));
        REQUIRE(inRowSpan(k, vec({3, 0, -1})));
    }
    SECTION("full rank has trivial kernel") {
        ZMat a = mat({{2, 1}, {1, 1}});
        REQUIRE(zKernel(a).empty());
    }
    SECTION("saturation") {
        // 2x + 2y = 0 has primitive kernel vector (1, -1), not (2, -2)
        ZMat a = mat({{2, 2}});
        ZMat k = zKernel(a);
        REQUIRE(k.size() == 1);
        REQUIRE((k[0] == vec({1, -1}) || k[0] == vec({-1, 1})));
    }
}

TEST_CASE("linear solve over Z", "[intlinalg]") {
    SECTION("solvable") {
        ZMat a = mat({{2, 0}, {0, 3}, {1, 1}});
        ZVec x;
        REQUIRE(zSolve(a, vec({4, 9, 5}), &x));
        REQUIRE(x == vec({2, 3}));
    }
    SECTION("integrally unsolvable") {
        ZMat a = mat({{2, 0}, {0, 3}});
        ZVec x;
        REQUIRE_FALSE(zSolve(a, vec({1, 0}), &x));
    }
    SECTION("inconsistent") {
        ZMat a = mat({{1, 1}, {2, 2}});
        ZVec x;
        REQUIRE_FALSE(zSolve(a, vec({1, 3}), &x));
    }
    SECTION("underdetermined") {
        ZMat a = mat({{1, 2, 1}});
        ZVec x;
        REQUIRE(zSolve(a, vec({7}), &x));
        REQUIRE(x[0] + 2 * x[1] + x[2] == 7);
    }
}

TEST_CASE("smith invariants", "[intlinalg]") {
    SECTION("diagonal gets divisibility-fixed") {
        auto inv = smithInvariants(mat({{2, 0}, {0, 3}}));
        REQUIRE(inv == std::vector<mpz_class>{1, 6});
    }
    SECTION("classic example") {
        auto inv = smithInvariants(mat({{2, 4, 4}, {-6, 6, 12}, {10, 4, 16}}));
        REQUIRE(inv == std::vector<mpz_class>{2, 2, 156});
    }
    SECTION("rank deficient") {
        auto inv = smithInvariants(mat({{1, 2}, {2, 4}}));
        REQUIRE(inv == std::vector<mpz_class>{1});
    }
    SECTION("randomized: chain divides and product matches determinant") {
        std::mt19937 rng(20240811);
        std::uniform_int_distribution<int> coeff(-6, 6);
        int checked = 0;
        for (int iter = 0; iter < 200; ++iter) {
            ZMat a(3, ZVec(3));
            for (auto& row : a)
                for (auto& e : row) e = coeff(rng);
            mpz_class d = det3(a);
            if (d == 0) continue;
            auto inv = smithInvariants(a);
            REQUIRE(inv.size() == 3);
            mpz_class prod = 1;
            for (size_t i = 0; i < inv.size(); ++i) {
                REQUIRE(inv[i] > 0);
                if (i > 0) REQUIRE(inv[i] % inv[i - 1] == 0);
                prod *= inv[i];
            }
            REQUIRE(prod == abs(d));
            ++checked;
        }
        REQUIRE(checked >= 100);
    }
}

TEST_CASE("lattice quotient", "[intlinalg]") {
    SECTION("Z^2 mod (2,0),(0,4)") {
        ZMat super = mat({{1, 0}, {0, 1}});
        ZMat sub = mat({{2, 0}, {0, 4}});
        FiniteQuotient q = latticeQuotient(super, sub);
        REQUIRE(q.invariants == std::vector<mpz_class>{2, 4});
        REQUIRE(q.generators.size() == 2);
        for (size_t i = 0; i < q.generators.size(); ++i) {
            // order * generator lands in the sublattice, generator itself does not
            ZVec scaled = q.generators[i];
            for (auto& e : scaled) e *= q.invariants[i];
            REQUIRE(inRowSpan(sub, scaled));
            REQUIRE_FALSE(inRowSpan(sub, q.generators[i]));
        }
    }
    SECTION("non-diagonal sublattice") {
        ZMat super = mat({{1, 0}, {0, 1}});
        ZMat sub = mat({{1, 1}, {1, -1}});
        FiniteQuotient q = latticeQuotient(super, sub);
        REQUIRE(q.invariants == std::vector<mpz_class>{2});
        ZVec doubled = q.generators[0];
        for (auto& e : doubled) e *= 2;
        REQUIRE(inRowSpan(sub, doubled));
        REQUIRE_FALSE(inRowSpan(sub, q.generators[0]));
    }
    SECTION("trivial quotient") {
        ZMat super = mat({{1, 0}, {0, 1}});
        FiniteQuotient q = latticeQuotient(super, super);
        REQUIRE(q.invariants.empty());
        REQUIRE(q.generators.empty());
    }
    SECTION("sublattice in a shifted basis") {
        // super spanned by (1,1,0),(0,1,1); sub = 3 * super
        ZMat super = mat({{1, 1, 0}, {0, 1, 1}});
        ZMat sub = mat({{3, 3, 0}, {0, 3, 3}});
        FiniteQuotient q = latticeQuotient(super, sub);
        REQUIRE(q.invariants == std::vector<mpz_class>{3, 3});
        for (const auto& g : q.generators) REQUIRE(inRowSpan(super, g));
    }
    SECTION("infinite quotient rejected") {
        ZMat super = mat({{1, 0}, {0, 1}});
        ZMat sub = mat({{2, 0}});
        REQUIRE_THROWS_AS(latticeQuotient(super, sub), Error);
    }
}

TEST_CASE("f2 linear algebra", "[intlinalg]") {
    SECTION("row basis") {
        std::vector<uint64_t> rows = {0b011, 0b101, 0b110};
        auto basis = f2RowBasis(rows, 3);
        REQUIRE(basis.size() == 2);
        REQUIRE(f2InSpan(basis, 0b110, 3));
        REQUIRE_FALSE(f2InSpan(basis, 0b100, 3));
        REQUIRE(f2InSpan(basis, 0b000, 3));
    }
    SECTION("kernel is the orthocomplement") {
        std::vector<uint64_t> rows = {0b011, 0b101, 0b110};
        auto ker = f2Kernel(rows, 3);
        REQUIRE(ker.size() == 1);
        REQUIRE(ker[0] == 0b111);
        for (uint64_t r : rows) REQUIRE(f2Parity(r & ker[0]) == 0);
    }
    SECTION("full kernel of zero map") {
        std::vector<uint64_t> rows = {0};
        auto ker = f2Kernel(rows, 3);
        REQUIRE(ker.size() == 3);
    }
    SECTION("span enumeration") {
        auto all = f2Span({0b01, 0b10});
        REQUIRE(all.size() == 4);
    }
}
