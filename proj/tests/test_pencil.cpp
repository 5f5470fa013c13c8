#include <catch2/catch_amalgamated.hpp>

#include <dp4/locus.hpp>

#include <string>
#include <vector>

using namespace dp4;

namespace {

FieldPtr kField() { return makeField(ConstantMode::cyclotomic, {"a", "b", "c"}); }

FieldElement P(const FieldPtr& f, const char* name) { return FieldElement::param(f, name); }

XPoly xsq(const FieldPtr& F, int i) { return xvar(F, i) * xvar(F, i); }

// The reference pencil: Q = a x0^2 + b x1^2 + x2^2 + c x4^2,
//                       Q' = bc x0^2 + x1^2 + x2^2 + a x3^2.
QuadricMatrix pencilA(const FieldPtr& F) {
    return QuadricMatrix::fromForm(xsq(F, 0).scaled(P(F, "a")) + xsq(F, 1).scaled(P(F, "b")) +
                                   xsq(F, 2) + xsq(F, 4).scaled(P(F, "c")));
}

QuadricMatrix pencilB(const FieldPtr& F) {
    return QuadricMatrix::fromForm(xsq(F, 0).scaled(P(F, "b") * P(F, "c")) + xsq(F, 1) +
                                   xsq(F, 2) + xsq(F, 3).scaled(P(F, "a")));
}

QuadricMatrix diagMatrix(const FieldPtr& F, const std::vector<long>& d) {
    std::vector<std::vector<FieldElement>> m(5, std::vector<FieldElement>(5, FieldElement::zero(F)));
    for (int i = 0; i < 5; ++i) m[i][i] = FieldElement::fromConstant(F, Constant(d[i]));
    return QuadricMatrix(F, m);
}

XPoly lamVar(const FieldPtr& F) { return XPoly::variable(0, FieldElement::one(F), 2); }
XPoly muVar(const FieldPtr& F) { return XPoly::variable(1, FieldElement::one(F), 2); }

XPoly powXP(XPoly p, int n) {
    XPoly r = XPoly::constant(FieldElement::one(p.leadingCoeff().field()), p.nvars());
    for (int k = 0; k < n; ++k) r = r * p;
    return r;
}

XPoly liftForm(const XPoly& f, const FieldPtr& G) {
    XPoly out(f.nvars());
    for (const auto& [e, c] : f.terms())
        out = out + XPoly::monomialTerm(e, FieldElement::lift(G, c), f.nvars());
    return out;
}

LinearForm coordForm(const FieldPtr& F, int i) {
    std::vector<FieldElement> c(5, FieldElement::zero(F));
    c[i] = FieldElement::one(F);
    return LinearForm(F, std::move(c));
}

std::vector<std::string> displays(const std::vector<ClosedPoint>& locus) {
    std::vector<std::string> out;
    for (const auto& p : locus) out.push_back(p.display);
    return out;
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

TEST_CASE("characteristic form of the pencil", "[pencil]") {
    auto k = kField();
    FieldElement a = P(k, "a"), b = P(k, "b"), c = P(k, "c");
    XPoly l = lamVar(k), m = muVar(k);

    SECTION("reference pencil expands to the factored quintic") {
        BinaryForm f = charForm(pencilA(k), pencilB(k));
        XPoly expected = (m * l * (l + m) * (l.scaled(b) + m) * (l.scaled(a) + m.scaled(b * c)))
                             .scaled(mulInt(a * c, 32));
        REQUIRE(f == expected);
    }

    SECTION("identical quadrics give (lambda+mu)^5") {
        auto I = diagMatrix(k, {1, 1, 1, 1, 1});
        REQUIRE(charForm(I, I) == powXP(l + m, 5));
    }

    SECTION("diagonal pencil gives the product of diagonal entries") {
        auto I = diagMatrix(k, {1, 1, 1, 1, 1});
        auto D = diagMatrix(k, {1, 2, 3, 4, 5});
        XPoly expected = XPoly::constant(FieldElement::one(k), 2);
        for (long n = 1; n <= 5; ++n)
            expected = expected * (l + m.scaled(FieldElement::fromConstant(k, Constant(n))));
        REQUIRE(charForm(I, D) == expected);
    }
}

TEST_CASE("pencil smoothness test", "[pencil]") {
    auto k = kField();
    XPoly l = lamVar(k), m = muVar(k);

    REQUIRE(isSmoothPencil(charForm(pencilA(k), pencilB(k))));
    REQUIRE_FALSE(isSmoothPencil(powXP(l + m, 5)));
    REQUIRE(isSmoothPencil(l * m * (l + m) * (l - m) * (l + m.scaled(FieldElement::fromConstant(k, Constant(2))))));
    REQUIRE(codeOf([&] { isSmoothPencil(XPoly(2)); }) == Errc::ZeroForm);
}

TEST_CASE("degeneracy locus of the reference pencil", "[pencil]") {
    auto k = kField();
    FieldElement a = P(k, "a"), b = P(k, "b"), c = P(k, "c");
    BinaryForm f = charForm(pencilA(k), pencilB(k));
    auto locus = degeneracyLocus(f, k);

    SECTION("five rational points in display order") {
        REQUIRE(displays(locus) ==
                std::vector<std::string>{"[1 : 0]", "[0 : 1]", "[1 : -1]", "[1 : -b]", "[b*c : -a]"});
        for (const auto& p : locus) {
            REQUIRE(p.degree == 1);
            REQUIRE(p.residueField->sameAs(*k));
        }
        REQUIRE(locus[0].mu.isZero());
        REQUIRE(locus[1].lambda.isZero());
        REQUIRE(locus[2].lambda == FieldElement::fromConstant(k, Constant(-1)));
        REQUIRE(locus[3].lambda == -(FieldElement::one(k) / b));
        REQUIRE(locus[4].lambda == -(b * c / a));
        for (size_t i = 0; i < locus.size(); ++i) REQUIRE(locus[i].id == static_cast<int>(i));
    }

    SECTION("the quintic vanishes exactly at the locus and nowhere else nearby") {
        FieldElement z = FieldElement::zero(k);
        for (const auto& p : locus) REQUIRE(f.evaluate({p.lambda, p.mu}, z).isZero());
        std::vector<std::pair<FieldElement, FieldElement>> off = {
            {FieldElement::one(k), FieldElement::one(k)},
            {FieldElement::fromConstant(k, Constant(2)), FieldElement::one(k)},
            {FieldElement::one(k), FieldElement::fromConstant(k, Constant(3))},
            {a, FieldElement::one(k)},
            {c, FieldElement::one(k)},
        };
        for (const auto& [lv, mv] : off) REQUIRE_FALSE(f.evaluate({lv, mv}, z).isZero());
    }

    SECTION("field-deriving overload agrees") {
        auto again = degeneracyLocus(f);
        REQUIRE(displays(again) == displays(locus));
    }

    SECTION("validation") {
        XPoly l = lamVar(k), m = muVar(k);
        REQUIRE(codeOf([&] { degeneracyLocus(powXP(l + m, 5), k); }) == Errc::ValidationError);
        REQUIRE(codeOf([&] { degeneracyLocus(powXP(l + m, 4), k); }) == Errc::ValidationError);
        REQUIRE(codeOf([&] { degeneracyLocus(XPoly(2), k); }) == Errc::ZeroForm);
    }
}

TEST_CASE("degeneracy locus with quadratic points", "[pencil]") {
    auto k = kField();
    FieldElement a = P(k, "a"), b = P(k, "b");
    XPoly l = lamVar(k), m = muVar(k);
    XPoly f2 = m * (l * l - (m * m).scaled(a)) * (l * l - (m * m).scaled(b));

    // Independent expansion: lambda^4 mu - (a+b) lambda^2 mu^3 + ab mu^5.
    XPoly expanded = powXP(l, 4) * m - (powXP(l, 2) * powXP(m, 3)).scaled(a + b) +
                     powXP(m, 5).scaled(a * b);
    REQUIRE(f2 == expanded);

    auto locus = degeneracyLocus(f2, k);
    REQUIRE(locus.size() == 3);
    REQUIRE(locus[0].display == "[1 : 0]");
    REQUIRE(locus[0].degree == 1);

    REQUIRE(locus[1].degree == 2);
    REQUIRE(locus[2].degree == 2);
    REQUIRE(locus[1].display == "[t : 1], (1)*t^2 + (0)*t + (-a) = 0");
    REQUIRE(locus[2].display == "[t : 1], (1)*t^2 + (0)*t + (-b) = 0");

    SECTION("residue fields adjoin square roots of a and b") {
        const auto& rfA = locus[1].residueField;
        const auto& rfB = locus[2].residueField;
        REQUIRE(rfA->hasExt());
        REQUIRE(rfB->hasExt());
        FieldElement sA = FieldElement::extGenerator(rfA);
        FieldElement sB = FieldElement::extGenerator(rfB);
        REQUIRE(sA * sA == FieldElement::param(rfA, "a"));
        REQUIRE(sB * sB == FieldElement::param(rfB, "b"));
        REQUIRE(locus[1].lambda == sA);
        REQUIRE(locus[2].lambda == sB);
    }

    SECTION("each quadratic root is an exact zero of the lifted quintic") {
        for (int i = 1; i <= 2; ++i) {
            const auto& rf = locus[i].residueField;
            XPoly fl = liftForm(f2, rf);
            REQUIRE(fl.evaluate({locus[i].lambda, locus[i].mu}, FieldElement::zero(rf)).isZero());
        }
    }

    SECTION("an irreducible cubic factor is refused") {
        XPoly two = XPoly::constant(FieldElement::fromConstant(k, Constant(2)), 2);
        XPoly f3 = (powXP(l, 3) - powXP(m, 3).scaled(a)) * (l + m) * (l + m * two);
        REQUIRE(codeOf([&] { degeneracyLocus(f3, k); }) == Errc::UnsupportedFactorDegree);
    }
}

TEST_CASE("degeneracy locus in gaussian mode", "[pencil]") {
    auto g = makeField(ConstantMode::gaussian, {"a", "b", "c"});
    XPoly l = lamVar(g), m = muVar(g);
    FieldElement twoI = FieldElement::fromConstant(g, Constant(mpq_class(0), mpq_class(2)));
    XPoly f = l * m * (l + m) * (l + m.scaled(FieldElement::fromConstant(g, Constant(2)))) *
              (l - m.scaled(twoI));
    auto locus = degeneracyLocus(f, g);
    REQUIRE(locus.size() == 5);
    std::vector<FieldElement> values;
    for (const auto& p : locus)
        if (!p.mu.isZero() && !p.lambda.isZero()) values.push_back(p.lambda);
    REQUIRE(values.size() == 3);
    FieldElement z = FieldElement::zero(g);
    for (const auto& p : locus) REQUIRE(f.evaluate({p.lambda, p.mu}, z).isZero());
    bool sawComplex = false;
    for (const auto& v : values) sawComplex |= (v == twoI);
    REQUIRE(sawComplex);
}

TEST_CASE("pencil members at locus points", "[pencil]") {
    auto k = kField();
    FieldElement a = P(k, "a"), b = P(k, "b"), c = P(k, "c");
    auto A = pencilA(k), B = pencilB(k);
    auto locus = degeneracyLocus(charForm(A, B), k);

    SECTION("endpoints reproduce the input quadrics") {
        REQUIRE(quadricAt(locus[0], A, B).form() == A.form());
        REQUIRE(quadricAt(locus[1], A, B).form() == B.form());
    }

    SECTION("interior members match hand-computed combinations") {
        FieldElement one = FieldElement::one(k);
        // at [1 : -1] the member is -Q + Q'
        XPoly q2 = xsq(k, 0).scaled(b * c - a) + xsq(k, 1).scaled(one - b) + xsq(k, 3).scaled(a) -
                   xsq(k, 4).scaled(c);
        REQUIRE(quadricAt(locus[2], A, B).form() == q2);
        // at [1 : -b] the member is -(1/b) Q + Q'
        XPoly q3 = (xsq(k, 0).scaled(b * b * c - a) + xsq(k, 2).scaled(b - one) +
                    xsq(k, 3).scaled(a * b) - xsq(k, 4).scaled(c))
                       .scaled(one / b);
        REQUIRE(quadricAt(locus[3], A, B).form() == q3);
        // at [bc : -a] the member is -(bc/a) Q + Q'
        XPoly q4 = (xsq(k, 1).scaled(a - b * b * c) + xsq(k, 2).scaled(a - b * c) +
                    xsq(k, 3).scaled(a * a) - xsq(k, 4).scaled(b * c * c))
                       .scaled(one / a);
        REQUIRE(quadricAt(locus[4], A, B).form() == q4);
    }

    SECTION("rank other than 4 is rejected") {
        ClosedPoint T(k, FieldElement::one(k), FieldElement::zero(k));
        T.display = "[1 : 0]";
        auto R3 = diagMatrix(k, {1, 1, 1, 0, 0});
        auto I = diagMatrix(k, {1, 1, 1, 1, 1});
        REQUIRE(codeOf([&] { quadricAt(T, R3, I); }) == Errc::UnexpectedRank);
    }
}

TEST_CASE("vertices of the degenerate quadrics", "[pencil]") {
    auto k = kField();
    auto A = pencilA(k), B = pencilB(k);
    auto locus = degeneracyLocus(charForm(A, B), k);

    auto unitVec = [&](int i) {
        std::vector<FieldElement> v(5, FieldElement::zero(k));
        v[i] = FieldElement::one(k);
        return v;
    };

    REQUIRE(vertexOf(quadricAt(locus[0], A, B)) == unitVec(3));
    REQUIRE(vertexOf(quadricAt(locus[1], A, B)) == unitVec(4));
    REQUIRE(vertexOf(quadricAt(locus[2], A, B)) == unitVec(2));
    REQUIRE(vertexOf(quadricAt(locus[3], A, B)) == unitVec(1));
    REQUIRE(vertexOf(quadricAt(locus[4], A, B)) == unitVec(0));
    REQUIRE(vertexOf(diagMatrix(k, {1, 1, 1, 1, 0})) == unitVec(4));
    REQUIRE(codeOf([&] { vertexOf(diagMatrix(k, {1, 1, 1, 0, 0})); }) == Errc::WrongRank);
}

TEST_CASE("discriminants of the rank-4 members", "[pencil]") {
    auto k = kField();
    FieldElement a = P(k, "a"), b = P(k, "b"), c = P(k, "c");
    FieldElement one = FieldElement::one(k);
    auto A = pencilA(k), B = pencilB(k);
    auto locus = degeneracyLocus(charForm(A, B), k);

    std::vector<QuadricMatrix> qs;
    for (const auto& T : locus) qs.push_back(quadricAt(T, A, B));

    SECTION("the first member restricted to x3 = 0 has determinant 16abc") {
        LinearForm H = admissibleHyperplane(qs[0]);
        REQUIRE(H.c[3] == one);
        for (int i : {0, 1, 2, 4}) REQUIRE(H.c[i].isZero());
        REQUIRE(epsDeterminant(qs[0], H) == mulInt(a * b * c, 16));
    }

    SECTION("square classes match the expected table") {
        std::vector<FieldElement> expect = {
            a * b * c,
            a * b * c,
            a * c * (b - one) * (a - b * c),
            a * b * c * (one - b) * (a - b * b * c),
            b * (b * b * c - a) * (b * c - a),
        };
        std::vector<FieldElement> all;
        for (const auto& q : qs) all.push_back(epsDeterminant(q, admissibleHyperplane(q)));
        for (const auto& e : expect) all.push_back(e);
        AtomBasis basis(k);
        auto classes = basis.refine(all);
        for (int i = 0; i < 5; ++i) {
            REQUIRE(basis.equal(classes[i], classes[i + 5]));
            REQUIRE_FALSE(basis.trivial(classes[i]));
        }
        // the two endpoint classes agree, and differ from the interior ones
        REQUIRE(basis.equal(classes[0], classes[1]));
        REQUIRE_FALSE(basis.equal(classes[0], classes[2]));
        REQUIRE_FALSE(basis.equal(classes[2], classes[3]));
    }

    SECTION("the class does not depend on the hyperplane") {
        // vertex of qs[2] is e2, so any form with a nonzero x2 coefficient works
        std::vector<LinearForm> hs;
        {
            std::vector<FieldElement> c1(5, FieldElement::zero(k));
            c1[2] = one;
            hs.push_back(LinearForm(k, c1));
            std::vector<FieldElement> c2(5, FieldElement::zero(k));
            c2[2] = one;
            c2[0] = one;
            hs.push_back(LinearForm(k, c2));
            std::vector<FieldElement> c3(5, FieldElement::zero(k));
            c3[2] = one;
            c3[4] = FieldElement::fromConstant(k, Constant(5));
            hs.push_back(LinearForm(k, c3));
            std::vector<FieldElement> c4(5, FieldElement::zero(k));
            c4[2] = a;
            c4[1] = one;
            c4[3] = b;
            hs.push_back(LinearForm(k, c4));
        }
        std::vector<FieldElement> dets;
        for (const auto& H : hs) dets.push_back(epsDeterminant(qs[2], H));
        AtomBasis basis(k);
        auto classes = basis.refine(dets);
        for (size_t i = 1; i < classes.size(); ++i) REQUIRE(basis.equal(classes[0], classes[i]));
    }

    SECTION("hyperplane through the vertex is rejected") {
        REQUIRE(codeOf([&] { epsDeterminant(qs[0], coordForm(k, 0)); }) == Errc::VertexOnHyperplane);
    }

    SECTION("trivial discriminant") {
        auto Q = diagMatrix(k, {1, 1, 1, 1, 0});
        REQUIRE(epsDeterminant(Q, coordForm(k, 4)) == one);
        AtomBasis basis(k);
        REQUIRE(basis.trivial(basis.classOf(epsDeterminant(Q, coordForm(k, 4)))));
    }
}

TEST_CASE("discriminants over the quadratic extension", "[pencil]") {
    auto k = kField();
    auto L = extendFieldByParam(k, "a");
    auto A = pencilA(L), B = pencilB(L);
    BinaryForm f = charForm(A, B);
    auto locus = degeneracyLocus(f, L);

    REQUIRE(displays(locus) ==
            std::vector<std::string>{"[1 : 0]", "[0 : 1]", "[1 : -1]", "[1 : -b]", "[b*c : -a]"});
    for (const auto& p : locus) REQUIRE(p.residueField->sameAs(*L));

    FieldElement z = FieldElement::zero(L);
    for (const auto& p : locus) REQUIRE(f.evaluate({p.lambda, p.mu}, z).isZero());

    SECTION("both endpoint discriminants collapse to bc") {
        auto q0 = quadricAt(locus[0], A, B);
        auto q1 = quadricAt(locus[1], A, B);
        FieldElement d0 = epsDeterminant(q0, admissibleHyperplane(q0));
        FieldElement d1 = epsDeterminant(q1, admissibleHyperplane(q1));
        AtomBasis basis(L);
        auto classes = basis.refine({d0, d1, P(L, "b") * P(L, "c")});
        REQUIRE(basis.equal(classes[0], classes[2]));
        REQUIRE(basis.equal(classes[1], classes[2]));
        REQUIRE_FALSE(basis.trivial(classes[0]));
    }
}

TEST_CASE("tangent forms at supplied smooth points", "[pencil]") {
    auto k = kField();
    auto L = extendFieldByParam(k, "a");
    auto A = pencilA(L), B = pencilB(L);
    auto locus = degeneracyLocus(charForm(A, B), L);
    auto q0 = quadricAt(locus[0], A, B);
    auto q1 = quadricAt(locus[1], A, B);

    FieldElement zero = FieldElement::zero(L);
    FieldElement one = FieldElement::one(L);
    FieldElement iC = FieldElement::fromConstant(L, Constant::i());
    FieldElement s = FieldElement::extGenerator(L);
    FieldElement aL = P(L, "a");

    SECTION("gradient at [i : 0 : sqrt(a) : 0 : 0]") {
        std::vector<FieldElement> p0 = {iC, zero, s, zero, zero};
        LinearForm l0 = tangentForm(q0, p0);
        REQUIRE(l0.c[0] == mulInt(aL * iC, 2));
        REQUIRE(l0.c[2] == mulInt(s, 2));
        for (int i : {1, 3, 4}) REQUIRE(l0.c[i].isZero());
    }

    SECTION("gradient at [0 : i : 1 : 0 : 0]") {
        std::vector<FieldElement> p1 = {zero, iC, one, zero, zero};
        LinearForm l1 = tangentForm(q1, p1);
        REQUIRE(l1.c[1] == mulInt(iC, 2));
        REQUIRE(l1.c[2] == mulInt(one, 2));
        for (int i : {0, 3, 4}) REQUIRE(l1.c[i].isZero());
    }

    SECTION("cone gradient") {
        auto cone = diagMatrix(k, {1, -1, 0, 0, 0});
        std::vector<FieldElement> p = {FieldElement::one(k), FieldElement::one(k),
                                       FieldElement::zero(k), FieldElement::zero(k),
                                       FieldElement::zero(k)};
        LinearForm l = tangentForm(cone, p);
        REQUIRE(l.c[0] == FieldElement::one(k));
        REQUIRE(l.c[1] == -FieldElement::one(k));
    }

    SECTION("errors") {
        std::vector<FieldElement> offQ = {one, zero, zero, zero, zero};
        REQUIRE(codeOf([&] { tangentForm(q0, offQ); }) == Errc::NotOnQuadric);
        std::vector<FieldElement> vertex = {zero, zero, zero, one, zero};
        REQUIRE(codeOf([&] { tangentForm(q0, vertex); }) == Errc::SingularPoint);
    }
}

TEST_CASE("splitting the tangent section", "[pencil]") {
    auto k = kField();
    auto L = extendFieldByParam(k, "a");

    SECTION("reference point over the extension") {
        auto A = pencilA(L), B = pencilB(L);
        auto locus = degeneracyLocus(charForm(A, B), L);
        auto q0 = quadricAt(locus[0], A, B);
        FieldElement zero = FieldElement::zero(L);
        FieldElement iC = FieldElement::fromConstant(L, Constant::i());
        FieldElement s = FieldElement::extGenerator(L);
        FieldElement bL = P(L, "b"), cL = P(L, "c");
        std::vector<FieldElement> p0 = {iC, zero, s, zero, zero};

        FieldElement eps = epsDeterminant(q0, admissibleHyperplane(q0));
        SplitSection sec = splitTangentSection(q0, p0, &eps);

        REQUIRE(sec.restricted == xsq(L, 1).scaled(bL) + xsq(L, 4).scaled(cL));
        REQUIRE(sec.scale == bL);
        REQUIRE(sec.alpha == -(cL / bL));
        REQUIRE(sec.u.c[1] == FieldElement::one(L));
        REQUIRE(sec.v.c[4] == FieldElement::one(L));
        REQUIRE_FALSE(sec.splitsOverField);
        REQUIRE_FALSE(sec.f1.has_value());
        REQUIRE(!sec.extensionLabel.empty());
        REQUIRE(isSquare(sec.alpha * eps));

        XPoly u = sec.u.toPoly(), v = sec.v.toPoly();
        REQUIRE(sec.restricted == (u * u - (v * v).scaled(sec.alpha)).scaled(sec.scale));
    }

    SECTION("second reference point restricts to bc x0^2 + a x3^2") {
        auto A = pencilA(L), B = pencilB(L);
        auto locus = degeneracyLocus(charForm(A, B), L);
        auto q1 = quadricAt(locus[1], A, B);
        FieldElement zero = FieldElement::zero(L);
        FieldElement iC = FieldElement::fromConstant(L, Constant::i());
        FieldElement one = FieldElement::one(L);
        FieldElement aL = P(L, "a"), bL = P(L, "b"), cL = P(L, "c");
        std::vector<FieldElement> p1 = {zero, iC, one, zero, zero};

        FieldElement eps = epsDeterminant(q1, admissibleHyperplane(q1));
        SplitSection sec = splitTangentSection(q1, p1, &eps);
        REQUIRE(sec.restricted == xsq(L, 0).scaled(bL * cL) + xsq(L, 3).scaled(aL));
        REQUIRE(isSquare(sec.alpha * eps));
        // over L the class of alpha is bc, which is not a square
        REQUIRE_FALSE(sec.splitsOverField);
    }

    SECTION("hyperbolic section splits over the field") {
        XPoly form = xvar(k, 0) * xvar(k, 3) + xsq(k, 1) - xsq(k, 2);
        auto Q = QuadricMatrix::fromForm(form);
        std::vector<FieldElement> p = {FieldElement::one(k), FieldElement::zero(k),
                                       FieldElement::zero(k), FieldElement::zero(k),
                                       FieldElement::zero(k)};
        SplitSection sec = splitTangentSection(Q, p);
        REQUIRE(sec.restricted == xsq(k, 1) - xsq(k, 2));
        REQUIRE(sec.splitsOverField);
        REQUIRE(sec.f1.has_value());
        REQUIRE(sec.f2.has_value());
        REQUIRE(sec.f1->toPoly() * sec.f2->toPoly() == sec.restricted);
    }

    SECTION("sum of squares splits through i") {
        XPoly form = xvar(k, 0) * xvar(k, 3) + xsq(k, 1) + xsq(k, 2);
        auto Q = QuadricMatrix::fromForm(form);
        std::vector<FieldElement> p = {FieldElement::one(k), FieldElement::zero(k),
                                       FieldElement::zero(k), FieldElement::zero(k),
                                       FieldElement::zero(k)};
        SplitSection sec = splitTangentSection(Q, p);
        REQUIRE(sec.splitsOverField);
        FieldElement iC = FieldElement::fromConstant(k, Constant::i());
        REQUIRE(sec.f1->c[1] == FieldElement::one(k));
        REQUIRE(sec.f1->c[2] == iC);
        REQUIRE(sec.f2->c[1] == FieldElement::one(k));
        REQUIRE(sec.f2->c[2] == -iC);
        REQUIRE(sec.f1->toPoly() * sec.f2->toPoly() == sec.restricted);
    }

    SECTION("cross-term section with no diagonal entries") {
        XPoly form = xvar(k, 0) * xvar(k, 3) + xvar(k, 1) * xvar(k, 2);
        auto Q = QuadricMatrix::fromForm(form);
        std::vector<FieldElement> p = {FieldElement::one(k), FieldElement::zero(k),
                                       FieldElement::zero(k), FieldElement::zero(k),
                                       FieldElement::zero(k)};
        SplitSection sec = splitTangentSection(Q, p);
        REQUIRE(sec.restricted == xvar(k, 1) * xvar(k, 2));
        REQUIRE(sec.splitsOverField);
        REQUIRE(sec.f1->toPoly() * sec.f2->toPoly() == sec.restricted);
    }

    SECTION("rank-1 section is rejected") {
        XPoly form = xvar(k, 0) * xvar(k, 3) + xsq(k, 1);
        auto Q = QuadricMatrix::fromForm(form);
        std::vector<FieldElement> p = {FieldElement::one(k), FieldElement::zero(k),
                                       FieldElement::zero(k), FieldElement::zero(k),
                                       FieldElement::zero(k)};
        REQUIRE(codeOf([&] { splitTangentSection(Q, p); }) == Errc::RankNotTwo);
    }
}

TEST_CASE("star subschemes", "[pencil]") {
    auto k = kField();

    auto epsTable = [](const std::vector<ClosedPoint>& locus, const QuadricMatrix& A,
                       const QuadricMatrix& B) {
        std::vector<FieldElement> dets;
        for (const auto& T : locus) {
            auto q = quadricAt(T, A, B);
            dets.push_back(epsDeterminant(q, admissibleHyperplane(q)));
        }
        return dets;
    };

    SECTION("reference surface over the base field") {
        auto A = pencilA(k), B = pencilB(k);
        auto locus = degeneracyLocus(charForm(A, B), k);
        auto dets = epsTable(locus, A, B);
        auto subs = starSubschemes(locus, dets, k);
        REQUIRE(subs == std::vector<std::vector<int>>{{0, 1}});

        // clause-by-clause recheck of the returned subscheme
        REQUIRE(locus[0].degree + locus[1].degree == 2);
        REQUIRE(isSquare(dets[0] * dets[1]));
        REQUIRE_FALSE(isSquare(dets[0]));
        REQUIRE_FALSE(isSquare(dets[1]));
        // a rejected pair violates the norm clause
        REQUIRE_FALSE(isSquare(dets[0] * dets[2]));
    }

    SECTION("reference surface over the extension") {
        auto L = extendFieldByParam(k, "a");
        auto A = pencilA(L), B = pencilB(L);
        auto locus = degeneracyLocus(charForm(A, B), L);
        auto dets = epsTable(locus, A, B);
        auto subs = starSubschemes(locus, dets, L);
        REQUIRE(subs == std::vector<std::vector<int>>{{0, 1}});
    }

    SECTION("all discriminants trivial yields nothing") {
        auto I = diagMatrix(k, {1, 1, 1, 1, 1});
        auto D = diagMatrix(k, {1, 2, 3, 4, 5});
        auto locus = degeneracyLocus(charForm(I, D), k);
        auto dets = epsTable(locus, I, D);
        AtomBasis basis(k);
        for (const auto& d : dets) REQUIRE(basis.trivial(basis.classOf(d)));
        REQUIRE(starSubschemes(locus, dets, k).empty());
    }

    SECTION("a quadratic point with square norm forms a singleton") {
        FieldElement a = P(k, "a"), b = P(k, "b");
        XPoly l = lamVar(k), m = muVar(k);
        XPoly f2 = m * (l * l - (m * m).scaled(a)) * (l * l - (m * m).scaled(b));
        auto locus = degeneracyLocus(f2, k);

        const auto& rfA = locus[1].residueField;
        FieldElement sA = FieldElement::extGenerator(rfA);
        FieldElement onePlus = FieldElement::one(rfA) + sA;
        FieldElement epsA = FieldElement::param(rfA, "b") * onePlus * onePlus;
        REQUIRE_FALSE(isSquare(epsA));
        REQUIRE(isSquare(epsA.normToBase()));

        std::vector<FieldElement> dets = {P(k, "b"), epsA, FieldElement::one(locus[2].residueField)};
        auto subs = starSubschemes(locus, dets, k);
        REQUIRE(subs == std::vector<std::vector<int>>{{1}});
    }

    SECTION("misaligned table is rejected") {
        auto A = pencilA(k), B = pencilB(k);
        auto locus = degeneracyLocus(charForm(A, B), k);
        std::vector<FieldElement> dets = {P(k, "a")};
        REQUIRE(codeOf([&] { starSubschemes(locus, dets, k); }) == Errc::ValidationError);
    }
}
