#include "doctest.h"

#include "n2alg/grassmann.hpp"
#include "n2alg/rng.hpp"

using namespace n2alg;

TEST_CASE("scalar ring arithmetic is exact") {
    Scalar h = Scalar::inv_sqrt2();
    CHECK(h * h == Scalar(Rational(1, 2)));
    CHECK(Scalar::i() * Scalar::i() == Scalar(-1));
    CHECK(Scalar::sqrt2() * Scalar::sqrt2() == Scalar(2));
    Scalar ir2 = Scalar::i() * Scalar::sqrt2();
    CHECK(ir2 * ir2 == Scalar(-2));

    Rng rng(11);
    for (int t = 0; t < 64; ++t) {
        Scalar s = rng.scalar();
        if (s.is_zero()) continue;
        CHECK(s * s.inverse() == Scalar::one());
    }
}

TEST_CASE("scalar sqrt") {
    CHECK(Scalar(Rational(9, 4)).sqrt().value() == Scalar(Rational(3, 2)));
    CHECK(Scalar(-1).sqrt().value() * Scalar(-1).sqrt().value() == Scalar(-1));
    CHECK(Scalar(2).sqrt().value() * Scalar(2).sqrt().value() == Scalar(2));
    CHECK(!Scalar(3).sqrt().has_value());
    Rng rng(5);
    for (int t = 0; t < 48; ++t) {
        Scalar s = rng.scalar();
        Scalar sq = s * s;
        auto r = sq.sqrt();
        REQUIRE(r.has_value());
        CHECK(*r * *r == sq);
    }
}

TEST_CASE("scalar render/parse round trip") {
    Rng rng(3);
    for (int t = 0; t < 40; ++t) {
        Scalar s = rng.scalar();
        CHECK(Scalar::parse(s.str()) == s);
    }
    CHECK(Scalar::parse("1/2 - 3*r2 + i - i*r2") ==
          Scalar(Rational(1, 2), Rational(-3), Rational(1), Rational(-1)));
}

TEST_CASE("generator products and anticommutation") {
    const int L = 4;
    auto t1 = GrassmannElement::theta(L, 1);
    auto t2 = GrassmannElement::theta(L, 2);
    auto t1t2 = GrassmannElement::monomial(L, 0b11, Scalar::one());
    CHECK(t1 * t2 == t1t2);
    CHECK(t2 * t1 == -t1t2);
    CHECK((t1 * t1).is_zero());

    auto one = GrassmannElement::one(L);
    CHECK((one + t1t2) * (one - t1t2) == one);
}

TEST_CASE("inverse") {
    const int L = 4;
    auto one = GrassmannElement::one(L);
    CHECK(one.inverse() == one);

    auto a = GrassmannElement(L, Scalar(2));
    a.add_term(0b11, Scalar::one()); // 2 + t1t2
    auto expected = GrassmannElement(L, Scalar(Rational(1, 2)));
    expected.add_term(0b11, Scalar(Rational(-1, 4)));
    CHECK(a.inverse() == expected);
    CHECK(a * a.inverse() == one);

    CHECK_THROWS_AS(GrassmannElement::theta(L, 1).inverse(), std::domain_error);
}

TEST_CASE("body and soul") {
    const int L = 4;
    auto a = GrassmannElement(L, Scalar(3));
    a.add_term(0b1, Scalar::one()); // 3 + t1
    CHECK(a.body() == Scalar(3));
    CHECK(a.soul() == GrassmannElement::theta(L, 1));

    GrassmannElement z(L);
    CHECK(z.body() == Scalar::zero());
    CHECK(z.soul().is_zero());

    auto pure = GrassmannElement::monomial(L, 0b111, Scalar::i() * Scalar::sqrt2());
    CHECK(pure.body() == Scalar::zero());
    CHECK(pure.soul() == pure);
}

TEST_CASE("supercommutativity on random homogeneous elements") {
    const int L = 5;
    Rng rng(17);
    for (int t = 0; t < 40; ++t) {
        int pa = (int)rng.below(2), pb = (int)rng.below(2);
        auto a = rng.homogeneous_grassmann(L, pa);
        auto b = rng.homogeneous_grassmann(L, pb);
        auto lhs = a * b;
        auto rhs = b * a;
        if (pa && pb) rhs = -rhs;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("random invertible elements invert exactly") {
    Rng rng(23);
    for (int L : {2, 4, 6}) {
        for (int t = 0; t < 25; ++t) {
            auto a = rng.invertible_even(L) + rng.odd_element(L);
            CHECK(a * a.inverse() == GrassmannElement::one(L));
        }
    }
}

TEST_CASE("soul nilpotency") {
    Rng rng(29);
    for (int L : {2, 3, 4}) {
        for (int t = 0; t < 12; ++t) {
            auto s = rng.grassmann(L).soul();
            auto p = GrassmannElement::one(L);
            for (int k = 0; k <= L; ++k) p *= s;
            CHECK(p.is_zero());
        }
    }
}

TEST_CASE("grassmann sqrt on squares") {
    Rng rng(31);
    for (int t = 0; t < 30; ++t) {
        auto a = rng.invertible_even(4);
        auto r = (a * a).sqrt();
        REQUIRE(r.has_value());
        CHECK(*r * *r == a * a);
    }
}

TEST_CASE("grassmann render/parse round trip") {
    Rng rng(37);
    for (int t = 0; t < 20; ++t) {
        auto a = rng.grassmann(4);
        CHECK(GrassmannElement::parse(4, a.str()) == a);
    }
    auto g = GrassmannElement::parse(4, "(1/2) * t1t3 + (3 + i)");
    CHECK(g.body() == Scalar(Rational(3), Rational(0), Rational(1), Rational(0)));
    CHECK(g.coeff_at(0b101) == Scalar(Rational(1, 2)));
}
