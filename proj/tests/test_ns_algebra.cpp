#include "doctest.h"

#include "n2alg/ns_algebra.hpp"
#include "n2alg/rng.hpp"

using namespace n2alg;

namespace {
NsElement B(Kind k, int n) { return NsElement::basis(0, k, n); }
} // namespace

TEST_CASE("spot bracket values") {
    // [J_2, J_-2] = (2/3) d
    auto r = ns_bracket(B(Kind::J, 2), B(Kind::J, -2));
    CHECK(r == B(Kind::D, 0).scale(Scalar(make_rational(2, 3))));

    // [G+_{3/2}, G-_{-3/2}] = 2 L_0 + 3 J_0 + (2/3) d
    auto g = ns_bracket(B(Kind::Gp, 2), B(Kind::Gm, -1));
    auto expect = B(Kind::L, 0).scale(Scalar(2)) + B(Kind::J, 0).scale(Scalar(3)) +
                  B(Kind::D, 0).scale(Scalar(make_rational(2, 3)));
    CHECK(g == expect);

    // [G1_{1/2}, G2_{-1/2}] = -i J_0
    auto h = ns_bracket(B(Kind::G1, 1), B(Kind::G2, 0));
    CHECK(h == B(Kind::J, 0).scale(-Scalar::i()));

    // Virasoro central term: [L_2, L_-2] = 4 L_0 + 1/2 d
    auto vir = ns_bracket(B(Kind::L, 2), B(Kind::L, -2));
    CHECK(vir == B(Kind::L, 0).scale(Scalar(4)) + B(Kind::D, 0).scale(Scalar(make_rational(1, 2))));
}

TEST_CASE("super-skew and Jacobi sweeps, both bases and N=1") {
    for (auto tag : {BasisTag::homogeneous, BasisTag::nonhomogeneous, BasisTag::n1}) {
        auto rep = verify_lie_superalgebra(tag, 3, ExecMode::serial);
        CHECK(rep.pass);
        if (!rep.pass)
            for (auto& f : rep.failures) MESSAGE(f);
    }
}

TEST_CASE("parallel sweep agrees with serial") {
    auto a = verify_lie_superalgebra(BasisTag::homogeneous, 2, ExecMode::serial);
    auto b = verify_lie_superalgebra(BasisTag::homogeneous, 2, ExecMode::parallel);
    CHECK(a.pass == b.pass);
    CHECK(a.checks == b.checks);
}

TEST_CASE("basis conversion") {
    // G+_{1/2} -> (1/sqrt2)(G1_{1/2} - i G2_{1/2})
    auto conv = basis_convert(B(Kind::Gp, 1), BasisTag::nonhomogeneous);
    auto expect = B(Kind::G1, 1).scale(Scalar::inv_sqrt2()) +
                  B(Kind::G2, 1).scale(-Scalar::i() * Scalar::inv_sqrt2());
    CHECK(conv == expect);

    CHECK(basis_convert(B(Kind::L, 3), BasisTag::nonhomogeneous) == B(Kind::L, 3));

    auto rep = verify_basis_conversion(3);
    CHECK(rep.pass);

    // random element round trip with Grassmann coefficients
    Rng rng(7);
    NsElement e(4);
    e.add(BasisKey{Kind::Gp, 2}, rng.grassmann(4));
    e.add(BasisKey{Kind::Gm, -1}, rng.grassmann(4));
    e.add(BasisKey{Kind::L, 0}, rng.grassmann(4));
    CHECK(basis_convert(basis_convert(e, BasisTag::nonhomogeneous), BasisTag::homogeneous) == e);
}

TEST_CASE("automorphisms") {
    const int L = 4;
    Rng rng(13);
    GrassmannElement b = rng.invertible_even(L);

    Automorphism sc{Automorphism::Type::scale, b, BasisTag::homogeneous};
    CHECK(apply_automorphism(NsElement::basis(L, Kind::J, 0), sc) == NsElement::basis(L, Kind::J, 0));
    CHECK(apply_automorphism(NsElement::basis(L, Kind::Gp, 1), sc) ==
          NsElement::basis(L, Kind::Gp, 1).scale(b));

    Automorphism fl{Automorphism::Type::flip, GrassmannElement::one(L), BasisTag::homogeneous};
    CHECK(apply_automorphism(NsElement::basis(L, Kind::Gp, 1), fl) == NsElement::basis(L, Kind::Gm, 1));
    CHECK(apply_automorphism(NsElement::basis(L, Kind::J, 2), fl) == -NsElement::basis(L, Kind::J, 2));
    CHECK(apply_automorphism(NsElement::basis(L, Kind::L, 2), fl) == NsElement::basis(L, Kind::L, 2));

    // nonhomogeneous scale(b) on G1
    Automorphism scn{Automorphism::Type::scale, b, BasisTag::nonhomogeneous};
    auto binv = b.inverse();
    auto half = Scalar(make_rational(1, 2));
    auto expect = NsElement::basis(L, Kind::G1, 1).scale((b + binv) * half) +
                  NsElement::basis(L, Kind::G2, 1).scale((b - binv) * half * (-Scalar::i()));
    CHECK(apply_automorphism(NsElement::basis(L, Kind::G1, 1), scn) == expect);

    for (auto tag : {BasisTag::homogeneous, BasisTag::nonhomogeneous}) {
        auto rep = verify_automorphisms(tag, 3, b);
        CHECK(rep.pass);
        if (!rep.pass)
            for (auto& f : rep.failures) MESSAGE(f);
    }
}

TEST_CASE("algebra is generated by the G modes") {
    for (auto tag : {BasisTag::homogeneous, BasisTag::nonhomogeneous}) {
        auto rep = verify_generated_by_g(tag, 4);
        CHECK(rep.pass);
    }
}

TEST_CASE("subalgebras close under bracket") {
    CHECK(subalgebra(SubalgebraKind::osp22_neg) ==
          std::vector<BasisKey>{{Kind::L, -1}, {Kind::Gp, 0}, {Kind::Gm, 0}});
    for (auto k : {SubalgebraKind::osp12_neg, SubalgebraKind::osp12, SubalgebraKind::osp22_neg,
                   SubalgebraKind::osp22, SubalgebraKind::N1_j1, SubalgebraKind::N1_j2}) {
        auto rep = verify_subalgebra_closure(k);
        CHECK(rep.pass);
        if (!rep.pass)
            for (auto& f : rep.failures) MESSAGE(f);
    }
}

TEST_CASE("bracket with Grassmann coefficients keeps super-skew") {
    const int L = 4;
    Rng rng(19);
    for (int t = 0; t < 24; ++t) {
        // homogeneous elements: odd basis with even coeff etc.
        int pu = (int)rng.below(2), pv = (int)rng.below(2);
        auto mk = [&](int par) {
            Kind k = par ? Kind::Gp : Kind::L;
            auto c = rng.homogeneous_grassmann(L, 0);
            return NsElement::basis(L, k, (int)rng.range(-2, 2), c);
        };
        auto mk_twisted = [&](int par) {
            // odd coefficient times odd basis -> even element, etc.
            Kind k = par ? Kind::L : Kind::Gm;
            auto c = rng.homogeneous_grassmann(L, 1);
            return NsElement::basis(L, k, (int)rng.range(-2, 2), c);
        };
        NsElement u = rng.below(2) ? mk(pu) : mk_twisted(pu);
        NsElement v = rng.below(2) ? mk(pv) : mk_twisted(pv);
        auto lhs = ns_bracket(u, v);
        auto rhs = ns_bracket(v, u);
        if (pu && pv) CHECK(lhs == rhs);
        else CHECK(lhs == -rhs);
    }
}

TEST_CASE("element grammar round trip") {
    auto e = ns_element_parse(0, "(2) * L(3) + (1/2 + i) * G+(1/2) + (1) * d");
    CHECK(e == B(Kind::L, 3).scale(Scalar(2)) +
                   B(Kind::Gp, 1).scale(Scalar(Rational(1, 2)) + Scalar::i()) + B(Kind::D, 0));
    CHECK(ns_element_parse(0, e.str()) == e);
    auto g = ns_element_parse(0, "(1) * G1(-3/2)");
    CHECK(g == B(Kind::G1, -1));
}
