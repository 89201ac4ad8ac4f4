#include "doctest.h"

#include "n2alg/ns_fields.hpp"

using namespace n2alg;

namespace {
NsElement B0(Kind k, int n) { return NsElement::basis(0, k, n); }
}

TEST_CASE("vacuum module arithmetic") {
    // J(1) mu = (1/3) c |0>
    VacuumVector mu = label_vector(FieldLabel::mu, FieldFlavor::homo);
    VacuumVector r = act(BasisKey{Kind::J, 1}, mu);
    VacuumVector expect;
    expect.add({}, CPoly::c_charge() * Scalar(make_rational(1, 3)));
    CHECK(r == expect);

    // annihilation
    CHECK(act(BasisKey{Kind::L, 0}, VacuumVector::vacuum()).is_zero());
    CHECK(act(BasisKey{Kind::Gp, 0}, VacuumVector::vacuum()).is_zero());

    // creation identities: tau+- = -+ G+-(-1/2) mu, J(-2)|0> = L(-1) mu
    VacuumVector tp = VacuumVector::word({{Kind::Gp, -1}});
    VacuumVector tm = VacuumVector::word({{Kind::Gm, -1}});
    CHECK(act(BasisKey{Kind::Gp, 0}, mu) == -tp);
    CHECK(act(BasisKey{Kind::Gm, 0}, mu) == tm);
    CHECK(act(BasisKey{Kind::L, -1}, mu) == VacuumVector::word({{Kind::J, -2}}));

    // G-(-1/2) tau+ = 2 omega - L(-1) mu
    VacuumVector om = VacuumVector::word({{Kind::L, -2}});
    VacuumVector lhs = act(BasisKey{Kind::Gm, 0}, tp);
    VacuumVector rhs = om.scale(Scalar(2)) - act(BasisKey{Kind::L, -1}, mu);
    CHECK(lhs == rhs);

    // omega = (1/4)(G-(-1/2) tau+ + G+(-1/2) tau-)
    VacuumVector comb = (act(BasisKey{Kind::Gm, 0}, tp) + act(BasisKey{Kind::Gp, 0}, tm))
                            .scale(Scalar(make_rational(1, 4)));
    CHECK(comb == om);

    // mu = (1/2) G+(1/2) tau-
    CHECK(act(BasisKey{Kind::Gp, 1}, tm).scale(Scalar(make_rational(1, 2))) == mu);

    // L(2) omega = (c/2) |0>
    VacuumVector c2 = act(BasisKey{Kind::L, 2}, om);
    VacuumVector expect2;
    expect2.add({}, CPoly::c_charge() * Scalar(make_rational(1, 2)));
    CHECK(c2 == expect2);

    // nonhomogeneous: tau1 = i G2(-1/2) mu, tau2 = -i G1(-1/2) mu
    VacuumVector t1 = VacuumVector::word({{Kind::G1, -1}});
    VacuumVector t2 = VacuumVector::word({{Kind::G2, -1}});
    CHECK(act(BasisKey{Kind::G2, 0}, mu) == t1.scale(-Scalar::i()));
    CHECK(act(BasisKey{Kind::G1, 0}, mu) == t2.scale(Scalar::i()));

    // weights
    CHECK(weight2_of(mu) == 2);
    CHECK(weight2_of(t1) == 3);
    CHECK(weight2_of(om) == 4);
    CHECK(j_weight_of(mu) == 0);
    CHECK(j_weight_of(VacuumVector::word({{Kind::Gp, -1}})) == 1);
}

TEST_CASE("classical field expansions") {
    for (auto flavor : {FieldFlavor::homo, FieldFlavor::nonhomo}) {
        auto chk = check_expansions_and_grading(flavor, 8);
        CHECK(chk.pass);
        if (!chk.pass)
            for (auto& m : chk.mismatches) MESSAGE(m);
    }
    // spot values of the defining expansion
    NsField mu = build_field(FieldLabel::mu, FieldFlavor::homo, 8);
    CHECK(mu.coeff(-3, 0b01) == -B0(Kind::Gp, 2)); // coefficient of phi+ x^{-n-2}, n = 1
    CHECK(mu.coeff(-1, 0b00) == B0(Kind::J, 0));
    NsField om = build_field(FieldLabel::omega, FieldFlavor::homo, 8);
    CHECK(om.coeff(-2, 0b00) == B0(Kind::L, 0)); // x^{-n-2} -> L(n)
    NsField tp = build_field(FieldLabel::tau_plus, FieldFlavor::homo, 8);
    CHECK(tp.coeff(-2, 0b10) == B0(Kind::L, 0).scale(Scalar(2)) + B0(Kind::J, 0)); // 2L(n)+(n+1)J(n), n=0
}

TEST_CASE("field bracket equals the OPE side") {
    for (auto flavor : {FieldFlavor::homo, FieldFlavor::nonhomo}) {
        auto chk = check_mu_bracket_vs_ope(flavor, 10);
        CHECK(chk.pass);
        CHECK(chk.compared > 100);
        if (!chk.pass)
            for (auto& m : chk.mismatches) MESSAGE(m);
    }
}

TEST_CASE("central term of the J-current bracket") {
    // restricted to the odd-free part: [J(m), J(n)] = (m/3) delta d
    NsField2 R = ope_rhs_mu(FieldFlavor::homo, 10);
    NsElement d = NsElement::basis(0, Kind::D, 0);
    CHECK(R.coeff(-3, 1, 0) == d.scale(Scalar(make_rational(2, 3)))); // m=2, n=-2
    CHECK(R.coeff(-2, 0, 0) == d.scale(Scalar(make_rational(1, 3)))); // m=1, n=-1
    CHECK(R.coeff(-2, -1, 0).is_zero());                              // m=1, n=0
}

TEST_CASE("bracket residues reproduce the relations") {
    for (auto flavor : {FieldFlavor::homo, FieldFlavor::nonhomo}) {
        auto chk = check_bracket_residues(flavor, 10, 3);
        CHECK(chk.pass);
        CHECK(chk.compared > 500);
        if (!chk.pass)
            for (auto& m : chk.mismatches) MESSAGE(m);
    }
}

TEST_CASE("derivative properties") {
    for (auto flavor : {FieldFlavor::homo, FieldFlavor::nonhomo}) {
        std::vector<FieldLabel> labels =
            flavor == FieldFlavor::homo
                ? std::vector<FieldLabel>{FieldLabel::vac, FieldLabel::mu, FieldLabel::tau_plus,
                                          FieldLabel::tau_minus, FieldLabel::omega}
                : std::vector<FieldLabel>{FieldLabel::vac, FieldLabel::mu, FieldLabel::tau1,
                                          FieldLabel::tau2, FieldLabel::omega};
        for (auto l : labels) {
            auto chk = check_derivative_property(l, flavor, 8);
            CHECK(chk.pass);
            if (!chk.pass)
                for (auto& m : chk.mismatches) MESSAGE(field_label_name(l), ": ", m);
        }
    }
    CHECK(check_derivative_property(FieldLabel::mu, FieldFlavor::one_var, 8).pass);
}

TEST_CASE("bracket specializations") {
    for (auto flavor : {FieldFlavor::homo, FieldFlavor::nonhomo})
        for (auto l : flavor == FieldFlavor::homo
                          ? std::vector<FieldLabel>{FieldLabel::vac, FieldLabel::mu,
                                                    FieldLabel::tau_plus, FieldLabel::omega}
                          : std::vector<FieldLabel>{FieldLabel::vac, FieldLabel::mu,
                                                    FieldLabel::tau2, FieldLabel::omega}) {
            auto chk = check_bracket_specializations(l, flavor, 8);
            CHECK(chk.pass);
            if (!chk.pass)
                for (auto& m : chk.mismatches) MESSAGE(field_label_name(l), ": ", m);
        }
}

TEST_CASE("grading conjugations") {
    GrassmannElement b(2, Scalar(2));
    b.add_term(0b11, Scalar(make_rational(1, 3)));
    for (auto flavor : {FieldFlavor::homo, FieldFlavor::nonhomo}) {
        std::vector<FieldLabel> labels =
            flavor == FieldFlavor::homo
                ? std::vector<FieldLabel>{FieldLabel::mu, FieldLabel::tau_plus, FieldLabel::omega}
                : std::vector<FieldLabel>{FieldLabel::mu, FieldLabel::tau2, FieldLabel::omega};
        for (auto l : labels) {
            auto chk = check_grading_conjugation(l, flavor, 8, b);
            CHECK(chk.pass);
            if (!chk.pass)
                for (auto& m : chk.mismatches) MESSAGE(field_label_name(l), ": ", m);
        }
    }
    // b = 1 is the identity conjugation
    auto trivial = check_grading_conjugation(FieldLabel::mu, FieldFlavor::nonhomo, 8,
                                             GrassmannElement::one(2));
    CHECK(trivial.pass);
}

TEST_CASE("reconstruction from modes") {
    for (auto flavor : {FieldFlavor::homo, FieldFlavor::nonhomo})
        for (auto l : {FieldLabel::vac, FieldLabel::mu, FieldLabel::omega}) {
            auto chk = check_reconstruction(l, flavor, 8);
            CHECK(chk.pass);
            if (!chk.pass)
                for (auto& m : chk.mismatches) MESSAGE(field_label_name(l), ": ", m);
        }
    CHECK(check_reconstruction(FieldLabel::mu, FieldFlavor::one_var, 8).pass);
}

TEST_CASE("flavor conversion") {
    auto chk = check_flavor_conversion(8);
    CHECK(chk.pass);
    if (!chk.pass)
        for (auto& m : chk.mismatches) MESSAGE(m);
}

TEST_CASE("weak supercommutativity with negative control") {
    auto pass4 = check_weak_supercommutativity(4, 10, true);
    CHECK(pass4.pass);
    if (!pass4.pass)
        for (auto& m : pass4.mismatches) MESSAGE(m);
    auto ctrl = check_weak_supercommutativity(1, 10, false);
    CHECK(ctrl.pass); // pass means the nonzero product was observed
}

TEST_CASE("fields suite runs serial and parallel identically") {
    auto a = run_fields_suite(8, 2, ExecMode::serial);
    auto b = run_fields_suite(8, 2, ExecMode::parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].pass);
        CHECK(a[i].pass == b[i].pass);
        if (!a[i].pass)
            for (auto& m : a[i].mismatches) MESSAGE(a[i].id, ": ", m);
    }
}
