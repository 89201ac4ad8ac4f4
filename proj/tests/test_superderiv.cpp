#include "doctest.h"

#include "n2alg/rng.hpp"
#include "n2alg/superderiv.hpp"

using namespace n2alg;

namespace {
const int L = 4;
}

TEST_CASE("distinguished derivations square to d/dx") {
    auto ctx = make_rep_context(RepFamily::homo2, L);
    auto Dp = d_plus(ctx), Dm = d_minus(ctx);

    SuperDerivation two_dx(ctx.spec, L);
    two_dx.add(SuperSeries::constant(ctx.spec, L, GrassmannElement::scalar(L, Scalar(2))), "x");
    CHECK(sd_equal_on_probes(sd_commutator(Dp, Dm), two_dx));

    SuperDerivation zero(ctx.spec, L);
    CHECK(sd_equal_on_probes(sd_commutator(Dp, Dp), zero));
    CHECK(sd_equal_on_probes(sd_commutator(Dm, Dm), zero));

    auto nctx = make_rep_context(RepFamily::nonhomo2, L);
    CHECK(verify_dj_brackets(nctx).pass);
}

TEST_CASE("deformed derivations square to d/dx") {
    auto ctx = make_rep_context(RepFamily::n1_ds, L);
    GrassmannElement one = GrassmannElement::one(L);
    GrassmannElement three = GrassmannElement::scalar(L, Scalar(3));
    GrassmannElement two = GrassmannElement::scalar(L, Scalar(2));
    GrassmannElement s3 = one + GrassmannElement::monomial(L, 0b11, Scalar::one());
    GrassmannElement t1 = GrassmannElement::theta(L, 1);
    GrassmannElement t12 = GrassmannElement::theta(L, 1) + GrassmannElement::theta(L, 2);
    GrassmannElement zero_g(L);

    CHECK(verify_deformed_square(ctx, one, zero_g).pass);
    CHECK(verify_deformed_square(ctx, three, zero_g).pass);
    CHECK(verify_deformed_square(ctx, s3, t1).pass);
    CHECK(verify_deformed_square(ctx, two, t12).pass);
}

TEST_CASE("derivation formulas") {
    auto ctx = make_rep_context(RepFamily::n2_one_var, L);
    // J_n = x^n phi d/dphi
    for (int n : {-2, 0, 3}) {
        SuperDerivation expect(ctx.spec, L);
        expect.add(SuperSeries::even_power(ctx.spec, L, 0, n) * SuperSeries::odd_var(ctx.spec, L, 0),
                   "phi");
        CHECK(sd_equal_on_probes(make_rep(ctx, Kind::J, n), expect));
    }
    // G2_{n-1/2} = i x^n (d/dphi + phi d/dx)
    {
        int n = 2;
        SuperDerivation expect(ctx.spec, L);
        expect.add(SuperSeries::even_power(ctx.spec, L, 0, n).scale(Scalar::i()), "phi");
        expect.add((SuperSeries::even_power(ctx.spec, L, 0, n) * SuperSeries::odd_var(ctx.spec, L, 0))
                       .scale(Scalar::i()),
                   "x");
        CHECK(sd_equal_on_probes(make_rep(ctx, Kind::G2, n), expect));
    }
    // n1_ds: G_{n-1/2} = -x^n((1/s) d/dphi - s phi d/dx)
    {
        GrassmannElement s = GrassmannElement::scalar(L, Scalar(3));
        auto dctx = make_rep_context(RepFamily::n1_ds, L, 12, s);
        int n = 1;
        SuperDerivation expect(dctx.spec, L);
        expect.add(SuperSeries::even_power(dctx.spec, L, 0, n).scale(Scalar(make_rational(-1, 3))),
                   "phi");
        expect.add(SuperSeries::even_power(dctx.spec, L, 0, n) * SuperSeries::odd_var(dctx.spec, L, 0)
                       .scale(Scalar(3)),
                   "x");
        CHECK(sd_equal_on_probes(make_rep(dctx, Kind::Gn1, n), expect));
    }
}

TEST_CASE("all representation families satisfy their NS relations") {
    GrassmannElement s_soul =
        GrassmannElement::one(L) + GrassmannElement::monomial(L, 0b11, Scalar::one());
    struct Entry {
        RepFamily fam;
        GrassmannElement s;
    };
    std::vector<Entry> entries = {
        {RepFamily::homo2, GrassmannElement()},
        {RepFamily::nonhomo2, GrassmannElement()},
        {RepFamily::n1, GrassmannElement()},
        {RepFamily::n1_ds, GrassmannElement::scalar(L, Scalar(3))},
        {RepFamily::n1_ds, s_soul},
        {RepFamily::n2_one_var, GrassmannElement()},
    };
    for (auto& e : entries) {
        auto ctx = make_rep_context(e.fam, L, 14, e.s);
        auto rep = verify_rep(ctx, 2, ExecMode::serial);
        CHECK(rep.pass);
        if (!rep.pass)
            for (auto& f : rep.failures) MESSAGE(f);
    }
}

TEST_CASE("one-variable derivations span Der") {
    auto ctx = make_rep_context(RepFamily::n2_one_var, L);
    auto rep = verify_one_var_spanning(ctx, 3);
    CHECK(rep.pass);
    if (!rep.pass)
        for (auto& f : rep.failures) MESSAGE(f);
}

TEST_CASE("verify_rep parallel equals serial") {
    auto ctx = make_rep_context(RepFamily::n1, L);
    auto a = verify_rep(ctx, 2, ExecMode::serial);
    auto b = verify_rep(ctx, 2, ExecMode::parallel);
    CHECK(a.pass == b.pass);
    CHECK(a.checks == b.checks);
}

TEST_CASE("superconformal shift tuple") {
    // (x1 - x2 - phi1+ phi2- - phi1- phi2+, phi1+ - phi2+, phi1- - phi2-)
    // is N=2 superconformal in (x1, phi1+, phi1-).
    auto spec = make_spec({{"x1", -8, 8}, {"x2", -8, 8}},
                          {"phi1+", "phi1-", "phi2+", "phi2-"});
    auto x1 = SuperSeries::even_power(spec, L, 0, 1);
    auto x2 = SuperSeries::even_power(spec, L, 1, 1);
    auto p1p = SuperSeries::odd_var(spec, L, 0);
    auto p1m = SuperSeries::odd_var(spec, L, 1);
    auto p2p = SuperSeries::odd_var(spec, L, 2);
    auto p2m = SuperSeries::odd_var(spec, L, 3);
    CoordTuple f{x1 - x2 - p1p * p2m - p1m * p2p, {p1p - p2p, p1m - p2m}};
    CHECK(is_superconformal(ScFlavor::homo2, f, "x1", {"phi1+", "phi1-"}));

    // breaking one sign must fail
    CoordTuple bad{x1 - x2 - p1p * p2m + p1m * p2p, {p1p - p2p, p1m - p2m}};
    CHECK(!is_superconformal(ScFlavor::homo2, bad, "x1", {"phi1+", "phi1-"}));
}

TEST_CASE("deformation changes the superconformal structure") {
    auto spec = make_spec({{"x", -8, 8}}, {"phi"});
    auto x = SuperSeries::even_power(spec, L, 0, 1);
    auto phi = SuperSeries::odd_var(spec, L, 0);
    GrassmannElement s = GrassmannElement::scalar(L, Scalar(3));

    // (x, s phi) is not D_1-superconformal for s != +-1; it is the map that
    // conjugates the D_1 structure into the D_s structure.
    CoordTuple f{x, {phi.scale(s)}};
    CHECK(!is_superconformal(ScFlavor::n1, f, "x", {"phi"}));

    {
        // g = exp(M G_{1,1/2}) (x, phi) is D_1-superconformal; its conjugate
        // by (x, s phi) must be D_s-superconformal.
        GrassmannElement M = GrassmannElement::theta(L, 1);
        SuperSeries xn = SuperSeries::even_power(spec, L, 0, 1);
        CoordTuple g{x - (xn * phi).scale(M), {phi + xn.scale(M)}};
        CHECK(is_superconformal(ScFlavor::n1, g, "x", {"phi"}));
        GrassmannElement sinv = s.inverse();
        CoordTuple conj{x - (xn * phi).scale(M * s), {phi + xn.scale(M * sinv)}};
        CHECK(is_superconformal(ScFlavor::n1_ds, conj, "x", {"phi"}, s));
        CHECK(!is_superconformal(ScFlavor::n1, conj, "x", {"phi"}));
    }

    // diagonal grading maps are D_s-superconformal for every s
    {
        GrassmannElement a = GrassmannElement::scalar(L, Scalar(2));
        CoordTuple grad{x.scale(a * a), {phi.scale(a)}};
        CHECK(is_superconformal(ScFlavor::n1_ds, grad, "x", {"phi"}, s));
        CHECK(is_superconformal(ScFlavor::n1, grad, "x", {"phi"}));
    }

    // identity map passes every flavor
    CoordTuple id1{x, {phi}};
    CHECK(is_superconformal(ScFlavor::n1, id1, "x", {"phi"}));
    CHECK(is_superconformal(ScFlavor::n1_ds, id1, "x", {"phi"}, GrassmannElement::one(L)));

    auto spec2 = make_spec({{"x", -8, 8}}, {"phi+", "phi-"});
    auto xx = SuperSeries::even_power(spec2, L, 0, 1);
    CoordTuple id2{xx, {SuperSeries::odd_var(spec2, L, 0), SuperSeries::odd_var(spec2, L, 1)}};
    CHECK(is_superconformal(ScFlavor::homo2, id2, "x", {"phi+", "phi-"}));

    auto spec3 = make_spec({{"x", -8, 8}}, {"phi1", "phi2"});
    auto x3 = SuperSeries::even_power(spec3, L, 0, 1);
    CoordTuple id3{x3, {SuperSeries::odd_var(spec3, L, 0), SuperSeries::odd_var(spec3, L, 1)}};
    CHECK(is_superconformal(ScFlavor::nonhomo2, id3, "x", {"phi1", "phi2"}));
}

TEST_CASE("commutator on random derivations respects Jacobi") {
    auto ctx = make_rep_context(RepFamily::homo2, L);
    Rng rng(61);
    auto rand_deriv = [&](int parity) {
        // random homogeneous derivation as a combination of rep elements
        SuperDerivation D(ctx.spec, L);
        for (int t = 0; t < 2; ++t) {
            int n = (int)rng.range(-2, 2);
            if (parity == 0) {
                Kind k = rng.below(2) ? Kind::L : Kind::J;
                D = D + make_rep(ctx, k, n).scale(rng.homogeneous_grassmann(L, 0));
            } else {
                Kind k = rng.below(2) ? Kind::Gp : Kind::Gm;
                D = D + make_rep(ctx, k, n).scale(rng.homogeneous_grassmann(L, 0));
            }
        }
        return D;
    };
    for (int t = 0; t < 6; ++t) {
        int pu = (int)rng.below(2), pv = (int)rng.below(2), pw = (int)rng.below(2);
        auto u = rand_deriv(pu), v = rand_deriv(pv), w = rand_deriv(pw);
        auto t1 = sd_commutator(sd_commutator(u, v), w);
        auto t2 = sd_commutator(sd_commutator(v, w), u);
        auto t3 = sd_commutator(sd_commutator(w, u), v);
        SuperDerivation sum = ((pu & pw) ? -t1 : t1) + ((pv & pu) ? -t2 : t2) +
                              ((pw & pv) ? -t3 : t3);
        SuperDerivation zero(ctx.spec, L);
        CHECK(sd_equal_on_probes(sum, zero, 2));
    }
}
