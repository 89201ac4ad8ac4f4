#include "doctest.h"

#include "n2alg/rng.hpp"
#include "n2alg/superseries.hpp"

using namespace n2alg;

namespace {

const int L = 4;

SpecPtr spec_x_pm(int w = 12) {
    return make_spec({{"x", -w, w}}, {"phi+", "phi-"});
}

SuperSeries random_series(Rng& rng, const SpecPtr& sp, int max_terms = 5, int max_exp = 3) {
    SuperSeries s = SuperSeries::zero(sp, L);
    int n = (int)rng.below((std::uint64_t)max_terms) + 1;
    for (int t = 0; t < n; ++t) {
        TermKey key;
        for (std::size_t v = 0; v < sp->even.size(); ++v)
            key.e[v] = (int)rng.range(-max_exp, max_exp);
        key.mask = (std::uint8_t)rng.below(1ull << sp->odd.size());
        s.add_term(key, rng.grassmann(L));
    }
    return s;
}

} // namespace

TEST_CASE("series products") {
    auto sp = spec_x_pm();
    auto x = SuperSeries::even_power(sp, L, 0, 1);
    auto xinv = SuperSeries::even_power(sp, L, 0, -1);
    auto one = SuperSeries::constant(sp, L, GrassmannElement::one(L));
    CHECK(x * xinv == one);

    auto fp = SuperSeries::odd_var(sp, L, 0);
    auto fm = SuperSeries::odd_var(sp, L, 1);
    CHECK(((fp * fm) * fp).is_zero());

    CHECK((x - fp * fm) * (x + fp * fm) == x * x);
}

TEST_CASE("derivatives") {
    auto sp = spec_x_pm();
    auto x = SuperSeries::even_power(sp, L, 0, 1);
    auto fp = SuperSeries::odd_var(sp, L, 0);
    auto fm = SuperSeries::odd_var(sp, L, 1);

    CHECK((x * x).derive("x") == x.scale(Scalar(2)));
    CHECK((fp * fm).derive("phi+") == fm);
    CHECK((fp * fm).derive("phi-") == -fp);
}

TEST_CASE("odd derivatives anticommute") {
    auto sp = spec_x_pm();
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
        auto f = random_series(rng, sp);
        CHECK(f.derive("phi+").derive("phi-") == -f.derive("phi-").derive("phi+"));
    }
}

TEST_CASE("Leibniz rule with Koszul sign") {
    auto sp = spec_x_pm();
    Rng rng(43);
    for (int t = 0; t < 24; ++t) {
        // build homogeneous factors so the sign is well defined
        SuperSeries f = SuperSeries::zero(sp, L), g = SuperSeries::zero(sp, L);
        int pf = (int)rng.below(2), pg = (int)rng.below(2);
        for (int j = 0; j < 3; ++j) {
            TermKey k1;
            k1.e[0] = (int)rng.range(-2, 2);
            k1.mask = (std::uint8_t)rng.below(4);
            int gp = (pf - parity_of_mask(k1.mask) + 2) % 2;
            f.add_term(k1, rng.homogeneous_grassmann(L, gp));
            TermKey k2;
            k2.e[0] = (int)rng.range(-2, 2);
            k2.mask = (std::uint8_t)rng.below(4);
            int gq = (pg - parity_of_mask(k2.mask) + 2) % 2;
            g.add_term(k2, rng.homogeneous_grassmann(L, gq));
        }
        for (const char* var : {"x", "phi+"}) {
            auto lhs = (f * g).derive(var);
            auto rhs = f.derive(var) * g;
            auto second = f * g.derive(var);
            bool odd_var = var[0] == 'p';
            if (odd_var && pf == 1) rhs -= second;
            else rhs += second;
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("series multiplication is associative and supercommutative") {
    auto sp = spec_x_pm();
    Rng rng(47);
    for (int t = 0; t < 12; ++t) {
        auto a = random_series(rng, sp, 3, 2);
        auto b = random_series(rng, sp, 3, 2);
        auto c = random_series(rng, sp, 3, 2);
        CHECK((a * b) * c == a * (b * c));
    }
    // homogeneous supercommutativity
    for (int t = 0; t < 12; ++t) {
        int pa = (int)rng.below(2), pb = (int)rng.below(2);
        SuperSeries a = SuperSeries::zero(sp, L), b = SuperSeries::zero(sp, L);
        TermKey ka, kb;
        ka.e[0] = (int)rng.range(-2, 2);
        ka.mask = (std::uint8_t)rng.below(4);
        kb.e[0] = (int)rng.range(-2, 2);
        kb.mask = (std::uint8_t)rng.below(4);
        a.add_term(ka, rng.homogeneous_grassmann(L, (pa + parity_of_mask(ka.mask)) % 2));
        b.add_term(kb, rng.homogeneous_grassmann(L, (pb + parity_of_mask(kb.mask)) % 2));
        auto lhs = a * b;
        auto rhs = b * a;
        if (pa && pb) rhs = -rhs;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("taylor shift, two-term and second-derivative forms") {
    auto sp = make_spec({{"x", -12, 12}}, {"p1+", "p1-", "p2+", "p2-"});
    auto x = SuperSeries::even_power(sp, L, 0, 1);
    auto p1p = SuperSeries::odd_var(sp, L, 0);
    auto p1m = SuperSeries::odd_var(sp, L, 1);
    auto p2p = SuperSeries::odd_var(sp, L, 2);
    auto p2m = SuperSeries::odd_var(sp, L, 3);

    // f = x, shift = p1+ p2-
    auto s1 = p1p * p2m;
    CHECK(x.taylor_shift(0, s1) == x + s1);

    // f = x^-1, shift = p1+ p2- + p1- p2+: two-derivative closed form
    auto shift = p1p * p2m + p1m * p2p;
    auto f = SuperSeries::even_power(sp, L, 0, -1);
    auto expected = f - shift * SuperSeries::even_power(sp, L, 0, -2) +
                    (p1p * p1m * p2p * p2m).scale(Scalar(2)) * SuperSeries::even_power(sp, L, 0, -3);
    CHECK(f.taylor_shift(0, shift) == expected);

    // Grassmann-soul shift
    auto theta12 = SuperSeries::constant(sp, L, GrassmannElement::monomial(L, 0b11, Scalar::one()));
    auto x2 = x * x;
    CHECK(x2.taylor_shift(0, theta12) == x2 + theta12.scale(Scalar(2)) * x);

    // non-nilpotent shift rejected
    CHECK_THROWS_AS(x.taylor_shift(0, x), std::invalid_argument);
}

TEST_CASE("substitution") {
    auto two = make_spec({{"x", -12, 12}, {"x0", -12, 12}}, {"phi+", "phi-"});
    auto x = SuperSeries::even_power(two, L, 0, 1);
    auto x0 = SuperSeries::even_power(two, L, 1, 1);

    std::map<std::string, EvenBinding> eb;
    eb.emplace("x", EvenBinding{x + x0, std::nullopt});
    auto out = ss_substitute(x * x, eb, {});
    CHECK(out == x * x + (x * x0).scale(Scalar(2)) + x0 * x0);

    // odd substitution phi+ -> (q1 + i q2)/sqrt(2)
    auto nh = make_spec({{"x", -12, 12}}, {"q1", "q2"});
    auto q1 = SuperSeries::odd_var(nh, L, 0);
    auto q2 = SuperSeries::odd_var(nh, L, 1);
    auto homo = spec_x_pm();
    auto fp = SuperSeries::odd_var(homo, L, 0);
    std::map<std::string, SuperSeries> ob;
    ob.emplace("phi+", (q1 + q2.scale(Scalar::i())).scale(Scalar::inv_sqrt2()));
    ob.emplace("phi-", (q1 - q2.scale(Scalar::i())).scale(Scalar::inv_sqrt2()));
    auto conv = ss_substitute(fp, {}, ob);
    CHECK(conv == (q1 + q2.scale(Scalar::i())).scale(Scalar::inv_sqrt2()));

    // x^-1 with nilpotent correction: x -> x - phi+ phi-
    auto sp = spec_x_pm();
    auto xx = SuperSeries::even_power(sp, L, 0, 1);
    auto pp = SuperSeries::odd_var(sp, L, 0);
    auto pm = SuperSeries::odd_var(sp, L, 1);
    auto f = SuperSeries::even_power(sp, L, 0, -1);
    std::map<std::string, EvenBinding> eb2;
    TermKey xkey;
    xkey.e[0] = 1;
    eb2.emplace("x", EvenBinding{xx - pp * pm, xkey});
    auto got = ss_substitute(f, eb2, {});
    CHECK(got == f + pp * pm * SuperSeries::even_power(sp, L, 0, -2));
}

TEST_CASE("taylor shift agrees with substitution") {
    auto sp = spec_x_pm();
    Rng rng(53);
    auto x = SuperSeries::even_power(sp, L, 0, 1);
    auto pp = SuperSeries::odd_var(sp, L, 0);
    auto pm = SuperSeries::odd_var(sp, L, 1);
    for (int t = 0; t < 10; ++t) {
        SuperSeries f = SuperSeries::zero(sp, L);
        for (int j = 0; j < 3; ++j) {
            TermKey k;
            k.e[0] = (int)rng.range(0, 3);
            k.mask = (std::uint8_t)rng.below(4);
            f.add_term(k, rng.grassmann(L));
        }
        auto shift = (pp * pm).scale(rng.scalar()) +
                     SuperSeries::constant(sp, L, rng.even_soul(L));
        std::map<std::string, EvenBinding> eb;
        TermKey xkey;
        xkey.e[0] = 1;
        eb.emplace("x", EvenBinding{x + shift, xkey});
        CHECK(f.taylor_shift(0, shift) == ss_substitute(f, eb, {}));
    }
}

TEST_CASE("residue") {
    auto sp = spec_x_pm();
    auto xinv = SuperSeries::even_power(sp, L, 0, -1);
    auto one = SuperSeries::constant(sp, L, GrassmannElement::one(L));
    CHECK(xinv.residue(0) == one);

    auto fp = SuperSeries::odd_var(sp, L, 0);
    auto f = SuperSeries::even_power(sp, L, 0, 2) + (xinv * fp).scale(Scalar(3));
    CHECK(f.residue(0) == fp.scale(Scalar(3)));
}

TEST_CASE("formal Taylor theorem via exponentiated derivation") {
    // exp(x0 d/dx + phi0+ D+ + phi0- D-) f == f(x + x0 + phi0+ phi- + phi0- phi+,
    //                                          phi0+ + phi+, phi0- + phi-)
    auto sp = make_spec({{"x", -10, 10}, {"x0", 0, 10}}, {"phi+", "phi-", "phi0+", "phi0-"});
    Rng rng(59);
    auto x = SuperSeries::even_power(sp, L, 0, 1);
    auto x0 = SuperSeries::even_power(sp, L, 1, 1);
    auto fp = SuperSeries::odd_var(sp, L, 0);
    auto fm = SuperSeries::odd_var(sp, L, 1);
    auto f0p = SuperSeries::odd_var(sp, L, 2);
    auto f0m = SuperSeries::odd_var(sp, L, 3);

    for (int t = 0; t < 8; ++t) {
        SuperSeries f = SuperSeries::zero(sp, L);
        for (int j = 0; j < 3; ++j) {
            TermKey k;
            k.e[0] = (int)rng.range(-2, 2);
            k.mask = (std::uint8_t)rng.below(4); // only phi+, phi- in f
            f.add_term(k, rng.grassmann(L));
        }
        auto apply_T = [&](const SuperSeries& u) {
            auto Dp = u.derive("phi+") + fm * u.derive("x");
            auto Dm = u.derive("phi-") + fp * u.derive("x");
            return x0 * u.derive("x") + f0p * Dp + f0m * Dm;
        };
        SuperSeries lhs = f, pw = f;
        Rational fact(1);
        for (int k = 1; k <= 14; ++k) {
            pw = apply_T(pw);
            if (pw.is_zero()) break;
            fact *= k;
            lhs += pw.scale(Scalar(Rational(1) / fact));
        }
        std::map<std::string, EvenBinding> eb;
        TermKey xkey;
        xkey.e[0] = 1;
        eb.emplace("x", EvenBinding{x + x0 + f0p * fm + f0m * fp, xkey});
        std::map<std::string, SuperSeries> ob;
        ob.emplace("phi+", f0p + fp);
        ob.emplace("phi-", f0m + fm);
        auto rhs = ss_substitute(f, eb, ob);
        // compare where the x0-window certifies completeness of the exponential
        auto cmp = compare_certified(lhs, rhs);
        CHECK(cmp.pass);
        CHECK(cmp.region[1][1] >= 8); // substitution side is certified deep in x0
    }
}

TEST_CASE("negative powers through pow_int") {
    auto sp = spec_x_pm();
    auto x = SuperSeries::even_power(sp, L, 0, 1);
    auto pp = SuperSeries::odd_var(sp, L, 0);
    auto pm = SuperSeries::odd_var(sp, L, 1);
    TermKey xkey;
    xkey.e[0] = 1;
    auto f = x + pp * pm;
    auto finv = f.pow_int(-1, xkey);
    CHECK(finv * f == SuperSeries::constant(sp, L, GrassmannElement::one(L)));
}
