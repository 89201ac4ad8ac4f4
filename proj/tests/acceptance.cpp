// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Every tolerance here is exact (zero tolerance) over Q[i, sqrt(2)]-valued
// Grassmann arithmetic; the only numeric limits are wall-clock budgets.

#include "n2alg/delta.hpp"
#include "n2alg/expmap.hpp"
#include "n2alg/ns_fields.hpp"
#include "n2alg/superderiv.hpp"
#include "n2alg/verify.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

using namespace n2alg;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int num, const std::string& name, bool pass, double seconds,
            const std::string& note = "") {
    std::printf("%-4s criterion %2d: %s (%.1fs)%s%s\n", pass ? "PASS" : "FAIL", num, name.c_str(),
                seconds, note.empty() ? "" : " -- ", note.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ExecMode mode = ExecMode::parallel;

void criterion1() {
    auto t0 = Clock::now();
    bool pass = true;
    std::string note;
    for (auto tag : {BasisTag::homogeneous, BasisTag::nonhomogeneous}) {
        auto rep = verify_lie_superalgebra(tag, 4, mode);
        if (!rep.pass) {
            pass = false;
            note = rep.failures.empty() ? "axiom sweep failed" : rep.failures.front();
        }
    }
    auto B = [](Kind k, int n) { return NsElement::basis(0, k, n); };
    if (ns_bracket(B(Kind::J, 2), B(Kind::J, -2)) !=
        B(Kind::D, 0).scale(Scalar(make_rational(2, 3)))) {
        pass = false;
        note = "[J(2), J(-2)] wrong";
    }
    if (ns_bracket(B(Kind::Gp, 2), B(Kind::Gm, -1)) !=
        B(Kind::L, 0).scale(Scalar(2)) + B(Kind::J, 0).scale(Scalar(3)) +
            B(Kind::D, 0).scale(Scalar(make_rational(2, 3)))) {
        pass = false;
        note = "[G+(3/2), G-(-3/2)] wrong";
    }
    if (ns_bracket(B(Kind::G1, 1), B(Kind::G2, 0)) != B(Kind::J, 0).scale(-Scalar::i())) {
        pass = false;
        note = "[G1(1/2), G2(-1/2)] wrong";
    }
    double s = elapsed(t0);
    if (s >= 10.0) {
        pass = false;
        note = "runtime budget of 10 s exceeded";
    }
    report(1, "NS bracket tables: super-skew + super-Jacobi, indices -4..4, both bases", pass, s,
           note);
}

void criterion2() {
    auto t0 = Clock::now();
    bool pass = true;
    std::string note;
    const int L = 4;
    GrassmannElement soul_s =
        GrassmannElement::one(L) + GrassmannElement::monomial(L, 0b11, Scalar::one());
    struct Fam {
        RepFamily fam;
        GrassmannElement s;
        const char* name;
    };
    std::vector<Fam> fams = {{RepFamily::homo2, GrassmannElement(), "homo2"},
                             {RepFamily::nonhomo2, GrassmannElement(), "nonhomo2"},
                             {RepFamily::n1, GrassmannElement(), "n1"},
                             {RepFamily::n1_ds, GrassmannElement::scalar(L, Scalar(3)), "n1_ds(3)"},
                             {RepFamily::n1_ds, soul_s, "n1_ds(1+t1t2)"},
                             {RepFamily::n2_one_var, GrassmannElement(), "n2_one_var"}};
    for (auto& f : fams) {
        auto ctx = make_rep_context(f.fam, L, 14, f.s);
        auto rep = verify_rep(ctx, 3, mode);
        if (!rep.pass) {
            pass = false;
            note = std::string(f.name) + ": " +
                   (rep.failures.empty() ? "failed" : rep.failures.front());
        }
    }
    double s = elapsed(t0);
    if (s >= 30.0) {
        pass = false;
        note = "runtime budget of 30 s exceeded";
    }
    report(2, "five superderivation families satisfy their NS relations, indices -3..3", pass, s,
           note);
}

void criterion3() {
    auto t0 = Clock::now();
    bool pass = true;
    std::string note;
    bool saw_negative_control = false;
    for (int w : {6, 9, 12}) {
        auto checks = run_delta_suite(w, 4, mode);
        for (auto& c : checks) {
            if (c.negative_control) saw_negative_control = true;
            if (!c.pass) {
                pass = false;
                note = c.id + " at window " + std::to_string(w);
            }
        }
    }
    if (!saw_negative_control) {
        pass = false;
        note = "negative control missing";
    }
    report(3, "delta identities (two/three-term, k<=2, expansions n<=2, substitution) on windows "
              "6, 9, 12; broken identity detected",
           pass, elapsed(t0), note);
}

void criterion4() {
    auto t0 = Clock::now();
    bool pass = true;
    const int L = 4;
    auto ctx = make_rep_context(RepFamily::n1_ds, L, 12);
    GrassmannElement one = GrassmannElement::one(L);
    struct P {
        GrassmannElement s, sigma;
    };
    std::vector<P> params = {
        {one, GrassmannElement(L)},
        {GrassmannElement::scalar(L, Scalar(3)), GrassmannElement(L)},
        {one + GrassmannElement::monomial(L, 0b11, Scalar::one()), GrassmannElement::theta(L, 1)},
        {GrassmannElement::scalar(L, Scalar(2)),
         GrassmannElement::theta(L, 1) + GrassmannElement::theta(L, 2)},
    };
    for (auto& p : params)
        if (!verify_deformed_square(ctx, p.s, p.sigma).pass) pass = false;
    report(4, "D_(s,sigma)^2 = d/dx for (1,0), (3,0), (1+t1t2, t1), (2, t1+t2)", pass, elapsed(t0));
}

void criterion5() {
    auto t0 = Clock::now();
    const int L = 4;
    std::string note;
    std::vector<int> fail(20, 0);
    for (auto flavor : {EFlavor::e2_homo, EFlavor::e2_nonhomo, EFlavor::e1}) {
        for (int w : {4, 6}) {
            for_each_index(20, mode, [&](std::size_t t) {
                Rng rng(4099 + 101 * t + 17 * (int)flavor + 7 * w);
                InfinitesimalData g = random_infinitesimal(rng, L, w);
                for (auto locus : {Locus::zero, Locus::infinity}) {
                    CoordMap m = hat_e(g, flavor, locus);
                    if (extract(m, flavor) != g) fail[t] |= 1;
                    if (flavor == EFlavor::e1) {
                        if (!in_restricted_shape(m)) fail[t] |= 2;
                    } else if (!map_superconformal(m)) {
                        fail[t] |= 4;
                    }
                }
            });
        }
    }
    bool pass = true;
    for (int f : fail)
        if (f) pass = false;
    double s = elapsed(t0);
    if (s >= 60.0) {
        pass = false;
        note = "runtime budget of 60 s exceeded";
    }
    report(5, "extract(hatE(g)) = g for 20 seeded elements per target at weights 4 and 6; "
              "superconformality/shape of outputs",
           pass, s, note);
}

void criterion6() {
    auto t0 = Clock::now();
    const int L = 4;
    bool pass = true;
    std::string note;
    struct Case {
        GroupLaw law;
        Locus locus;
        int weight;
        const char* name;
    };
    std::vector<Case> cases = {{GroupLaw::N2, Locus::zero, 5, "N2 at zero"},
                               {GroupLaw::N2, Locus::infinity, 4, "N2 at infinity"},
                               {GroupLaw::N1, Locus::zero, 5, "N1 at zero"},
                               {GroupLaw::N1, Locus::infinity, 4, "N1 at infinity"}};
    std::vector<std::string> errs(cases.size());
    for_each_index(cases.size(), mode, [&](std::size_t i) {
        auto& c = cases[i];
        Rng rng(7919 + 2 * (int)c.law + (int)c.locus);
        auto compose = [&](const InfinitesimalData& x, const InfinitesimalData& y) {
            return c.locus == Locus::zero ? compose_at_zero(x, y, c.law)
                                          : compose_at_infinity(x, y, c.law);
        };
        InfinitesimalData e = InfinitesimalData::identity(L, c.weight);
        e.canonicalize();
        InfinitesimalData g = random_infinitesimal(rng, L, c.weight);
        if (compose(g, e) != g || compose(e, g) != g) errs[i] = "identity";
        InfinitesimalData inv = group_inverse(g, c.law, c.locus);
        if (compose(g, inv) != e || compose(inv, g) != e) errs[i] = "inverse";
        for (int triple = 0; triple < 2 && errs[i].empty(); ++triple) {
            InfinitesimalData a = random_infinitesimal(rng, L, c.weight);
            InfinitesimalData b = random_infinitesimal(rng, L, c.weight);
            InfinitesimalData k = random_infinitesimal(rng, L, c.weight);
            if (compose(compose(a, b), k) != compose(a, compose(b, k)))
                errs[i] = "associativity";
        }
    });
    for (std::size_t i = 0; i < cases.size(); ++i)
        if (!errs[i].empty()) {
            pass = false;
            note = std::string(cases[i].name) + ": " + errs[i];
        }
    report(6, "group laws (identity/inverse/associativity) at weight 5 (zero) and 4 (infinity)",
           pass, elapsed(t0), note);
}

void criterion7() {
    auto t0 = Clock::now();
    const int L = 4;
    bool pass = true;
    std::string note;
    for (auto locus : {Locus::zero, Locus::infinity}) {
        int w = locus == Locus::zero ? 5 : 4;
        std::vector<int> fail(20, 0);
        for_each_index(20, mode, [&](std::size_t t) {
            Rng rng(52361 + 13 * t + (int)locus);
            InfinitesimalData g = random_infinitesimal(rng, L, w);
            InfinitesimalData h = random_infinitesimal(rng, L, w);
            if (!check_isomorphism(g, h, locus).pass) fail[t] = 1;
        });
        for (int f : fail)
            if (f) {
                pass = false;
                note = locus == Locus::zero ? "zero locus" : "infinity locus";
            }
    }
    report(7, "N2 and N1 compositions agree on 20 seeded pairs at both loci", pass, elapsed(t0),
           note);
}

void criterion8() {
    auto t0 = Clock::now();
    bool pass = true;
    std::string note;
    bool saw_negative_control = false;
    auto checks = run_fields_suite(12, 3, mode);
    for (auto& c : checks) {
        if (c.negative_control) saw_negative_control = true;
        if (!c.pass) {
            pass = false;
            note = c.id;
        }
    }
    if (!saw_negative_control) {
        pass = false;
        note = "negative control missing";
    }
    double s = elapsed(t0);
    if (s >= 60.0) {
        pass = false;
        note = "runtime budget of 60 s exceeded";
    }
    report(8, "fields: bracket = OPE at window 12, residues -3..3, derivative/bracket/conjugation "
              "identities, conversion, weak supercommutativity k=4 with k=1 control",
           pass, s, note);
}

void criterion9() {
    auto t0 = Clock::now();
    bool pass = true;
    for (int L : {2, 4, 6}) {
        Rng rng(1000003 + L);
        for (int t = 0; t < 200; ++t) {
            auto a = rng.invertible_even(L) + rng.odd_element(L);
            if (a * a.inverse() != GrassmannElement::one(L)) pass = false;
        }
        for (int t = 0; t < 50; ++t) {
            int pa = (int)rng.below(2), pb = (int)rng.below(2);
            auto a = rng.homogeneous_grassmann(L, pa);
            auto b = rng.homogeneous_grassmann(L, pb);
            auto rhs = b * a;
            if (pa && pb) rhs = -rhs;
            if (a * b != rhs) pass = false;
            auto soul = rng.grassmann(L).soul();
            auto p = GrassmannElement::one(L);
            for (int j = 0; j <= L; ++j) p *= soul;
            if (!p.is_zero()) pass = false;
        }
    }
    report(9, "Grassmann kernel: 200 seeded inverses at L in {2,4,6}; supercommutativity; "
              "soul nilpotency",
           pass, elapsed(t0));
}

void criterion10() {
    auto t0 = Clock::now();
    VerifyConfig cfg; // defaults: L=4, W=12, N=6, range -4..4, seed 0
    cfg.mode = mode;
    VerifyResult result = run_verify(cfg);
    double s = elapsed(t0);
    bool pass = result.all_pass() && s < 300.0;
    std::string note;
    if (!result.all_pass()) {
        for (auto& r : result.records)
            if (!r.pass) note = r.id;
    } else if (s >= 300.0) {
        note = "runtime budget of 300 s exceeded";
    }
    report(10, "full verify over all suites at the default configuration", pass, s, note);
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--serial") mode = ExecMode::serial;
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (failures) {
        std::printf("%d criterion(s) failing\n", failures);
        return 1;
    }
    std::printf("all criteria pass\n");
    return 0;
}
