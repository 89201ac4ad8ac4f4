#include "n2alg/verify.hpp"

#include "n2alg/delta.hpp"
#include "n2alg/expmap.hpp"
#include "n2alg/ns_fields.hpp"
#include "n2alg/rng.hpp"
#include "n2alg/superderiv.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

namespace n2alg {

void VerifyConfig::validate() const {
    if (generators < 1 || generators > 8)
        throw std::invalid_argument("generators must lie in 1..8");
    if (window < 6 || window > 24) throw std::invalid_argument("window must lie in 6..24");
    if (weight < 2 || weight > 8) throw std::invalid_argument("weight must lie in 2..8");
    if (range_lo > range_hi || range_hi - range_lo > 16)
        throw std::invalid_argument("index range invalid or too wide");
    for (auto& s : suites) {
        auto& all = known_suites();
        if (std::find(all.begin(), all.end(), s) == all.end() && s != "all")
            throw std::invalid_argument("unknown suite: " + s);
    }
}

const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> suites = {
        "grassmann", "delta", "ns-relations", "representations",
        "deformation", "fields", "group-laws", "isomorphism"};
    return suites;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Job {
    std::string suite;
    std::string id;
    std::string description;
    std::function<void(CheckRecord&)> run;
};

void from_verify_report(CheckRecord& rec, const VerifyReport& rep) {
    rec.pass = rep.pass;
    rec.checks = rep.checks;
    rec.details = rep.failures;
}

void from_delta_check(CheckRecord& rec, const DeltaCheck& chk) {
    rec.pass = chk.pass;
    rec.negative_control = chk.negative_control;
    rec.checks = chk.compared;
    rec.details = chk.mismatches;
    if (rec.description.empty()) rec.description = chk.description;
}

void add_grassmann_jobs(std::vector<Job>& jobs, const VerifyConfig& cfg) {
    for (int L : {2, 4, 6}) {
        jobs.push_back(Job{
            "grassmann", "grassmann.inverse.L" + std::to_string(L),
            "200 seeded random invertible elements multiply with their inverses to 1",
            [L, cfg](CheckRecord& rec) {
                Rng rng(cfg.seed * 1000003 + L);
                rec.pass = true;
                for (int t = 0; t < 200; ++t) {
                    auto a = rng.invertible_even(L) + rng.odd_element(L);
                    rec.checks++;
                    if (a * a.inverse() != GrassmannElement::one(L)) {
                        rec.pass = false;
                        rec.details.push_back("inverse failed at t=" + std::to_string(t));
                    }
                }
            }});
    }
    jobs.push_back(Job{"grassmann", "grassmann.supercommutativity",
                       "homogeneous products commute up to the Koszul sign",
                       [cfg](CheckRecord& rec) {
                           Rng rng(cfg.seed + 17);
                           int L = cfg.generators;
                           rec.pass = true;
                           for (int t = 0; t < 100; ++t) {
                               int pa = (int)rng.below(2), pb = (int)rng.below(2);
                               auto a = rng.homogeneous_grassmann(L, pa);
                               auto b = rng.homogeneous_grassmann(L, pb);
                               auto rhs = b * a;
                               if (pa && pb) rhs = -rhs;
                               rec.checks++;
                               if (a * b != rhs) {
                                   rec.pass = false;
                                   rec.details.push_back("sign failure at t=" + std::to_string(t));
                               }
                           }
                       }});
    jobs.push_back(Job{"grassmann", "grassmann.soul_nilpotency",
                       "soul(a)^(L+1) vanishes for every a",
                       [cfg](CheckRecord& rec) {
                           Rng rng(cfg.seed + 23);
                           rec.pass = true;
                           for (int L : {2, 4, 6})
                               for (int t = 0; t < 30; ++t) {
                                   auto s = rng.grassmann(L).soul();
                                   auto p = GrassmannElement::one(L);
                                   for (int k = 0; k <= L; ++k) p *= s;
                                   rec.checks++;
                                   if (!p.is_zero()) rec.pass = false;
                               }
                       }});
    jobs.push_back(Job{"grassmann", "grassmann.scalar_ring",
                       "(1/sqrt2)^2 = 1/2 and i^2 = -1 hold exactly",
                       [](CheckRecord& rec) {
                           rec.pass = Scalar::inv_sqrt2() * Scalar::inv_sqrt2() ==
                                          Scalar(make_rational(1, 2)) &&
                                      Scalar::i() * Scalar::i() == Scalar(-1);
                           rec.checks = 2;
                       }});
}

void add_delta_jobs(std::vector<Job>& jobs, const VerifyConfig& cfg) {
    // one record per identity and window, carrying the certified safe region
    struct Item {
        int kind; // 0 two-term, 1 three-term, 2 expansion, 3 substitution,
                  // 4 point-eval, 5 negative control
        bool phis;
        int order;
    };
    std::vector<Item> items;
    for (int k = 0; k <= 2; ++k) {
        items.push_back({0, true, k});
        items.push_back({1, true, k});
        items.push_back({0, false, k});
        items.push_back({1, false, k});
    }
    for (int n = 0; n <= 2; ++n) items.push_back({2, false, n});
    for (int which = 0; which <= 2; ++which) items.push_back({3, false, which});
    items.push_back({4, false, 0});
    items.push_back({5, false, 0});
    for (int w : {6, 9, 12}) {
        if (w > cfg.window) continue;
        for (auto it : items) {
            jobs.push_back(Job{"delta", "", "", [it, w, cfg](CheckRecord& rec) {
                DeltaCheck chk;
                switch (it.kind) {
                    case 0: chk = check_two_term(w, it.phis, it.order, cfg.generators); break;
                    case 1: chk = check_three_term(w, it.phis, it.order, cfg.generators); break;
                    case 2: chk = check_expansion_prop(w, it.order, cfg.generators); break;
                    case 3: chk = check_delta_substitution(w, it.order, cfg.generators); break;
                    case 4: chk = check_delta_point_eval(w, cfg.generators); break;
                    case 5: chk = check_two_term_negative_control(w, cfg.generators); break;
                }
                rec.id = chk.id + ".window" + std::to_string(w);
                rec.description = chk.description;
                from_delta_check(rec, chk);
                if (!chk.region.empty()) {
                    std::ostringstream os;
                    os << "safe region:";
                    auto fmt = [&](long v) {
                        if (v <= -kUnbounded) os << "-inf";
                        else if (v >= kUnbounded) os << "inf";
                        else os << v;
                    };
                    for (auto& r : chk.region) {
                        os << " [";
                        fmt(r[0]);
                        os << ", ";
                        fmt(r[1]);
                        os << "]";
                    }
                    rec.details.insert(rec.details.begin(), os.str());
                }
            }});
        }
    }
}

void add_ns_jobs(std::vector<Job>& jobs, const VerifyConfig& cfg) {
    int range = std::max(-cfg.range_lo, cfg.range_hi);
    jobs.push_back(Job{"ns-relations", "ns.spot_values",
                       "[J(2),J(-2)] = (2/3)d; [G+(3/2),G-(-3/2)] = 2L(0)+3J(0)+(2/3)d; "
                       "[G1(1/2),G2(-1/2)] = -iJ(0)",
                       [](CheckRecord& rec) {
                           auto B = [](Kind k, int n) { return NsElement::basis(0, k, n); };
                           rec.pass =
                               ns_bracket(B(Kind::J, 2), B(Kind::J, -2)) ==
                                   B(Kind::D, 0).scale(Scalar(make_rational(2, 3))) &&
                               ns_bracket(B(Kind::Gp, 2), B(Kind::Gm, -1)) ==
                                   B(Kind::L, 0).scale(Scalar(2)) + B(Kind::J, 0).scale(Scalar(3)) +
                                       B(Kind::D, 0).scale(Scalar(make_rational(2, 3))) &&
                               ns_bracket(B(Kind::G1, 1), B(Kind::G2, 0)) ==
                                   B(Kind::J, 0).scale(-Scalar::i());
                           rec.checks = 3;
                       }});
    for (auto tag : {BasisTag::homogeneous, BasisTag::nonhomogeneous, BasisTag::n1}) {
        std::string name = tag == BasisTag::homogeneous    ? "homogeneous"
                           : tag == BasisTag::nonhomogeneous ? "nonhomogeneous"
                                                             : "n1";
        jobs.push_back(Job{"ns-relations", "ns.lie_axioms." + name,
                           "super-skew and super-Jacobi on all basis pairs and triples",
                           [tag, range, cfg](CheckRecord& rec) {
                               from_verify_report(rec,
                                                  verify_lie_superalgebra(tag, range, cfg.mode));
                           }});
    }
    jobs.push_back(Job{"ns-relations", "ns.basis_conversion",
                       "conversion is an involutive bracket homomorphism",
                       [range](CheckRecord& rec) {
                           from_verify_report(rec, verify_basis_conversion(range));
                       }});
    jobs.push_back(Job{"ns-relations", "ns.automorphisms",
                       "scale/flip/flip-scale preserve brackets in both bases",
                       [range, cfg](CheckRecord& rec) {
                           Rng rng(cfg.seed + 31);
                           auto b = rng.invertible_even(cfg.generators);
                           VerifyReport total;
                           for (auto tag : {BasisTag::homogeneous, BasisTag::nonhomogeneous}) {
                               auto rep = verify_automorphisms(tag, range, b);
                               total.checks += rep.checks;
                               if (!rep.pass) {
                                   total.pass = false;
                                   for (auto& f : rep.failures) total.fail(f);
                               }
                           }
                           from_verify_report(rec, total);
                       }});
    jobs.push_back(Job{"ns-relations", "ns.generated_by_g",
                       "every L, J and d lies in the span of G-mode brackets",
                       [range](CheckRecord& rec) {
                           VerifyReport total;
                           for (auto tag : {BasisTag::homogeneous, BasisTag::nonhomogeneous}) {
                               auto rep = verify_generated_by_g(tag, range);
                               total.checks += rep.checks;
                               if (!rep.pass) total.pass = false;
                           }
                           from_verify_report(rec, total);
                       }});
    jobs.push_back(Job{"ns-relations", "ns.subalgebras",
                       "the listed osp and N=1 subalgebras close under bracket",
                       [](CheckRecord& rec) {
                           VerifyReport total;
                           for (auto k :
                                {SubalgebraKind::osp12_neg, SubalgebraKind::osp12,
                                 SubalgebraKind::osp22_neg, SubalgebraKind::osp22,
                                 SubalgebraKind::N1_j1, SubalgebraKind::N1_j2}) {
                               auto rep = verify_subalgebra_closure(k);
                               total.checks += rep.checks;
                               if (!rep.pass) total.pass = false;
                           }
                           from_verify_report(rec, total);
                       }});
}

void add_rep_jobs(std::vector<Job>& jobs, const VerifyConfig& cfg) {
    struct Fam {
        RepFamily fam;
        const char* name;
        GrassmannElement s;
    };
    GrassmannElement soul_s =
        GrassmannElement::one(cfg.generators) +
        GrassmannElement::monomial(cfg.generators, 0b11, Scalar::one());
    std::vector<Fam> fams = {
        {RepFamily::homo2, "homo2", GrassmannElement()},
        {RepFamily::nonhomo2, "nonhomo2", GrassmannElement()},
        {RepFamily::n1, "n1", GrassmannElement()},
        {RepFamily::n1_ds, "n1_ds.s3", GrassmannElement::scalar(cfg.generators, Scalar(3))},
        {RepFamily::n1_ds, "n1_ds.soul", soul_s},
        {RepFamily::n2_one_var, "n2_one_var", GrassmannElement()},
    };
    for (auto& f : fams) {
        jobs.push_back(Job{"representations", std::string("rep.relations.") + f.name,
                           "commutators of the representation derivations match the bracket tables "
                           "with d = 0 on probes, indices -3..3",
                           [f, cfg](CheckRecord& rec) {
                               auto ctx = make_rep_context(f.fam, cfg.generators, 14, f.s);
                               from_verify_report(rec, verify_rep(ctx, 3, cfg.mode));
                           }});
    }
    jobs.push_back(Job{"representations", "rep.dj_brackets", "[D(j), D(k)] = 2 delta_jk d/dx",
                       [cfg](CheckRecord& rec) {
                           auto ctx = make_rep_context(RepFamily::nonhomo2, cfg.generators, 12);
                           from_verify_report(rec, verify_dj_brackets(ctx));
                       }});
    jobs.push_back(Job{"representations", "rep.one_var_spanning",
                       "x^n d/dx, x^n phi d/dx, x^n d/dphi, x^n phi d/dphi are reproduced",
                       [cfg](CheckRecord& rec) {
                           auto ctx = make_rep_context(RepFamily::n2_one_var, cfg.generators, 14);
                           from_verify_report(rec, verify_one_var_spanning(ctx, 3));
                       }});
}

void add_deformation_jobs(std::vector<Job>& jobs, const VerifyConfig& cfg) {
    int L = cfg.generators;
    struct P {
        GrassmannElement s, sigma;
        const char* name;
    };
    GrassmannElement one = GrassmannElement::one(L);
    std::vector<P> params = {
        {one, GrassmannElement(L), "s1"},
        {GrassmannElement::scalar(L, Scalar(3)), GrassmannElement(L), "s3"},
        {one + GrassmannElement::monomial(L, 0b11, Scalar::one()), GrassmannElement::theta(L, 1),
         "soul"},
        {GrassmannElement::scalar(L, Scalar(2)),
         GrassmannElement::theta(L, 1) + GrassmannElement::theta(L, 2), "sigma2"},
    };
    for (auto& p : params) {
        jobs.push_back(Job{"deformation", std::string("deformation.square.") + p.name,
                           "D_(s,sigma)^2 = d/dx on probes",
                           [p, cfg](CheckRecord& rec) {
                               auto ctx = make_rep_context(RepFamily::n1_ds, cfg.generators, 12);
                               from_verify_report(rec, verify_deformed_square(ctx, p.s, p.sigma));
                           }});
    }
}

void add_field_jobs(std::vector<Job>& jobs, const VerifyConfig& cfg) {
    int range = std::min(3, std::max(-cfg.range_lo, cfg.range_hi));
    // run once, then report each check as its own record
    jobs.push_back(Job{"fields", "fields.suite",
                       "mu-bracket vs OPE, residues, derivative and bracket properties, "
                       "conjugations, conversion, weak supercommutativity",
                       [cfg, range](CheckRecord& rec) {
                           auto checks = run_fields_suite(cfg.window, range, ExecMode::serial);
                           rec.pass = true;
                           for (auto& c : checks) {
                               rec.checks += std::max<long>(c.compared, 1);
                               std::string line = c.id;
                               if (c.negative_control) line += " [negative control]";
                               line += c.pass ? ": pass" : ": FAIL";
                               rec.details.push_back(line);
                               if (!c.pass) {
                                   rec.pass = false;
                                   for (auto& m : c.mismatches) rec.details.push_back("  " + m);
                               }
                           }
                       }});
}

void add_group_jobs(std::vector<Job>& jobs, const VerifyConfig& cfg) {
    struct Case {
        GroupLaw law;
        Locus locus;
        const char* name;
        int weight;
    };
    std::vector<Case> cases = {
        {GroupLaw::N2, Locus::zero, "n2.zero", 5},
        {GroupLaw::N2, Locus::infinity, "n2.infinity", 4},
        {GroupLaw::N1, Locus::zero, "n1.zero", 5},
        {GroupLaw::N1, Locus::infinity, "n1.infinity", 4},
    };
    // extraction round trips (weights 4 and 6) per flavor and locus
    for (auto flavor : {EFlavor::e2_homo, EFlavor::e2_nonhomo, EFlavor::e1}) {
        std::string fname = flavor == EFlavor::e2_homo      ? "e2-homo"
                            : flavor == EFlavor::e2_nonhomo ? "e2-nonhomo"
                                                            : "e1";
        for (int w : {4, 6}) {
            if (w > cfg.weight) continue;
            jobs.push_back(Job{
                "group-laws", "exp.round_trip." + fname + ".w" + std::to_string(w),
                "extract(hatE(g)) = g for 20 seeded elements, both loci; outputs pass the "
                "flavor's structural predicate",
                [flavor, w, cfg](CheckRecord& rec) {
                    rec.pass = true;
                    std::vector<int> fail(20, 0);
                    for_each_index(20, cfg.mode, [&](std::size_t t) {
                        Rng rng(cfg.seed * 4099 + 101 * t + (int)flavor + 7 * w);
                        InfinitesimalData g = random_infinitesimal(rng, cfg.generators, w);
                        for (auto locus : {Locus::zero, Locus::infinity}) {
                            CoordMap m = hat_e(g, flavor, locus);
                            if (extract(m, flavor) != g) fail[t] |= 1;
                            if (flavor == EFlavor::e1) {
                                if (!in_restricted_shape(m)) fail[t] |= 2;
                            } else {
                                if (!map_superconformal(m)) fail[t] |= 2;
                            }
                        }
                    });
                    for (std::size_t t = 0; t < fail.size(); ++t) {
                        rec.checks += 4;
                        if (fail[t]) {
                            rec.pass = false;
                            rec.details.push_back("element " + std::to_string(t) + " code " +
                                                  std::to_string(fail[t]));
                        }
                    }
                }});
        }
    }
    for (auto& c : cases) {
        jobs.push_back(Job{
            "group-laws", std::string("group.axioms.") + c.name,
            "identity, inverse and associativity on seeded elements",
            [c, cfg](CheckRecord& rec) {
                int w = std::min(c.weight, cfg.weight);
                Rng rng(cfg.seed * 7919 + (int)c.law * 2 + (int)c.locus);
                InfinitesimalData e = InfinitesimalData::identity(cfg.generators, w);
                e.canonicalize();
                auto compose = [&](const InfinitesimalData& x, const InfinitesimalData& y) {
                    return c.locus == Locus::zero ? compose_at_zero(x, y, c.law)
                                                  : compose_at_infinity(x, y, c.law);
                };
                InfinitesimalData g = random_infinitesimal(rng, cfg.generators, w);
                InfinitesimalData h = random_infinitesimal(rng, cfg.generators, w);
                InfinitesimalData k = random_infinitesimal(rng, cfg.generators, w);
                rec.pass = true;
                rec.checks = 6;
                if (compose(g, e) != g || compose(e, g) != g) {
                    rec.pass = false;
                    rec.details.push_back("identity law failed");
                }
                InfinitesimalData inv = group_inverse(g, c.law, c.locus);
                if (compose(g, inv) != e || compose(inv, g) != e) {
                    rec.pass = false;
                    rec.details.push_back("inverse law failed");
                }
                if (compose(compose(g, h), k) != compose(g, compose(h, k))) {
                    rec.pass = false;
                    rec.details.push_back("associativity failed");
                }
            }});
    }
    jobs.push_back(Job{"group-laws", "exp.composition_switch",
                       "f1 after hatE(g) equals the exponential operators applied to f1",
                       [cfg](CheckRecord& rec) {
                           Rng rng(cfg.seed + 47);
                           int w = std::min(4, cfg.weight);
                           InfinitesimalData g = random_infinitesimal(rng, cfg.generators, w);
                           auto ctx = make_rep_context(RepFamily::n2_one_var, cfg.generators,
                                                       2 * w + 8);
                           auto x = SuperSeries::even_power(ctx.spec, cfg.generators, 0, 1);
                           auto ph = SuperSeries::odd_var(ctx.spec, cfg.generators, 0);
                           auto neg = SuperSeries::even_power(ctx.spec, cfg.generators, 0, -2);
                           rec.pass = true;
                           for (auto locus : {Locus::zero, Locus::infinity})
                               for (auto& f1 : {x, x * x + ph, neg + (ph * x).scale(Scalar(3))}) {
                                   auto rep = composition_switch_check(f1, g, locus);
                                   rec.checks += rep.checks;
                                   if (!rep.pass) {
                                       rec.pass = false;
                                       for (auto& m : rep.failures) rec.details.push_back(m);
                                   }
                               }
                       }});
}

void add_iso_jobs(std::vector<Job>& jobs, const VerifyConfig& cfg) {
    for (auto locus : {Locus::zero, Locus::infinity}) {
        int w = std::min(locus == Locus::zero ? 5 : 4, cfg.weight);
        std::string name = locus == Locus::zero ? "zero" : "infinity";
        jobs.push_back(Job{
            "isomorphism", "iso.compose_agree." + name,
            "the N2 and N1 compositions agree on 20 seeded pairs (canonical data)",
            [locus, w, cfg](CheckRecord& rec) {
                rec.pass = true;
                std::vector<int> fail(20, 0);
                for_each_index(20, cfg.mode, [&](std::size_t t) {
                    Rng rng(cfg.seed * 52361 + 13 * t + (int)locus);
                    InfinitesimalData g = random_infinitesimal(rng, cfg.generators, w);
                    InfinitesimalData h = random_infinitesimal(rng, cfg.generators, w);
                    auto rep = check_isomorphism(g, h, locus);
                    if (!rep.pass) fail[t] = 1;
                });
                for (std::size_t t = 0; t < fail.size(); ++t) {
                    rec.checks++;
                    if (fail[t]) {
                        rec.pass = false;
                        rec.details.push_back("pair " + std::to_string(t));
                    }
                }
            }});
    }
}

} // namespace

VerifyResult run_verify(const VerifyConfig& config) {
    config.validate();
    auto selected = [&](const std::string& suite) {
        if (config.suites.empty()) return true;
        for (auto& s : config.suites)
            if (s == "all" || s == suite) return true;
        return false;
    };
    std::vector<Job> jobs;
    if (selected("grassmann")) add_grassmann_jobs(jobs, config);
    if (selected("delta")) add_delta_jobs(jobs, config);
    if (selected("ns-relations")) add_ns_jobs(jobs, config);
    if (selected("representations")) add_rep_jobs(jobs, config);
    if (selected("deformation")) add_deformation_jobs(jobs, config);
    if (selected("fields")) add_field_jobs(jobs, config);
    if (selected("group-laws")) add_group_jobs(jobs, config);
    if (selected("isomorphism")) add_iso_jobs(jobs, config);

    VerifyResult result;
    result.records.resize(jobs.size());
    for_each_index(jobs.size(), config.mode, [&](std::size_t i) {
        CheckRecord& rec = result.records[i];
        rec.suite = jobs[i].suite;
        rec.id = jobs[i].id;
        rec.description = jobs[i].description;
        auto t0 = Clock::now();
        try {
            jobs[i].run(rec);
        } catch (const std::exception& e) {
            rec.pass = false;
            rec.details.push_back(std::string("exception: ") + e.what());
        }
        rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    });
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const CheckRecord& a, const CheckRecord& b) {
                         if (a.suite != b.suite) return a.suite < b.suite;
                         return a.id < b.id;
                     });
    return result;
}

nlohmann::json report_to_json(const VerifyConfig& config, const VerifyResult& result) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["config"] = {{"generators", config.generators},
                   {"window", config.window},
                   {"weight", config.weight},
                   {"range", {config.range_lo, config.range_hi}},
                   {"seed", config.seed},
                   {"suites", config.suites.empty()
                                  ? std::vector<std::string>{"all"}
                                  : config.suites}};
    j["checks"] = nlohmann::json::array();
    for (auto& r : result.records) {
        j["checks"].push_back({{"suite", r.suite},
                               {"id", r.id},
                               {"description", r.description},
                               {"pass", r.pass},
                               {"negative_control", r.negative_control},
                               {"checks", r.checks},
                               {"details", r.details}});
    }
    j["pass"] = result.all_pass();
    return j;
}

std::string summary_text(const VerifyResult& result) {
    std::ostringstream os;
    long total = 0;
    int failed = 0;
    for (auto& r : result.records) {
        os << (r.pass ? "PASS" : "FAIL") << "  " << r.suite << " / " << r.id;
        if (r.negative_control) os << "  [negative control]";
        os << "  (" << r.checks << " checks)\n";
        for (auto& d : r.details) os << "      " << d << "\n";
        total += r.checks;
        if (!r.pass) ++failed;
    }
    os << (failed == 0 ? "OK" : "FAILED") << ": " << result.records.size() << " records, "
       << total << " checks";
    if (failed) os << ", " << failed << " failing";
    os << "\n";
    return os.str();
}

} // namespace n2alg
