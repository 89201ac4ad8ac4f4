#include "doctest.h"

#include "n2alg/io.hpp"
#include "n2alg/verify.hpp"

using namespace n2alg;

TEST_CASE("series fixture round trip") {
    auto spec = make_spec({{"x", -8, 8}}, {"phi+", "phi-"});
    Rng rng(3);
    SuperSeries s = SuperSeries::zero(spec, 4);
    for (int t = 0; t < 5; ++t) {
        TermKey k;
        k.e[0] = (int)rng.range(-3, 3);
        k.mask = (std::uint8_t)rng.below(4);
        s.add_term(k, rng.grassmann(4));
    }
    SuperSeries back = series_from_json(series_to_json(s));
    CHECK(back.terms == s.terms);
}

TEST_CASE("infinitesimal data round trip") {
    Rng rng(9);
    InfinitesimalData g = random_infinitesimal(rng, 4, 4);
    InfinitesimalData back = infinitesimal_from_json(infinitesimal_to_json(g));
    CHECK(back == g);
}

TEST_CASE("coordinate map round trip and extract") {
    Rng rng(11);
    InfinitesimalData g = random_infinitesimal(rng, 4, 3);
    CoordMap m = hat_e(g, EFlavor::e1, Locus::zero);
    CoordMap back = coordmap_from_json(coordmap_to_json(m));
    CHECK(back.comps.x == m.comps.x);
    CHECK(back.comps.phi[0] == m.comps.phi[0]);
    CHECK(extract(back, EFlavor::e1) == g);
}

TEST_CASE("verify config validation") {
    VerifyConfig cfg;
    cfg.window = 3; // below minimum
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.window = 12;
    cfg.suites = {"no-such-suite"};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.suites = {"grassmann"};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("verify reports are deterministic for a fixed seed") {
    VerifyConfig cfg;
    cfg.suites = {"grassmann"};
    cfg.seed = 5;
    cfg.mode = ExecMode::serial;
    auto a = report_to_json(cfg, run_verify(cfg));
    cfg.mode = ExecMode::parallel;
    auto b = report_to_json(cfg, run_verify(cfg));
    CHECK(a.dump() == b.dump());
}
