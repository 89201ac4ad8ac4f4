// Benchmark: serial reference vs OpenMP execution of the verification
// sweeps.  The loop bodies are identical; the parallel mode only distributes
// independent checks, so the results must match exactly (also asserted by
// the unit tests).

#include "n2alg/delta.hpp"
#include "n2alg/ns_fields.hpp"
#include "n2alg/superderiv.hpp"
#include "n2alg/verify.hpp"

#include <chrono>
#include <cstdio>

using namespace n2alg;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_of(F&& fn) {
    auto t0 = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %9.3fs %9.3fs %7.2fx\n", name, serial, parallel,
                parallel > 0 ? serial / parallel : 0.0);
}

} // namespace

int main() {
    std::printf("threads available: %d\n", max_threads());
    std::printf("%-28s %10s %10s %8s\n", "sweep", "serial", "openmp", "speedup");

    {
        double s = time_of([] { verify_lie_superalgebra(BasisTag::homogeneous, 4, ExecMode::serial); });
        double p = time_of([] { verify_lie_superalgebra(BasisTag::homogeneous, 4, ExecMode::parallel); });
        row("jacobi sweep (range 4)", s, p);
    }
    {
        auto ctx = make_rep_context(RepFamily::nonhomo2, 4, 14);
        double s = time_of([&] { verify_rep(ctx, 3, ExecMode::serial); });
        double p = time_of([&] { verify_rep(ctx, 3, ExecMode::parallel); });
        row("representation sweep", s, p);
    }
    {
        double s = time_of([] { run_delta_suite(9, 4, ExecMode::serial); });
        double p = time_of([] { run_delta_suite(9, 4, ExecMode::parallel); });
        row("delta suite (window 9)", s, p);
    }
    {
        double s = time_of([] { run_fields_suite(10, 3, ExecMode::serial); });
        double p = time_of([] { run_fields_suite(10, 3, ExecMode::parallel); });
        row("fields suite (window 10)", s, p);
    }
    {
        VerifyConfig cfg;
        cfg.suites = {"group-laws"};
        cfg.weight = 4;
        double s = time_of([&] {
            cfg.mode = ExecMode::serial;
            run_verify(cfg);
        });
        double p = time_of([&] {
            cfg.mode = ExecMode::parallel;
            run_verify(cfg);
        });
        row("group laws (weight 4)", s, p);
    }
    return 0;
}
