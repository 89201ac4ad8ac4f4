#pragma once

#include "n2alg/parallel.hpp"
#include "n2alg/superseries.hpp"

#include <string>
#include <vector>

namespace n2alg {

/// Description of a windowed formal delta: the materialization of
/// delta^k((lead_sign*x_lead + rest + nilp)/(denom_sign*x_denom)) as the sum
/// over n in [-window, window] of the k-th falling-factorial expansion
///   sum_n (n)_k * numerator^(n-k) * denominator^(-n),
/// with the numerator expanded in nonnegative powers of `rest` against the
/// leading variable and the nilpotent part applied as a Taylor shift.
struct WindowedDelta {
    SpecPtr spec;
    int generators = 0;
    int lead_var = 0;
    int lead_sign = +1; // coefficient of the leading even variable, +-1
    SuperSeries rest;   // remaining even part (no lead_var content, no odd part)
    SuperSeries nilp;   // even nilpotent correction
    int denom_var = 1;
    int denom_sign = +1;
    int deriv_order = 0; // k
    int window = 12;
};

/// Materialize on the window; certificates record where coefficients are
/// complete (the denominator variable on [-W, W], the leading variable down
/// to its storage floor, `rest` variables up to their storage ceiling).
SuperSeries delta_expand(const WindowedDelta& d);

/// Binomial expansion (u + rest)^p in nonnegative powers of rest, where u is
/// lead_sign * x_lead; terms below the lead variable's storage floor stop
/// the expansion.
SuperSeries binomial_power(const SpecPtr& spec, int L, int lead_var, int lead_sign,
                           const SuperSeries& rest, long p);

struct DeltaCheck {
    std::string id;
    std::string description;
    int window = 0;
    bool pass = false;
    bool negative_control = false; // pass means the mismatch was detected
    std::vector<std::array<long, 2>> region;
    std::vector<std::string> mismatches;
    long compared = 0;
};

/// The delta identities, each materialized on the given window and compared
/// coefficient-by-coefficient on the joint certified region.  The region is
/// also required to cover the window shrunk by deriv_order+1 on each side;
/// a narrower certificate is reported as a failure.
DeltaCheck check_two_term(int window, bool with_phis, int deriv_order, int L = 4);
DeltaCheck check_three_term(int window, bool with_phis, int deriv_order, int L = 4);
/// Prop expansion-prop for the given n: difference of the two expansions of
/// (x1 - x2 - phi-shift)^(-n-1) equals the delta-derivative closed form.
DeltaCheck check_expansion_prop(int window, int n, int L = 4);
/// Substitution rule: delta((x2+x0+shift)/x1) X(x1,..) = same kernel with
/// X(x2+x0+shift,..); which selects the test series X.
DeltaCheck check_delta_substitution(int window, int which, int L = 4);
/// f(x) delta_W(x) = f(1) delta_W(x) for a Laurent polynomial f.
DeltaCheck check_delta_point_eval(int window, int L = 4);
/// Negative control: two-term identity with a sign-flipped phi term; the
/// checker must report a mismatch.
DeltaCheck check_two_term_negative_control(int window, int L = 4);

/// Full suite at one window.
std::vector<DeltaCheck> run_delta_suite(int window, int L, ExecMode mode);

} // namespace n2alg
