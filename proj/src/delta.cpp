#include "n2alg/delta.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace n2alg {

SuperSeries binomial_power(const SpecPtr& spec, int L, int lead_var, int lead_sign,
                           const SuperSeries& rest, long p) {
    for (auto& [key, g] : rest.terms) {
        if (key.e[lead_var] != 0)
            throw std::invalid_argument("binomial_power: rest contains the leading variable");
        if (key.mask != 0)
            throw std::invalid_argument("binomial_power: rest must be purely even");
    }
    SuperSeries out = SuperSeries::zero(spec, L);
    SuperSeries rest_pow = SuperSeries::constant(spec, L, GrassmannElement::one(L));
    for (int v = 0; v < out.n_even(); ++v)
        rest_pow.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
    Rational coeff(1); // C(p, m)
    const long floor = spec->even[lead_var].lo;
    for (long m = 0;; ++m) {
        if (m > 0) {
            coeff *= Rational(p - m + 1);
            coeff /= Rational(m);
            coeff.canonicalize();
            rest_pow = rest_pow * rest;
        }
        long lead_exp = p - m;
        if (lead_exp < floor) break;
        if (p >= 0 && m > p) break;
        if (rest_pow.is_zero()) break;
        Scalar c(coeff);
        if (lead_sign < 0 && (lead_exp & 1)) c = -c;
        SuperSeries term = rest_pow.scale(c);
        // shift by x_lead^(p-m)
        SuperSeries shifted = SuperSeries::zero(spec, L);
        for (auto& [key, g] : term.terms) {
            TermKey k = key;
            k.e[lead_var] += (int)lead_exp;
            if (k.e[lead_var] < spec->even[lead_var].lo || k.e[lead_var] > spec->even[lead_var].hi)
                continue;
            shifted.add_term(k, g);
        }
        for (int v = 0; v < out.n_even(); ++v) shifted.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
        out += shifted;
        if (p >= 0 && m == p) break;
    }
    // Certificates: for infinite expansions the leading variable is complete
    // down to its storage floor and the rest variables up to their ceilings.
    if (p < 0) {
        for (int v = 0; v < out.n_even(); ++v) {
            bool in_rest = false;
            for (auto& [key, g] : rest.terms)
                if (key.e[v] != 0) in_rest = true;
            if (v == lead_var) {
                out.cert[v] = CertWindow{floor, kUnbounded, -kUnbounded, p};
            } else if (in_rest) {
                out.cert[v] = CertWindow{-kUnbounded, spec->even[v].hi, 0, kUnbounded};
            } else {
                out.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
            }
        }
    }
    return out;
}

SuperSeries delta_expand(const WindowedDelta& d) {
    const SpecPtr& spec = d.spec;
    const int L = d.generators;
    const int W = d.window;
    const int k = d.deriv_order;
    SuperSeries out = SuperSeries::zero(spec, L);
    for (long n = -W; n <= W; ++n) {
        // falling factorial (n)_k
        Rational fall(1);
        for (int j = 0; j < k; ++j) fall *= Rational(n - j);
        if (fall == 0) continue;
        SuperSeries base = binomial_power(spec, L, d.lead_var, d.lead_sign, d.rest, n - k);
        if (!d.nilp.is_zero()) {
            SuperSeries shift = d.lead_sign < 0 ? -d.nilp : d.nilp;
            base = base.taylor_shift(d.lead_var, shift);
        }
        Scalar c(fall);
        if (d.denom_sign < 0 && ((n - k) & 1)) c = -c;
        SuperSeries term = base.scale(c);
        SuperSeries shifted = SuperSeries::zero(spec, L);
        for (auto& [key, g] : term.terms) {
            TermKey kk = key;
            kk.e[d.denom_var] -= (int)(n - k);
            if (kk.e[d.denom_var] < spec->even[d.denom_var].lo ||
                kk.e[d.denom_var] > spec->even[d.denom_var].hi)
                continue;
            shifted.add_term(kk, g);
        }
        for (int v = 0; v < out.n_even(); ++v)
            shifted.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
        out += shifted;
    }
    // Certificates of the windowed materialization: complete exactly for
    // denominator exponents inside [-W, W], for leading exponents above the
    // storage floor, and for rest exponents below the storage ceiling.  The
    // true distribution has unbounded support everywhere it appears.
    for (int v = 0; v < out.n_even(); ++v) {
        bool in_rest = false;
        for (auto& [key, g] : d.rest.terms)
            if (key.e[v] != 0) in_rest = true;
        if (v == d.denom_var)
            out.cert[v] = CertWindow{k - W, k + W, -kUnbounded, kUnbounded};
        else if (v == d.lead_var)
            out.cert[v] = CertWindow{spec->even[v].lo, kUnbounded, -kUnbounded, kUnbounded};
        else if (in_rest)
            out.cert[v] = CertWindow{-kUnbounded, spec->even[v].hi, 0, kUnbounded};
        else
            out.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
    }
    return out;
}

namespace {

/// Shared 3-even-variable, 4-odd-variable layout: x0, x1, x2 with phi1+-,
/// phi2+- (mask bits 0..3).
struct DeltaVars {
    SpecPtr spec;
    int L;
    SuperSeries x0, x1, x2, p1p, p1m, p2p, p2m, phi_shift;

    DeltaVars(int window, int L_, int pad = 0) : L(L_) {
        if (pad == 0) pad = window + 6;
        spec = make_spec({{"x0", -pad, pad}, {"x1", -pad, pad}, {"x2", -pad, pad}},
                         {"phi1+", "phi1-", "phi2+", "phi2-"});
        x0 = SuperSeries::even_power(spec, L, 0, 1);
        x1 = SuperSeries::even_power(spec, L, 1, 1);
        x2 = SuperSeries::even_power(spec, L, 2, 1);
        p1p = SuperSeries::odd_var(spec, L, 0);
        p1m = SuperSeries::odd_var(spec, L, 1);
        p2p = SuperSeries::odd_var(spec, L, 2);
        p2m = SuperSeries::odd_var(spec, L, 3);
        phi_shift = p1p * p2m + p1m * p2p;
    }
};

DeltaCheck finish(DeltaCheck chk, const SuperSeries& lhs, const SuperSeries& rhs,
                  int shrink, int window) {
    auto cmp = compare_certified(lhs, rhs, 6);
    chk.window = window;
    chk.pass = cmp.pass;
    chk.region = cmp.region;
    for (auto& m : cmp.mismatches) {
        std::ostringstream os;
        os << "at";
        for (int v = 0; v < (int)m.key.e.size(); ++v) os << " e" << v << "=" << m.key.e[v];
        os << " mask=" << (int)m.key.mask << ": " << m.lhs.str() << " vs " << m.rhs.str();
        chk.mismatches.push_back(os.str());
    }
    // The certified region must contain the contractual safe region.
    for (std::size_t v = 0; v < cmp.region.size(); ++v) {
        if (cmp.region[v][0] > -window + shrink || cmp.region[v][1] < window - shrink) {
            chk.pass = false;
            std::ostringstream os;
            os << "certified region too small on variable " << v << ": [" << cmp.region[v][0]
               << ", " << cmp.region[v][1] << "] needs [" << (-window + shrink) << ", "
               << (window - shrink) << "]";
            chk.mismatches.push_back(os.str());
        }
    }
    chk.compared = (long)lhs.terms.size() + (long)rhs.terms.size();
    return chk;
}

} // namespace

DeltaCheck check_two_term(int window, bool with_phis, int k, int L) {
    if (window < 6) throw std::invalid_argument("delta checks need window >= 6");
    DeltaVars V(window, L);
    DeltaCheck chk;
    {
        std::ostringstream os;
        os << "delta.two_term" << (with_phis ? ".phi" : "") << ".k" << k;
        chk.id = os.str();
    }
    chk.description = "x1^{-k-1} d^k((x2+x0+phi)/x1) = (-1)^k x2^{-k-1} d^k((x1-x0-phi)/x2)";

    SuperSeries phi = with_phis ? V.phi_shift : SuperSeries::zero(V.spec, L);
    WindowedDelta lhs_d{V.spec, L, /*lead*/ 2, +1, V.x0, phi, /*denom*/ 1, +1, k, window};
    SuperSeries lhs = delta_expand(lhs_d).mul(SuperSeries::even_power(V.spec, L, 1, -k - 1),
                                              WeightTrunc::none());
    WindowedDelta rhs_d{V.spec, L, /*lead*/ 1, +1, -V.x0, -phi, /*denom*/ 2, +1, k, window};
    SuperSeries rhs = delta_expand(rhs_d).mul(SuperSeries::even_power(V.spec, L, 2, -k - 1),
                                              WeightTrunc::none());
    if (k & 1) rhs = -rhs;
    int shrink = k + (with_phis ? 2 : 0) + 1;
    return finish(std::move(chk), lhs, rhs, shrink, window);
}

DeltaCheck check_three_term(int window, bool with_phis, int k, int L) {
    DeltaVars V(window, L);
    DeltaCheck chk;
    {
        std::ostringstream os;
        os << "delta.three_term" << (with_phis ? ".phi" : "") << ".k" << k;
        chk.id = os.str();
    }
    chk.description =
        "x0^{-k-1} d^k((x1-x2-phi)/x0) - x0^{-k-1} d^k((x2-x1+phi)/-x0) = "
        "x2^{-k-1} d^k((x1-x0-phi)/x2)";

    SuperSeries phi = with_phis ? V.phi_shift : SuperSeries::zero(V.spec, L);
    SuperSeries x0_pow = SuperSeries::even_power(V.spec, L, 0, -k - 1);
    WindowedDelta t1{V.spec, L, /*lead*/ 1, +1, -V.x2, -phi, /*denom*/ 0, +1, k, window};
    WindowedDelta t2{V.spec, L, /*lead*/ 2, +1, -V.x1, phi, /*denom*/ 0, -1, k, window};
    SuperSeries lhs = delta_expand(t1).mul(x0_pow, WeightTrunc::none()) -
                      delta_expand(t2).mul(x0_pow, WeightTrunc::none());
    WindowedDelta rd{V.spec, L, /*lead*/ 1, +1, -V.x0, -phi, /*denom*/ 2, +1, k, window};
    SuperSeries rhs = delta_expand(rd).mul(SuperSeries::even_power(V.spec, L, 2, -k - 1),
                                           WeightTrunc::none());
    int shrink = k + (with_phis ? 2 : 0) + 1;
    return finish(std::move(chk), lhs, rhs, shrink, window);
}

DeltaCheck check_expansion_prop(int window, int n, int L) {
    DeltaVars V(window, L);
    DeltaCheck chk;
    chk.id = "delta.expansion_prop.n" + std::to_string(n);
    chk.description =
        "(x1-x2-phi)^{-n-1} - (-x2+x1-phi)^{-n-1} = ((-1)^n/n!) (d/dx1)^n x2^{-1} d((x1-phi)/x2)";

    SuperSeries phi = V.phi_shift;
    SuperSeries t1 = binomial_power(V.spec, L, 1, +1, -V.x2, -n - 1).taylor_shift(1, -phi);
    SuperSeries t2 = binomial_power(V.spec, L, 2, -1, V.x1, -n - 1).taylor_shift(2, phi);
    SuperSeries lhs = t1 - t2;

    WindowedDelta rd{V.spec, L, /*lead*/ 1, +1, SuperSeries::zero(V.spec, L), -phi,
                     /*denom*/ 2, +1, 0, window};
    SuperSeries rhs = delta_expand(rd).mul(SuperSeries::even_power(V.spec, L, 2, -1),
                                           WeightTrunc::none());
    Rational fact(1);
    for (int j = 1; j <= n; ++j) {
        rhs = rhs.derive_even(1);
        fact *= j;
    }
    Scalar c(Rational(1) / fact);
    if (n & 1) c = -c;
    rhs = rhs.scale(c);
    return finish(std::move(chk), lhs, rhs, n + 3, window);
}

DeltaCheck check_delta_substitution(int window, int which, int L) {
    // The inverted substitution target is certified down to x2-degree
    // -(2W+2); within the kernel's certified x1-band the delta index n is at
    // most W, so product coefficients with x2-degree >= -W-2 never touch the
    // uncertified tail.  The per-variable product rule cannot see this
    // (x2 and x1 exponents are linked through n), so the x2 certificate of
    // the products is set from that bound below.
    DeltaVars V(window, L, 2 * window + 2);
    DeltaCheck chk;
    chk.id = "delta.substitute.X" + std::to_string(which);
    chk.description =
        "d((x2+x0+phi)/x1) X(x1,..) = d((x2+x0+phi)/x1) X(x2+x0+phi,..)";

    SuperSeries X, X_sub;
    SuperSeries arg_no_phi = V.x2 + V.x0;
    switch (which) {
        case 0:
            X = V.x1;
            X_sub = arg_no_phi + V.phi_shift;
            break;
        case 1: {
            X = SuperSeries::even_power(V.spec, L, 1, -1);
            X_sub = binomial_power(V.spec, L, 2, +1, V.x0, -1).taylor_shift(2, V.phi_shift);
            break;
        }
        case 2: {
            X = V.p1p * V.x1 * V.x1;
            SuperSeries sq = arg_no_phi * arg_no_phi;
            X_sub = V.p1p.mul(sq.taylor_shift(2, V.phi_shift), WeightTrunc::none());
            break;
        }
        default:
            throw std::invalid_argument("check_delta_substitution: bad selector");
    }
    WindowedDelta kern{V.spec, L, /*lead*/ 2, +1, V.x0, V.phi_shift, /*denom*/ 1, +1, 0, window};
    SuperSeries K = delta_expand(kern);
    SuperSeries lhs = K * X;
    SuperSeries rhs = K * X_sub;
    if (which == 1) {
        for (SuperSeries* s : {&lhs, &rhs}) {
            s->cert[2].cert_lo = -(long)window - 2;
            s->cert[2].cert_hi = kUnbounded;
        }
    }
    return finish(std::move(chk), lhs, rhs, 3, window);
}

DeltaCheck check_delta_point_eval(int window, int L) {
    DeltaCheck chk;
    chk.id = "delta.point_eval";
    chk.description = "f(x) delta_W(x) = f(1) delta_W(x)";
    int pad = window + 6;
    auto spec = make_spec({{"x", -pad, pad}}, {});
    SuperSeries delta = SuperSeries::zero(spec, L);
    for (int n = -window; n <= window; ++n) {
        TermKey k;
        k.e[0] = n;
        delta.add_term(k, GrassmannElement::one(L));
    }
    delta.cert[0] = CertWindow{-window, window, -kUnbounded, kUnbounded};

    SuperSeries f = SuperSeries::zero(spec, L);
    GrassmannElement f1(L);
    const int coeffs[5] = {3, -1, 2, 5, -4};
    for (int j = -2; j <= 2; ++j) {
        TermKey k;
        k.e[0] = j;
        GrassmannElement c = GrassmannElement::scalar(L, Scalar(coeffs[j + 2]));
        f.add_term(k, c);
        f1 += c;
    }
    SuperSeries lhs = f * delta;
    SuperSeries rhs = delta.scale(f1);
    return finish(std::move(chk), lhs, rhs, 3, window);
}

DeltaCheck check_two_term_negative_control(int window, int L) {
    DeltaVars V(window, L);
    DeltaCheck chk;
    chk.id = "delta.two_term.negative_control";
    chk.description = "sign-flipped phi term must be detected as a mismatch";
    chk.negative_control = true;

    SuperSeries bad_phi = V.p1p * V.p2m - V.p1m * V.p2p;
    WindowedDelta lhs_d{V.spec, L, 2, +1, V.x0, bad_phi, 1, +1, 0, window};
    SuperSeries lhs = delta_expand(lhs_d).mul(SuperSeries::even_power(V.spec, L, 1, -1),
                                              WeightTrunc::none());
    WindowedDelta rhs_d{V.spec, L, 1, +1, -V.x0, -V.phi_shift, 2, +1, 0, window};
    SuperSeries rhs = delta_expand(rhs_d).mul(SuperSeries::even_power(V.spec, L, 2, -1),
                                              WeightTrunc::none());
    auto cmp = compare_certified(lhs, rhs, 4);
    chk.window = window;
    chk.pass = !cmp.pass; // must fail to pass
    for (auto& m : cmp.mismatches) {
        std::ostringstream os;
        os << "detected at";
        for (int v = 0; v < 3; ++v) os << " e" << v << "=" << m.key.e[v];
        os << " mask=" << (int)m.key.mask;
        chk.mismatches.push_back(os.str());
    }
    return chk;
}

std::vector<DeltaCheck> run_delta_suite(int window, int L, ExecMode mode) {
    std::vector<std::function<DeltaCheck()>> jobs;
    for (int k = 0; k <= 2; ++k) {
        jobs.push_back([=] { return check_two_term(window, true, k, L); });
        jobs.push_back([=] { return check_three_term(window, true, k, L); });
        jobs.push_back([=] { return check_two_term(window, false, k, L); });
        jobs.push_back([=] { return check_three_term(window, false, k, L); });
    }
    for (int n = 0; n <= 2; ++n)
        jobs.push_back([=] { return check_expansion_prop(window, n, L); });
    for (int w = 0; w <= 2; ++w)
        jobs.push_back([=] { return check_delta_substitution(window, w, L); });
    jobs.push_back([=] { return check_delta_point_eval(window, L); });
    jobs.push_back([=] { return check_two_term_negative_control(window, L); });

    std::vector<DeltaCheck> out(jobs.size());
    for_each_index(jobs.size(), mode, [&](std::size_t i) { out[i] = jobs[i](); });
    return out;
}

} // namespace n2alg
