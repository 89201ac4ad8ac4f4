#pragma once

#include "n2alg/grassmann.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace n2alg {

/// Variable layout of a truncated formal series: named even variables with
/// storage windows of integer exponents, plus an ordered list of odd
/// variables (exponent 0 or 1 each).
struct VariableSpec {
    struct EvenVar {
        std::string name;
        int lo, hi; // storage window
    };
    std::vector<EvenVar> even;
    std::vector<std::string> odd;

    int even_index(const std::string& name) const;
    int odd_index(const std::string& name) const;
};

using SpecPtr = std::shared_ptr<const VariableSpec>;

SpecPtr make_spec(std::vector<VariableSpec::EvenVar> even, std::vector<std::string> odd);

/// Sentinel for unbounded exponent ranges.
inline constexpr long kUnbounded = 1L << 40;

/// Per-even-variable certificate: stored coefficients are exact on
/// [cert_lo, cert_hi]; the true object's support is contained in
/// [supp_lo, supp_hi].  Both ranges may be unbounded.
struct CertWindow {
    long cert_lo = -kUnbounded, cert_hi = kUnbounded;
    long supp_lo = -kUnbounded, supp_hi = kUnbounded;
};

/// Exponent key: up to 4 even exponents plus an odd-variable bitmask.
struct TermKey {
    std::array<int, 4> e{0, 0, 0, 0};
    std::uint8_t mask = 0;

    bool operator<(const TermKey& o) const {
        if (e != o.e) return e < o.e;
        return mask < o.mask;
    }
    bool operator==(const TermKey& o) const { return e == o.e && mask == o.mask; }
};

/// Truncation policy by weight.  Weight of a term is
/// dir * (exponent of the designated even variable) + (number of odd formal
/// variables)/2; stored scaled by 2 to stay integral.  dir=+1 grades towards
/// zero, dir=-1 towards infinity.
struct WeightTrunc {
    bool enabled = false;
    int even_var = 0;
    int dir = +1;
    int max2 = 0; // keep terms with 2*weight <= max2

    static WeightTrunc none() { return WeightTrunc{}; }
    static WeightTrunc at(int even_var, int dir, int max2) {
        return WeightTrunc{true, even_var, dir, max2};
    }
};

/// Truncated formal Laurent series in the layout's even variables with
/// adjoined odd variables and Grassmann coefficients.  Values are immutable
/// in spirit: every operation returns a fresh series.
class SuperSeries {
public:
    SpecPtr spec;
    int generators = 0; // Grassmann generator count of all coefficients
    std::map<TermKey, GrassmannElement> terms;
    std::vector<CertWindow> cert; // one per even variable

    SuperSeries() = default;
    SuperSeries(SpecPtr s, int L);

    static SuperSeries zero(SpecPtr s, int L) { return SuperSeries(std::move(s), L); }
    static SuperSeries constant(SpecPtr s, int L, const GrassmannElement& g);
    static SuperSeries monomial(SpecPtr s, int L, const TermKey& key, const GrassmannElement& g);
    /// Convenience: x_var^k with unit coefficient.
    static SuperSeries even_power(SpecPtr s, int L, int var, int k);
    /// Convenience: a single odd variable.
    static SuperSeries odd_var(SpecPtr s, int L, int var);

    bool is_zero() const { return terms.empty(); }
    int n_even() const { return (int)spec->even.size(); }

    void add_term(const TermKey& key, const GrassmannElement& g);
    GrassmannElement coeff(const TermKey& key) const;

    /// -1 if non-homogeneous; otherwise combined parity of odd variables and
    /// Grassmann coefficient terms.
    int parity() const;

    SuperSeries operator-() const;
    SuperSeries& operator+=(const SuperSeries& o);
    SuperSeries& operator-=(const SuperSeries& o);
    SuperSeries operator+(const SuperSeries& o) const;
    SuperSeries operator-(const SuperSeries& o) const;
    SuperSeries operator*(const SuperSeries& o) const { return mul(o, WeightTrunc::none()); }
    SuperSeries mul(const SuperSeries& o, const WeightTrunc& trunc) const;
    SuperSeries scale(const GrassmannElement& g) const; // left multiplication
    SuperSeries scale(const Scalar& s) const;

    bool operator==(const SuperSeries& o) const { return terms == o.terms; }
    bool operator!=(const SuperSeries& o) const { return !(*this == o); }

    /// Partial derivative; odd derivatives are graded left derivatives.
    SuperSeries derive(const std::string& var) const;
    SuperSeries derive_even(int var) const;
    SuperSeries derive_odd(int var) const;

    /// Coefficient series of var^(-1); requires -1 certified for var.
    SuperSeries residue(int var) const;

    /// f(.., x_v + shift, ..) as the finite Taylor sum; shift must be even
    /// and nilpotent (every term carries an odd variable or soul factor).
    SuperSeries taylor_shift(int var, const SuperSeries& shift,
                             const WeightTrunc& trunc = WeightTrunc::none()) const;

    /// Integer power; negative powers factor through the leading monomial.
    SuperSeries pow_int(long k, std::optional<TermKey> lead,
                        const WeightTrunc& trunc = WeightTrunc::none()) const;

    /// Drop terms whose 2*weight exceeds trunc.max2.
    SuperSeries truncated(const WeightTrunc& trunc) const;
    /// Smallest 2*weight present, or nullopt for the zero series.
    std::optional<int> min_weight2(int even_var, int dir) const;
    /// Key of the unique minimal-weight term; nullopt when not unique.
    std::optional<TermKey> lead_key(int even_var, int dir) const;

    bool key_certified(const TermKey& key) const;
    /// Intersect this certificate with explicit per-variable intervals.
    void restrict_cert(int var, long lo, long hi);
    void set_support(int var, long lo, long hi);

    std::string str() const;
};

/// Certificate arithmetic for products, shared with the field layer.
CertWindow combine_mul(const CertWindow& a, const CertWindow& b);
CertWindow combine_add(const CertWindow& a, const CertWindow& b);

struct EvenBinding {
    SuperSeries value;
    std::optional<TermKey> lead; // required when negative powers occur
};

/// Simultaneous substitution.  Variables missing from the binding maps stay
/// untouched (they must exist in the target spec under the same name).
SuperSeries ss_substitute(const SuperSeries& f,
                          const std::map<std::string, EvenBinding>& even_bindings,
                          const std::map<std::string, SuperSeries>& odd_bindings,
                          const WeightTrunc& trunc = WeightTrunc::none());

/// Coefficient-wise comparison on the intersection of certificates.
struct SeriesMismatch {
    TermKey key;
    GrassmannElement lhs, rhs;
};
struct CompareResult {
    bool pass = true;
    std::vector<SeriesMismatch> mismatches;
    std::vector<std::array<long, 2>> region; // certified interval per even var
};
CompareResult compare_certified(const SuperSeries& a, const SuperSeries& b,
                                std::size_t max_mismatches = 8);

} // namespace n2alg
