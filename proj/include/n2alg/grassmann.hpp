#pragma once

#include "n2alg/scalar.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace n2alg {

/// Sign and result mask of merging two exterior monomials given by bitmasks.
/// Bit k stands for the k-th anticommuting generator; monomials are stored
/// with ascending bit order.  Returns nullopt when the masks intersect
/// (repeated odd generator, so the product is zero).
///
/// Every Koszul sign in the library funnels through this routine.
struct MergeResult {
    std::uint32_t mask;
    int sign; // +1 or -1
};
std::optional<MergeResult> exterior_merge(std::uint32_t a, std::uint32_t b);

inline int parity_of_mask(std::uint32_t m) { return __builtin_popcount(m) & 1; }

/// Element of the Grassmann algebra on L generators over Q[i, sqrt(2)].
/// Terms map canonical generator subsets (bitmasks) to scalars; zero
/// coefficients are never retained.
class GrassmannElement {
public:
    int generators = 0; // L
    std::map<std::uint32_t, Scalar> terms;

    GrassmannElement() = default;
    explicit GrassmannElement(int L) : generators(L) {}
    GrassmannElement(int L, const Scalar& body) : generators(L) { add_term(0, body); }

    static GrassmannElement scalar(int L, const Scalar& s) { return GrassmannElement(L, s); }
    static GrassmannElement one(int L) { return GrassmannElement(L, Scalar::one()); }
    /// Single generator theta_k, 1-based index.
    static GrassmannElement theta(int L, int k);
    /// Monomial theta_{k1}...theta_{km} from a bitmask.
    static GrassmannElement monomial(int L, std::uint32_t mask, const Scalar& coeff);

    bool is_zero() const { return terms.empty(); }
    void add_term(std::uint32_t mask, const Scalar& coeff);
    Scalar coeff_at(std::uint32_t mask) const {
        auto it = terms.find(mask);
        return it == terms.end() ? Scalar::zero() : it->second;
    }

    /// -1 for non-homogeneous elements, else 0 or 1.
    int parity() const;
    bool is_even() const { return is_zero() || parity() == 0; }

    Scalar body() const;
    GrassmannElement soul() const;

    GrassmannElement operator-() const;
    GrassmannElement& operator+=(const GrassmannElement& o);
    GrassmannElement& operator-=(const GrassmannElement& o);
    GrassmannElement operator+(const GrassmannElement& o) const;
    GrassmannElement operator-(const GrassmannElement& o) const;
    GrassmannElement operator*(const GrassmannElement& o) const;
    GrassmannElement& operator*=(const GrassmannElement& o) { return *this = *this * o; }
    GrassmannElement operator*(const Scalar& s) const;

    bool operator==(const GrassmannElement& o) const;
    bool operator!=(const GrassmannElement& o) const { return !(*this == o); }
    bool operator<(const GrassmannElement& o) const; // for use as map key

    bool is_invertible() const { return !body().is_zero(); }
    /// Exact inverse via the finite geometric series in the nilpotent soul.
    /// Throws std::domain_error when the body vanishes.
    GrassmannElement inverse() const;
    /// Exact square root when the body has one in Q[i, sqrt(2)].
    std::optional<GrassmannElement> sqrt() const;
    /// Integer power (negative allowed for invertible elements).
    GrassmannElement pow(long k) const;

    std::string str() const;
    static GrassmannElement parse(int L, const std::string& text);
};

inline GrassmannElement operator*(const Scalar& s, const GrassmannElement& g) { return g * s; }

} // namespace n2alg
