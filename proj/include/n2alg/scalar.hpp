#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace n2alg {

using Rational = mpq_class;

/// Canonicalized rational; mpq_class(n, d) alone does not reduce.
inline Rational make_rational(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Exact element of the ring Q[i, sqrt(2)]: a + b*sqrt(2) + c*i + d*i*sqrt(2).
///
/// This ring contains every constant appearing in the supported identities
/// (i, 1/sqrt(2), all rational structure constants), so no floating point is
/// ever needed.  All four components are exact rationals.
class Scalar {
public:
    Rational a, b, c, d;

    Scalar() : a(0), b(0), c(0), d(0) {}
    Scalar(long v) : a(v), b(0), c(0), d(0) {}
    Scalar(const Rational& v) : a(v), b(0), c(0), d(0) {}
    Scalar(Rational a_, Rational b_, Rational c_, Rational d_)
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}

    static Scalar zero() { return Scalar(); }
    static Scalar one() { return Scalar(1); }
    static Scalar i() { return Scalar(0, 0, 1, 0); }
    static Scalar sqrt2() { return Scalar(0, 1, 0, 0); }
    /// 1/sqrt(2) = sqrt(2)/2.
    static Scalar inv_sqrt2() { return Scalar(0, Rational(1, 2), 0, 0); }
    static Scalar rational(long num, long den) { return Scalar(make_rational(num, den)); }

    bool is_zero() const { return a == 0 && b == 0 && c == 0 && d == 0; }
    bool is_rational() const { return b == 0 && c == 0 && d == 0; }

    Scalar operator-() const { return Scalar(-a, -b, -c, -d); }
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar operator+(const Scalar& o) const { Scalar r = *this; return r += o; }
    Scalar operator-(const Scalar& o) const { Scalar r = *this; return r -= o; }
    Scalar operator*(const Scalar& o) const;
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    bool operator==(const Scalar& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }
    /// Lexicographic order on components; used only for canonical choices.
    bool operator<(const Scalar& o) const;

    /// Exact inverse.  Throws std::domain_error when the element is zero.
    Scalar inverse() const;

    /// Exact square root within the ring, when one exists.
    std::optional<Scalar> sqrt() const;

    /// True when the first nonzero component (in a,b,c,d order) is positive.
    /// The zero element counts as canonical.
    bool canonical_sign() const;

    /// Rendering of the documented grammar, e.g. "1/2 - 3*r2 + i*r2".
    std::string str() const;
    /// Parse the same grammar.  Throws std::invalid_argument on bad input.
    static Scalar parse(const std::string& text);
};

inline Scalar operator*(long k, const Scalar& s) { return Scalar(k) * s; }

} // namespace n2alg
