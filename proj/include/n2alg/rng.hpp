#pragma once

#include "n2alg/grassmann.hpp"

#include <cstdint>

namespace n2alg {

/// splitmix64: tiny deterministic generator so that seeded fixtures are
/// byte-identical across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
    long range(long lo, long hi) { return lo + (long)below((std::uint64_t)(hi - lo + 1)); }

    Rational rational(long max_num = 9, long max_den = 4) {
        long num = range(-max_num, max_num);
        long den = range(1, max_den);
        return make_rational(num, den);
    }

    Scalar scalar(bool allow_irrational = true) {
        Scalar s(rational());
        if (allow_irrational) {
            if (below(2)) s.b = rational();
            if (below(2)) s.c = rational();
            if (below(2)) s.d = rational();
        }
        return s;
    }

    Scalar nonzero_rational() {
        for (;;) {
            Rational q = rational();
            if (q != 0) return Scalar(q);
        }
    }

    GrassmannElement grassmann(int L, int max_terms = 4, bool allow_irrational = true) {
        GrassmannElement g(L);
        int k = (int)below((std::uint64_t)max_terms) + 1;
        for (int j = 0; j < k; ++j)
            g.add_term((std::uint32_t)below(1ull << L), scalar(allow_irrational));
        return g;
    }

    GrassmannElement homogeneous_grassmann(int L, int parity) {
        GrassmannElement g(L);
        for (int tries = 0; tries < 16 && g.terms.size() < 3; ++tries) {
            std::uint32_t mask = (std::uint32_t)below(1ull << L);
            if (parity_of_mask(mask) == parity) g.add_term(mask, scalar());
        }
        if (g.is_zero() && parity == 0) g.add_term(0, scalar());
        if (g.is_zero() && parity == 1 && L > 0) g.add_term(1, scalar());
        return g;
    }

    /// Invertible even element: nonzero rational body plus even soul terms.
    GrassmannElement invertible_even(int L) {
        GrassmannElement g(L);
        g.add_term(0, nonzero_rational());
        for (int j = 0; j < 2; ++j) {
            std::uint32_t mask = (std::uint32_t)below(1ull << L);
            if (mask != 0 && parity_of_mask(mask) == 0) g.add_term(mask, scalar());
        }
        return g;
    }

    /// Even soul element (useful as an A-type coefficient with soul).
    GrassmannElement even_soul(int L) {
        GrassmannElement g(L);
        for (int j = 0; j < 2; ++j) {
            std::uint32_t mask = (std::uint32_t)below(1ull << L);
            if (mask != 0 && parity_of_mask(mask) == 0) g.add_term(mask, scalar());
        }
        return g;
    }

    GrassmannElement odd_element(int L) {
        GrassmannElement g(L);
        for (int tries = 0; tries < 8 && g.terms.size() < 2; ++tries) {
            std::uint32_t mask = (std::uint32_t)below(1ull << L);
            if (parity_of_mask(mask) == 1) g.add_term(mask, scalar());
        }
        return g;
    }

private:
    std::uint64_t state_;
};

} // namespace n2alg
