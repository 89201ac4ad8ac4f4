#include "n2alg/grassmann.hpp"

#include <algorithm>
#include <cctype>
#include <vector>
#include <sstream>
#include <stdexcept>

namespace n2alg {

std::optional<MergeResult> exterior_merge(std::uint32_t a, std::uint32_t b) {
    if (a & b) return std::nullopt;
    // Count inversions: pairs (i in a, j in b) with i > j.
    int inversions = 0;
    std::uint32_t bb = b;
    while (bb) {
        std::uint32_t low = bb & -bb;
        // generators of a strictly above this bit of b must hop past it
        inversions += __builtin_popcount(a & ~(low | (low - 1)));
        bb ^= low;
    }
    return MergeResult{a | b, (inversions & 1) ? -1 : +1};
}

GrassmannElement GrassmannElement::theta(int L, int k) {
    if (k < 1 || k > L) throw std::invalid_argument("theta index out of range");
    GrassmannElement g(L);
    g.add_term(1u << (k - 1), Scalar::one());
    return g;
}

GrassmannElement GrassmannElement::monomial(int L, std::uint32_t mask, const Scalar& coeff) {
    GrassmannElement g(L);
    g.add_term(mask, coeff);
    return g;
}

void GrassmannElement::add_term(std::uint32_t mask, const Scalar& coeff) {
    if (coeff.is_zero()) return;
    auto it = terms.find(mask);
    if (it == terms.end()) {
        terms.emplace(mask, coeff);
    } else {
        it->second += coeff;
        if (it->second.is_zero()) terms.erase(it);
    }
}

int GrassmannElement::parity() const {
    int p = -1;
    for (auto& [mask, s] : terms) {
        int q = parity_of_mask(mask);
        if (p == -1) p = q;
        else if (p != q) return -1;
    }
    return p == -1 ? 0 : p;
}

Scalar GrassmannElement::body() const {
    auto it = terms.find(0);
    return it == terms.end() ? Scalar::zero() : it->second;
}

GrassmannElement GrassmannElement::soul() const {
    GrassmannElement g = *this;
    g.terms.erase(0);
    return g;
}

GrassmannElement GrassmannElement::operator-() const {
    GrassmannElement g(generators);
    for (auto& [mask, s] : terms) g.terms.emplace(mask, -s);
    return g;
}

GrassmannElement& GrassmannElement::operator+=(const GrassmannElement& o) {
    if (!terms.empty() && !o.terms.empty() && generators != o.generators)
        throw std::invalid_argument("GrassmannElement: mismatched generator counts");
    generators = std::max(generators, o.generators);
    for (auto& [mask, s] : o.terms) add_term(mask, s);
    return *this;
}

GrassmannElement& GrassmannElement::operator-=(const GrassmannElement& o) {
    if (!terms.empty() && !o.terms.empty() && generators != o.generators)
        throw std::invalid_argument("GrassmannElement: mismatched generator counts");
    generators = std::max(generators, o.generators);
    for (auto& [mask, s] : o.terms) add_term(mask, -s);
    return *this;
}

GrassmannElement GrassmannElement::operator+(const GrassmannElement& o) const {
    GrassmannElement g = *this;
    return g += o;
}

GrassmannElement GrassmannElement::operator-(const GrassmannElement& o) const {
    GrassmannElement g = *this;
    return g -= o;
}

GrassmannElement GrassmannElement::operator*(const GrassmannElement& o) const {
    if (!terms.empty() && !o.terms.empty() && generators != o.generators)
        throw std::invalid_argument("GrassmannElement: mismatched generator counts");
    GrassmannElement g(std::max(generators, o.generators));
    if (terms.empty() || o.terms.empty()) return g;
    // dense accumulation over the at most 2^L masks of the product
    thread_local std::vector<Scalar> acc;
    thread_local std::vector<std::uint32_t> touched;
    std::size_t span = 1u << g.generators;
    if (acc.size() < span) acc.resize(span);
    touched.clear();
    for (auto& [m1, s1] : terms)
        for (auto& [m2, s2] : o.terms) {
            auto merged = exterior_merge(m1, m2);
            if (!merged) continue;
            Scalar v = s1 * s2;
            Scalar& slot = acc[merged->mask];
            if (slot.is_zero() && !v.is_zero()) touched.push_back(merged->mask);
            if (merged->sign < 0) slot -= v;
            else slot += v;
        }
    std::sort(touched.begin(), touched.end());
    for (std::uint32_t m : touched) {
        if (!acc[m].is_zero()) g.terms.emplace_hint(g.terms.end(), m, acc[m]);
        acc[m] = Scalar();
    }
    return g;
}

GrassmannElement GrassmannElement::operator*(const Scalar& s) const {
    GrassmannElement g(generators);
    if (s.is_zero()) return g;
    for (auto& [mask, v] : terms) g.terms.emplace(mask, v * s);
    return g;
}

bool GrassmannElement::operator==(const GrassmannElement& o) const {
    return terms == o.terms;
}

bool GrassmannElement::operator<(const GrassmannElement& o) const {
    return terms < o.terms;
}

GrassmannElement GrassmannElement::inverse() const {
    Scalar b = body();
    if (b.is_zero())
        throw std::domain_error("GrassmannElement::inverse: zero body, element not invertible");
    Scalar binv = b.inverse();
    // 1/(b + s) = (1/b) sum_k (-s/b)^k, finite because the soul is nilpotent.
    GrassmannElement n = soul() * (-binv);
    GrassmannElement acc = GrassmannElement::one(generators);
    GrassmannElement power = GrassmannElement::one(generators);
    for (int k = 1; k <= generators; ++k) {
        power *= n;
        if (power.is_zero()) break;
        acc += power;
    }
    return acc * binv;
}

std::optional<GrassmannElement> GrassmannElement::sqrt() const {
    Scalar b = body();
    auto rb = b.sqrt();
    if (!rb) return std::nullopt;
    if (rb->is_zero()) return is_zero() ? std::optional<GrassmannElement>(*this) : std::nullopt;
    // sqrt(b(1+n)) = sqrt(b) * sum_k C(1/2, k) n^k with nilpotent n.
    GrassmannElement n = soul() * b.inverse();
    GrassmannElement acc = GrassmannElement::one(generators);
    GrassmannElement power = GrassmannElement::one(generators);
    Rational coeff(1);
    for (int k = 1; k <= generators; ++k) {
        power *= n;
        if (power.is_zero()) break;
        coeff *= make_rational(3 - 2 * k, 2 * k); // C(1/2,k)/C(1/2,k-1)
        acc += power * Scalar(coeff);
    }
    return acc * (*rb);
}

GrassmannElement GrassmannElement::pow(long k) const {
    GrassmannElement base = k < 0 ? inverse() : *this;
    if (k < 0) k = -k;
    GrassmannElement acc = GrassmannElement::one(generators);
    for (long j = 0; j < k; ++j) acc *= base;
    return acc;
}

std::string GrassmannElement::str() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [mask, s] : terms) {
        if (!first) os << " + ";
        first = false;
        if (mask == 0) {
            os << "(" << s.str() << ")";
            continue;
        }
        os << "(" << s.str() << ") * ";
        for (int k = 0; k < 32; ++k)
            if (mask & (1u << k)) os << "t" << (k + 1);
    }
    return os.str();
}

GrassmannElement GrassmannElement::parse(int L, const std::string& text) {
    GrassmannElement g(L);
    size_t p = 0;
    auto skip_ws = [&] { while (p < text.size() && std::isspace((unsigned char)text[p])) ++p; };
    skip_ws();
    if (text.compare(p, 1, "0") == 0 && p + 1 == text.size()) return g;
    bool first = true;
    while (p < text.size()) {
        skip_ws();
        int outer = 1;
        if (text[p] == '+' || text[p] == '-') {
            outer = text[p] == '-' ? -1 : 1;
            ++p;
            skip_ws();
        } else if (!first) {
            throw std::invalid_argument("GrassmannElement::parse: expected '+'");
        }
        first = false;
        Scalar coeff;
        if (text[p] == '(') {
            size_t depth = 1, q = p + 1;
            while (q < text.size() && depth) {
                if (text[q] == '(') ++depth;
                if (text[q] == ')') --depth;
                ++q;
            }
            if (depth) throw std::invalid_argument("GrassmannElement::parse: unbalanced parens");
            coeff = Scalar::parse(text.substr(p + 1, q - p - 2));
            p = q;
        } else {
            size_t q = p;
            while (q < text.size() && text[q] != '*' && text[q] != '+' && text[q] != '-') ++q;
            coeff = Scalar::parse(text.substr(p, q - p));
            p = q;
        }
        if (outer < 0) coeff = -coeff;
        skip_ws();
        std::uint32_t mask = 0;
        if (p < text.size() && text[p] == '*') {
            ++p;
            skip_ws();
            while (p < text.size() && text[p] == 't') {
                ++p;
                size_t q = p;
                while (q < text.size() && std::isdigit((unsigned char)text[q])) ++q;
                int idx = std::stoi(text.substr(p, q - p));
                if (idx < 1 || idx > L)
                    throw std::invalid_argument("GrassmannElement::parse: generator out of range");
                mask |= 1u << (idx - 1);
                p = q;
            }
        }
        g.add_term(mask, coeff);
        skip_ws();
    }
    return g;
}

} // namespace n2alg
