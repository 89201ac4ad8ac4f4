#include "n2alg/scalar.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace n2alg {

Scalar& Scalar::operator+=(const Scalar& o) {
    a += o.a; b += o.b; c += o.c; d += o.d;
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    a -= o.a; b -= o.b; c -= o.c; d -= o.d;
    return *this;
}

Scalar Scalar::operator*(const Scalar& o) const {
    // Basis products: r2*r2 = 2, i*i = -1, (i*r2)^2 = -2, r2*i = i*r2,
    // r2*(i*r2) = 2i, i*(i*r2) = -r2.  Components are usually sparse, so
    // only nonzero pairs are multiplied.
    static const struct { int k; int c; } table[4][4] = {
        {{0, 1}, {1, 1}, {2, 1}, {3, 1}},
        {{1, 1}, {0, 2}, {3, 1}, {2, 2}},
        {{2, 1}, {3, 1}, {0, -1}, {1, -1}},
        {{3, 1}, {2, 2}, {1, -1}, {0, -2}},
    };
    const Rational* lhs[4] = {&a, &b, &c, &d};
    const Rational* rhs[4] = {&o.a, &o.b, &o.c, &o.d};
    Scalar out;
    Rational* res[4] = {&out.a, &out.b, &out.c, &out.d};
    Rational tmp;
    for (int i = 0; i < 4; ++i) {
        if (mpq_sgn(lhs[i]->get_mpq_t()) == 0) continue;
        for (int j = 0; j < 4; ++j) {
            if (mpq_sgn(rhs[j]->get_mpq_t()) == 0) continue;
            auto& e = table[i][j];
            mpq_mul(tmp.get_mpq_t(), lhs[i]->get_mpq_t(), rhs[j]->get_mpq_t());
            if (e.c == 2 || e.c == -2) mpq_mul_2exp(tmp.get_mpq_t(), tmp.get_mpq_t(), 1);
            if (e.c < 0) mpq_neg(tmp.get_mpq_t(), tmp.get_mpq_t());
            mpq_add(res[e.k]->get_mpq_t(), res[e.k]->get_mpq_t(), tmp.get_mpq_t());
        }
    }
    return out;
}

bool Scalar::operator<(const Scalar& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    if (c != o.c) return c < o.c;
    return d < o.d;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw std::domain_error("Scalar::inverse: zero element");
    // Multiply by the i-conjugate to land in Q[sqrt(2)], then rationalize.
    Scalar ci(a, b, -c, -d);
    Scalar n = *this * ci; // n = e + f*sqrt(2), components c,d vanish
    Rational e = n.a, f = n.b;
    Rational norm = e * e - 2 * f * f; // (e + f r2)(e - f r2)
    if (norm == 0) throw std::domain_error("Scalar::inverse: zero norm");
    Scalar sr2(e / norm, -f / norm, 0, 0);
    return ci * sr2;
}

namespace {

// Exact square root of a nonnegative rational, if it is a perfect square.
std::optional<Rational> rational_sqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    if (q == 0) return Rational(0);
    mpz_class num = q.get_num(), den = q.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return Rational(rn) / Rational(rd);
}

struct QI { Rational re, im; }; // element of Q(i)

std::optional<QI> qi_sqrt(const QI& w) {
    if (w.im == 0) {
        if (auto u = rational_sqrt(w.re)) return QI{*u, 0};
        if (auto v = rational_sqrt(-w.re)) return QI{0, *v};
        return std::nullopt;
    }
    auto r = rational_sqrt(w.re * w.re + w.im * w.im);
    if (!r) return std::nullopt;
    auto u = rational_sqrt((w.re + *r) / 2);
    if (!u || *u == 0) return std::nullopt;
    return QI{*u, w.im / (2 * (*u))};
}

QI qi_mul(const QI& x, const QI& y) {
    return QI{x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}

} // namespace

std::optional<Scalar> Scalar::sqrt() const {
    // Write this = alpha + beta*sqrt(2) with alpha, beta in Q(i) and look for
    // y = gamma + delta*sqrt(2): gamma^2 + 2 delta^2 = alpha, 2 gamma delta = beta.
    QI alpha{a, c}, beta{b, d};
    auto build = [&](const QI& g, const QI& dl) {
        Scalar y(g.re, dl.re, g.im, dl.im);
        return (y * y == *this) ? std::optional<Scalar>(y) : std::nullopt;
    };
    if (beta.re == 0 && beta.im == 0) {
        if (auto g = qi_sqrt(alpha)) {
            if (auto y = build(*g, QI{0, 0})) return y;
        }
        if (auto dl = qi_sqrt(QI{alpha.re / 2, alpha.im / 2})) {
            if (auto y = build(QI{0, 0}, *dl)) return y;
        }
        return std::nullopt;
    }
    // gamma^2 and 2 delta^2 are the roots of z^2 - alpha z + beta^2/2 over Q(i).
    QI b2 = qi_mul(beta, beta);
    QI disc{alpha.re * alpha.re - alpha.im * alpha.im - 2 * b2.re,
            2 * alpha.re * alpha.im - 2 * b2.im};
    auto s = qi_sqrt(disc);
    if (!s) return std::nullopt;
    for (int pick = 0; pick < 2; ++pick) {
        QI sv = pick == 0 ? *s : QI{-s->re, -s->im};
        QI P{(alpha.re + sv.re) / 2, (alpha.im + sv.im) / 2};
        auto g = qi_sqrt(P);
        if (!g || (g->re == 0 && g->im == 0)) continue;
        // delta = beta / (2 gamma)
        Rational nrm = 4 * (g->re * g->re + g->im * g->im);
        QI inv2g{2 * g->re / nrm, -2 * g->im / nrm};
        QI dl = qi_mul(beta, inv2g);
        if (auto y = build(*g, dl)) return y;
    }
    return std::nullopt;
}

bool Scalar::canonical_sign() const {
    if (a != 0) return a > 0;
    if (b != 0) return b > 0;
    if (c != 0) return c > 0;
    if (d != 0) return d > 0;
    return true;
}

namespace {

void append_term(std::ostringstream& os, bool& first, const Rational& q, const char* unit) {
    if (q == 0) return;
    Rational mag = q < 0 ? Rational(-q) : q;
    if (first) {
        if (q < 0) os << "-";
        first = false;
    } else {
        os << (q < 0 ? " - " : " + ");
    }
    if (mag == 1 && unit[0] != '\0') {
        os << unit;
    } else {
        os << mag.get_str();
        if (unit[0] != '\0') os << "*" << unit;
    }
}

} // namespace

std::string Scalar::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    append_term(os, first, a, "");
    append_term(os, first, b, "r2");
    append_term(os, first, c, "i");
    append_term(os, first, d, "i*r2");
    return os.str();
}

Scalar Scalar::parse(const std::string& text) {
    Scalar out;
    size_t p = 0;
    auto skip_ws = [&] { while (p < text.size() && std::isspace((unsigned char)text[p])) ++p; };
    skip_ws();
    if (p >= text.size()) throw std::invalid_argument("Scalar::parse: empty input");
    bool first = true;
    while (p < text.size()) {
        skip_ws();
        if (p >= text.size()) break;
        int sign = 1;
        if (text[p] == '+' || text[p] == '-') {
            sign = text[p] == '-' ? -1 : 1;
            ++p;
            skip_ws();
        } else if (!first) {
            throw std::invalid_argument("Scalar::parse: expected '+' or '-'");
        }
        first = false;
        // optional rational magnitude
        Rational mag(1);
        bool saw_number = false;
        size_t q = p;
        while (q < text.size() && (std::isdigit((unsigned char)text[q]) || text[q] == '/')) ++q;
        if (q > p) {
            std::string numtxt = text.substr(p, q - p);
            if (mpq_set_str(mag.get_mpq_t(), numtxt.c_str(), 10) != 0)
                throw std::invalid_argument("Scalar::parse: bad rational '" + numtxt + "'");
            mag.canonicalize();
            saw_number = true;
            p = q;
        }
        skip_ws();
        if (p < text.size() && text[p] == '*') { ++p; skip_ws(); }
        // optional unit: r2, i, i*r2
        int unit = 0; // 0: rational, 1: r2, 2: i, 3: i*r2
        if (p < text.size() && text[p] == 'r') {
            if (p + 1 >= text.size() || text[p + 1] != '2')
                throw std::invalid_argument("Scalar::parse: expected r2");
            unit = 1; p += 2;
        } else if (p < text.size() && text[p] == 'i') {
            ++p;
            size_t save = p;
            skip_ws();
            if (p < text.size() && text[p] == '*') {
                ++p; skip_ws();
                if (p + 1 < text.size() && text[p] == 'r' && text[p + 1] == '2') {
                    unit = 3; p += 2;
                } else {
                    p = save;
                    unit = 2;
                }
            } else {
                p = save;
                unit = 2;
            }
        }
        if (!saw_number && unit == 0)
            throw std::invalid_argument("Scalar::parse: dangling sign");
        Rational v = sign * mag;
        switch (unit) {
            case 0: out.a += v; break;
            case 1: out.b += v; break;
            case 2: out.c += v; break;
            case 3: out.d += v; break;
        }
        skip_ws();
        if (p < text.size() && text[p] != '+' && text[p] != '-')
            throw std::invalid_argument("Scalar::parse: trailing garbage at '" + text.substr(p) + "'");
    }
    return out;
}

} // namespace n2alg
