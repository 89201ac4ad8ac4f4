#include "n2alg/superseries.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace n2alg {

int VariableSpec::even_index(const std::string& name) const {
    for (std::size_t i = 0; i < even.size(); ++i)
        if (even[i].name == name) return (int)i;
    return -1;
}

int VariableSpec::odd_index(const std::string& name) const {
    for (std::size_t i = 0; i < odd.size(); ++i)
        if (odd[i] == name) return (int)i;
    return -1;
}

SpecPtr make_spec(std::vector<VariableSpec::EvenVar> even, std::vector<std::string> odd) {
    if (even.size() > 4) throw std::invalid_argument("make_spec: at most 4 even variables");
    if (odd.size() > 8) throw std::invalid_argument("make_spec: at most 8 odd variables");
    auto s = std::make_shared<VariableSpec>();
    s->even = std::move(even);
    s->odd = std::move(odd);
    for (auto& e : s->even)
        for (auto& o : s->odd)
            if (e.name == o) throw std::invalid_argument("make_spec: even/odd name clash");
    return s;
}

namespace {

long clamp_add(long a, long b) {
    if (a >= kUnbounded || b >= kUnbounded) return kUnbounded;
    if (a <= -kUnbounded || b <= -kUnbounded) return -kUnbounded;
    return a + b;
}

} // namespace

CertWindow combine_add(const CertWindow& a, const CertWindow& b) {
    CertWindow r;
    r.cert_lo = std::max(a.cert_lo, b.cert_lo);
    r.cert_hi = std::min(a.cert_hi, b.cert_hi);
    r.supp_lo = std::min(a.supp_lo, b.supp_lo);
    r.supp_hi = std::max(a.supp_hi, b.supp_hi);
    return r;
}

CertWindow combine_mul(const CertWindow& a, const CertWindow& b) {
    CertWindow r;
    r.supp_lo = clamp_add(a.supp_lo, b.supp_lo);
    r.supp_hi = clamp_add(a.supp_hi, b.supp_hi);
    long lo = -kUnbounded, hi = kUnbounded;
    // A coefficient of the product is exact unless a split uses an
    // uncertified exponent of either factor.  Each uncertified slab of one
    // factor, shifted by the other factor's support, is discarded wholesale.
    auto exclude = [&](long bad_lo, long bad_hi) {
        if (bad_lo > bad_hi) return;
        if (bad_lo <= -kUnbounded) lo = std::max(lo, clamp_add(bad_hi, 1));
        else if (bad_hi >= kUnbounded) hi = std::min(hi, clamp_add(bad_lo, -1));
        else lo = std::max(lo, clamp_add(bad_hi, 1)); // keep the upper side
    };
    auto slabs = [&](const CertWindow& f, const CertWindow& g) {
        if (f.supp_lo < f.cert_lo)
            exclude(clamp_add(f.supp_lo, g.supp_lo), clamp_add(f.cert_lo - 1, g.supp_hi));
        if (f.supp_hi > f.cert_hi)
            exclude(clamp_add(f.cert_hi + 1, g.supp_lo), clamp_add(f.supp_hi, g.supp_hi));
    };
    slabs(a, b);
    slabs(b, a);
    r.cert_lo = lo;
    r.cert_hi = hi;
    return r;
}

SuperSeries::SuperSeries(SpecPtr s, int L) : spec(std::move(s)), generators(L) {
    cert.assign(spec->even.size(), CertWindow{});
    for (std::size_t v = 0; v < spec->even.size(); ++v) {
        cert[v].supp_lo = 0;
        cert[v].supp_hi = 0;
    }
}

SuperSeries SuperSeries::constant(SpecPtr s, int L, const GrassmannElement& g) {
    SuperSeries r(std::move(s), L);
    r.add_term(TermKey{}, g);
    return r;
}

SuperSeries SuperSeries::monomial(SpecPtr s, int L, const TermKey& key, const GrassmannElement& g) {
    SuperSeries r(std::move(s), L);
    r.add_term(key, g);
    for (std::size_t v = 0; v < r.spec->even.size(); ++v) {
        r.cert[v].supp_lo = key.e[v];
        r.cert[v].supp_hi = key.e[v];
    }
    return r;
}

SuperSeries SuperSeries::even_power(SpecPtr s, int L, int var, int k) {
    TermKey key;
    key.e[var] = k;
    return monomial(std::move(s), L, key, GrassmannElement::one(L));
}

SuperSeries SuperSeries::odd_var(SpecPtr s, int L, int var) {
    TermKey key;
    key.mask = (std::uint8_t)(1u << var);
    return monomial(std::move(s), L, key, GrassmannElement::one(L));
}

void SuperSeries::add_term(const TermKey& key, const GrassmannElement& g) {
    if (g.is_zero()) return;
    for (int v = 0; v < n_even(); ++v) {
        cert[v].supp_lo = std::min(cert[v].supp_lo, (long)key.e[v]);
        cert[v].supp_hi = std::max(cert[v].supp_hi, (long)key.e[v]);
    }
    auto it = terms.find(key);
    if (it == terms.end()) {
        terms.emplace(key, g);
    } else {
        it->second += g;
        if (it->second.is_zero()) terms.erase(it);
    }
}

GrassmannElement SuperSeries::coeff(const TermKey& key) const {
    auto it = terms.find(key);
    return it == terms.end() ? GrassmannElement(generators) : it->second;
}

int SuperSeries::parity() const {
    int p = -1;
    for (auto& [key, g] : terms)
        for (auto& [gmask, s] : g.terms) {
            int q = (parity_of_mask(key.mask) + parity_of_mask(gmask)) & 1;
            if (p == -1) p = q;
            else if (p != q) return -1;
        }
    return p == -1 ? 0 : p;
}

SuperSeries SuperSeries::operator-() const {
    SuperSeries r = *this;
    for (auto& [key, g] : r.terms) g = -g;
    return r;
}

SuperSeries& SuperSeries::operator+=(const SuperSeries& o) {
    if (terms.empty() && o.terms.empty()) {
        for (int v = 0; v < n_even(); ++v) cert[v] = combine_add(cert[v], o.cert[v]);
        return *this;
    }
    for (int v = 0; v < n_even(); ++v) cert[v] = combine_add(cert[v], o.cert[v]);
    for (auto& [key, g] : o.terms) add_term(key, g);
    return *this;
}

SuperSeries& SuperSeries::operator-=(const SuperSeries& o) {
    for (int v = 0; v < n_even(); ++v) cert[v] = combine_add(cert[v], o.cert[v]);
    for (auto& [key, g] : o.terms) add_term(key, -g);
    return *this;
}

SuperSeries SuperSeries::operator+(const SuperSeries& o) const {
    SuperSeries r = *this;
    return r += o;
}

SuperSeries SuperSeries::operator-(const SuperSeries& o) const {
    SuperSeries r = *this;
    return r -= o;
}

SuperSeries SuperSeries::mul(const SuperSeries& o, const WeightTrunc& trunc) const {
    if (spec->even.size() != o.spec->even.size() || spec->odd != o.spec->odd)
        throw std::invalid_argument("SuperSeries::mul: incompatible specs");
    SuperSeries r(spec, std::max(generators, o.generators));
    std::array<bool, 4> clipped{false, false, false, false};
    for (auto& [k1, g1] : terms) {
        for (auto& [k2, g2] : o.terms) {
            auto fm = exterior_merge(k1.mask, k2.mask);
            if (!fm) continue;
            TermKey key;
            key.mask = (std::uint8_t)fm->mask;
            bool in_window = true;
            for (int v = 0; v < n_even(); ++v) {
                key.e[v] = k1.e[v] + k2.e[v];
                if (key.e[v] < spec->even[v].lo || key.e[v] > spec->even[v].hi) {
                    in_window = false;
                    clipped[v] = true;
                }
            }
            if (!in_window) continue;
            if (trunc.enabled) {
                int w2 = trunc.dir * 2 * key.e[trunc.even_var] + __builtin_popcount(key.mask);
                if (w2 > trunc.max2) continue;
            }
            // Sign from moving each Grassmann term of g2 past the odd
            // monomial of the first factor.
            int m1_parity = parity_of_mask(k1.mask);
            GrassmannElement prod(r.generators);
            for (auto& [ga, sa] : g1.terms)
                for (auto& [gb, sb] : g2.terms) {
                    auto gm = exterior_merge(ga, gb);
                    if (!gm) continue;
                    int sign = gm->sign * fm->sign;
                    if (m1_parity && parity_of_mask(gb)) sign = -sign;
                    Scalar v = sa * sb;
                    if (sign < 0) v = -v;
                    prod.add_term(gm->mask, v);
                }
            if (!prod.is_zero()) r.add_term(key, prod);
        }
    }
    for (int v = 0; v < n_even(); ++v) {
        CertWindow w = combine_mul(cert[v], o.cert[v]);
        // Coefficients cannot be answered outside storage, so certification
        // is capped wherever the true support may spill past the window.
        if (clipped[v] || w.supp_lo < spec->even[v].lo)
            w.cert_lo = std::max(w.cert_lo, (long)spec->even[v].lo);
        if (clipped[v] || w.supp_hi > spec->even[v].hi)
            w.cert_hi = std::min(w.cert_hi, (long)spec->even[v].hi);
        r.cert[v] = w;
    }
    return r;
}

SuperSeries SuperSeries::scale(const GrassmannElement& g) const {
    SuperSeries c = constant(spec, std::max(generators, g.generators), g);
    for (int v = 0; v < n_even(); ++v) c.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
    return c.mul(*this, WeightTrunc::none());
}

SuperSeries SuperSeries::scale(const Scalar& s) const {
    SuperSeries r = *this;
    if (s.is_zero()) {
        r.terms.clear();
        return r;
    }
    for (auto& [key, g] : r.terms) g = g * s;
    return r;
}

SuperSeries SuperSeries::derive(const std::string& var) const {
    int ev = spec->even_index(var);
    if (ev >= 0) return derive_even(ev);
    int ov = spec->odd_index(var);
    if (ov >= 0) return derive_odd(ov);
    throw std::invalid_argument("SuperSeries::derive: unknown variable " + var);
}

SuperSeries SuperSeries::derive_even(int var) const {
    SuperSeries r(spec, generators);
    for (auto& [key, g] : terms) {
        if (key.e[var] == 0) continue;
        TermKey k = key;
        k.e[var] -= 1;
        r.add_term(k, g * Scalar(key.e[var]));
    }
    for (int v = 0; v < n_even(); ++v) {
        r.cert[v] = cert[v];
        if (v == var) {
            r.cert[v].cert_lo = clamp_add(cert[v].cert_lo, -1);
            r.cert[v].cert_hi = clamp_add(cert[v].cert_hi, -1);
            r.cert[v].supp_lo = clamp_add(cert[v].supp_lo, -1);
            r.cert[v].supp_hi = clamp_add(cert[v].supp_hi, -1);
        }
    }
    return r;
}

SuperSeries SuperSeries::derive_odd(int var) const {
    SuperSeries r(spec, generators);
    std::uint32_t bit = 1u << var;
    for (auto& [key, g] : terms) {
        if (!(key.mask & bit)) continue;
        TermKey k = key;
        k.mask = (std::uint8_t)(key.mask & ~bit);
        int front_sign = parity_of_mask(key.mask & (bit - 1)) ? -1 : +1;
        // Graded left derivation: passing d/dphi through the Grassmann
        // coefficient flips sign on its odd part.
        GrassmannElement out(generators);
        for (auto& [gmask, s] : g.terms) {
            int sign = front_sign * (parity_of_mask(gmask) ? -1 : +1);
            out.add_term(gmask, sign < 0 ? -s : s);
        }
        r.add_term(k, out);
    }
    for (int v = 0; v < n_even(); ++v) r.cert[v] = cert[v];
    return r;
}

SuperSeries SuperSeries::residue(int var) const {
    if (cert[var].cert_lo > -1 || cert[var].cert_hi < -1)
        throw std::domain_error("SuperSeries::residue: exponent -1 not certified");
    SuperSeries r(spec, generators);
    for (auto& [key, g] : terms) {
        if (key.e[var] != -1) continue;
        TermKey k = key;
        k.e[var] = 0;
        r.add_term(k, g);
    }
    for (int v = 0; v < n_even(); ++v) r.cert[v] = cert[v];
    r.cert[var] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
    return r;
}

namespace {

bool is_nilpotent_even(const SuperSeries& s) {
    for (auto& [key, g] : s.terms) {
        int mp = parity_of_mask(key.mask);
        for (auto& [gmask, sc] : g.terms) {
            if (((parity_of_mask(gmask) + mp) & 1) != 0) return false; // odd term
            if (key.mask == 0 && gmask == 0) return false;             // bare body
        }
    }
    return true;
}

} // namespace

SuperSeries SuperSeries::taylor_shift(int var, const SuperSeries& shift,
                                      const WeightTrunc& trunc) const {
    if (!is_nilpotent_even(shift))
        throw std::invalid_argument("SuperSeries::taylor_shift: shift must be even and nilpotent");
    SuperSeries acc = *this;
    SuperSeries deriv = *this;
    SuperSeries shift_pow = SuperSeries::constant(spec, std::max(generators, shift.generators),
                                                  GrassmannElement::one(std::max(generators, shift.generators)));
    for (int v = 0; v < acc.n_even(); ++v)
        shift_pow.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
    Rational factorial(1);
    int limit = (int)spec->odd.size() + generators + 2;
    for (int k = 1; k <= limit; ++k) {
        deriv = deriv.derive_even(var);
        shift_pow = shift_pow.mul(shift, trunc);
        if (shift_pow.is_zero() || deriv.is_zero()) break;
        factorial *= k;
        acc += shift_pow.mul(deriv, trunc).scale(Scalar(Rational(1) / factorial));
    }
    return acc;
}

SuperSeries SuperSeries::pow_int(long k, std::optional<TermKey> lead,
                                 const WeightTrunc& trunc) const {
    int L = generators;
    SuperSeries unit = SuperSeries::constant(spec, L, GrassmannElement::one(L));
    for (int v = 0; v < unit.n_even(); ++v)
        unit.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
    if (k == 0) return unit;
    if (k > 0) {
        SuperSeries acc = unit;
        for (long j = 0; j < k; ++j) acc = acc.mul(*this, trunc);
        return acc;
    }
    // Negative power: factor the leading monomial and use the geometric series.
    if (!lead) throw std::invalid_argument("SuperSeries::pow_int: negative power needs a lead term");
    auto it = terms.find(*lead);
    if (it == terms.end())
        throw std::invalid_argument("SuperSeries::pow_int: lead term absent");
    GrassmannElement c = it->second;
    GrassmannElement cinv = c.inverse();
    TermKey invkey;
    for (int v = 0; v < n_even(); ++v) invkey.e[v] = -lead->e[v];
    if (lead->mask != 0) throw std::invalid_argument("SuperSeries::pow_int: lead must be even");
    SuperSeries lead_inv = SuperSeries::monomial(spec, L, invkey, cinv);
    for (int v = 0; v < lead_inv.n_even(); ++v) {
        lead_inv.cert[v].cert_lo = -kUnbounded;
        lead_inv.cert[v].cert_hi = kUnbounded;
    }
    SuperSeries r = lead_inv.mul(*this, trunc) - unit; // strictly subleading part
    SuperSeries inv = unit;
    SuperSeries rp = unit;
    int guard = 8 * (int)(spec->even[0].hi - spec->even[0].lo + 4) + 64;
    for (int j = 1; j <= guard; ++j) {
        rp = rp.mul(r, trunc);
        if (rp.is_zero()) break;
        if (j == guard)
            throw std::runtime_error("SuperSeries::pow_int: geometric series did not terminate");
        inv += (j & 1) ? -rp : rp;
    }
    SuperSeries base_inv = inv.mul(lead_inv, trunc);
    SuperSeries acc = unit;
    for (long j = 0; j < -k; ++j) acc = acc.mul(base_inv, trunc);
    return acc;
}

SuperSeries ss_substitute(const SuperSeries& f,
                          const std::map<std::string, EvenBinding>& even_bindings,
                          const std::map<std::string, SuperSeries>& odd_bindings,
                          const WeightTrunc& trunc) {
    const SpecPtr& fspec = f.spec;
    const SpecPtr& out_spec = !even_bindings.empty()
                                  ? even_bindings.begin()->second.value.spec
                                  : (!odd_bindings.empty() ? odd_bindings.begin()->second.spec : fspec);
    int L = f.generators;
    for (auto& [n, b] : even_bindings) L = std::max(L, b.value.generators);
    for (auto& [n, b] : odd_bindings) L = std::max(L, b.generators);

    // Variables without a binding stay untouched.
    auto resolved_even = [&](int v) -> EvenBinding {
        auto it = even_bindings.find(fspec->even[v].name);
        if (it != even_bindings.end()) return it->second;
        int idx = out_spec->even_index(fspec->even[v].name);
        if (idx < 0) throw std::invalid_argument("substitute: unbound even variable");
        return EvenBinding{SuperSeries::even_power(out_spec, L, idx, 1), std::nullopt};
    };
    auto resolved_odd = [&](int v) -> SuperSeries {
        auto it = odd_bindings.find(fspec->odd[v]);
        if (it != odd_bindings.end()) return it->second;
        int idx = out_spec->odd_index(fspec->odd[v]);
        if (idx < 0) throw std::invalid_argument("substitute: unbound odd variable");
        return SuperSeries::odd_var(out_spec, L, idx);
    };

    for (auto& [n, b] : odd_bindings)
        if (!b.is_zero() && b.parity() != 1)
            throw std::invalid_argument("substitute: odd binding must be odd");

    SuperSeries out = SuperSeries::zero(out_spec, L);
    std::map<std::pair<int, int>, SuperSeries> pow_cache;
    auto even_pow = [&](int v, int e) -> const SuperSeries& {
        auto key = std::make_pair(v, e);
        auto it = pow_cache.find(key);
        if (it != pow_cache.end()) return it->second;
        EvenBinding b = resolved_even(v);
        auto lead = b.lead;
        if (!lead && e < 0) {
            if (trunc.enabled) lead = b.value.lead_key(trunc.even_var, trunc.dir);
            if (!lead) throw std::invalid_argument("substitute: negative power needs a lead hint");
        }
        return pow_cache.emplace(key, b.value.pow_int(e, lead, trunc)).first->second;
    };

    for (auto& [key, g] : f.terms) {
        SuperSeries term = SuperSeries::constant(out_spec, L, g);
        for (int v = 0; v < out.n_even(); ++v)
            term.cert[v] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
        for (int v = 0; v < f.n_even(); ++v)
            if (key.e[v] != 0) term = term.mul(even_pow(v, key.e[v]), trunc);
        for (int v = 0; v < (int)fspec->odd.size(); ++v)
            if (key.mask & (1u << v)) term = term.mul(resolved_odd(v), trunc);
        out += term;
    }
    return out;
}

SuperSeries SuperSeries::truncated(const WeightTrunc& trunc) const {
    if (!trunc.enabled) return *this;
    SuperSeries r(spec, generators);
    for (int v = 0; v < n_even(); ++v) r.cert[v] = cert[v];
    for (auto& [key, g] : terms) {
        int w2 = trunc.dir * 2 * key.e[trunc.even_var] + __builtin_popcount(key.mask);
        if (w2 <= trunc.max2) r.add_term(key, g);
    }
    return r;
}

std::optional<int> SuperSeries::min_weight2(int even_var, int dir) const {
    std::optional<int> best;
    for (auto& [key, g] : terms) {
        int w2 = dir * 2 * key.e[even_var] + __builtin_popcount(key.mask);
        if (!best || w2 < *best) best = w2;
    }
    return best;
}

std::optional<TermKey> SuperSeries::lead_key(int even_var, int dir) const {
    std::optional<TermKey> best;
    std::optional<int> bw;
    bool tied = false;
    for (auto& [key, g] : terms) {
        int w2 = dir * 2 * key.e[even_var] + __builtin_popcount(key.mask);
        if (!bw || w2 < *bw) {
            bw = w2;
            best = key;
            tied = false;
        } else if (w2 == *bw) {
            tied = true;
        }
    }
    if (tied) return std::nullopt; // ambiguous minimum
    return best;
}

bool SuperSeries::key_certified(const TermKey& key) const {
    for (int v = 0; v < n_even(); ++v)
        if (key.e[v] < cert[v].cert_lo || key.e[v] > cert[v].cert_hi) return false;
    return true;
}

void SuperSeries::restrict_cert(int var, long lo, long hi) {
    cert[var].cert_lo = std::max(cert[var].cert_lo, lo);
    cert[var].cert_hi = std::min(cert[var].cert_hi, hi);
}

void SuperSeries::set_support(int var, long lo, long hi) {
    cert[var].supp_lo = lo;
    cert[var].supp_hi = hi;
}

std::string SuperSeries::str() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [key, g] : terms) {
        if (!first) os << " + ";
        first = false;
        os << "[" << g.str() << "]";
        for (int v = 0; v < n_even(); ++v)
            if (key.e[v] != 0) os << " " << spec->even[v].name << "^" << key.e[v];
        for (int v = 0; v < (int)spec->odd.size(); ++v)
            if (key.mask & (1u << v)) os << " " << spec->odd[v];
    }
    return os.str();
}

CompareResult compare_certified(const SuperSeries& a, const SuperSeries& b,
                                std::size_t max_mismatches) {
    CompareResult res;
    int n = a.n_even();
    res.region.resize(n);
    for (int v = 0; v < n; ++v) {
        res.region[v][0] = std::max(a.cert[v].cert_lo, b.cert[v].cert_lo);
        res.region[v][1] = std::min(a.cert[v].cert_hi, b.cert[v].cert_hi);
    }
    auto in_region = [&](const TermKey& k) {
        for (int v = 0; v < n; ++v)
            if (k.e[v] < res.region[v][0] || k.e[v] > res.region[v][1]) return false;
        return true;
    };
    auto check = [&](const TermKey& k) {
        if (!in_region(k)) return;
        GrassmannElement lhs = a.coeff(k), rhs = b.coeff(k);
        if (lhs == rhs) return;
        res.pass = false;
        if (res.mismatches.size() < max_mismatches)
            res.mismatches.push_back(SeriesMismatch{k, lhs, rhs});
    };
    for (auto& [k, g] : a.terms) check(k);
    for (auto& [k, g] : b.terms)
        if (a.terms.find(k) == a.terms.end()) check(k);
    return res;
}

} // namespace n2alg
