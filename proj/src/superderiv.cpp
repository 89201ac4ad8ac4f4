#include "n2alg/superderiv.hpp"

#include <sstream>
#include <stdexcept>

namespace n2alg {

void SuperDerivation::add(const SuperSeries& coeff, const std::string& var) {
    if (coeff.is_zero()) return;
    if (!spec) {
        spec = coeff.spec;
        generators = coeff.generators;
    }
    generators = std::max(generators, coeff.generators);
    parts.emplace_back(coeff, var);
}

bool SuperDerivation::is_zero() const {
    for (auto& [c, v] : parts)
        if (!c.is_zero()) return false;
    return true;
}

SuperSeries SuperDerivation::apply(const SuperSeries& f, const WeightTrunc& trunc) const {
    SuperSeries out = SuperSeries::zero(f.spec, std::max(generators, f.generators));
    for (auto& [c, v] : parts) out += c.mul(f.derive(v), trunc);
    return out;
}

int SuperDerivation::parity() const {
    int p = -1;
    for (auto& [c, v] : parts) {
        if (c.is_zero()) continue;
        int cp = c.parity();
        if (cp < 0) return -1;
        int vp = spec->odd_index(v) >= 0 ? 1 : 0;
        int q = (cp + vp) & 1;
        if (p == -1) p = q;
        else if (p != q) return -1;
    }
    return p == -1 ? 0 : p;
}

SuperDerivation SuperDerivation::operator+(const SuperDerivation& o) const {
    SuperDerivation r = *this;
    if (!r.spec) {
        r.spec = o.spec;
        r.generators = o.generators;
    }
    for (auto& [c, v] : o.parts) r.add(c, v);
    return r;
}

SuperDerivation SuperDerivation::operator-() const {
    SuperDerivation r(spec, generators);
    for (auto& [c, v] : parts) r.add(-c, v);
    return r;
}

SuperDerivation SuperDerivation::scale(const GrassmannElement& g) const {
    SuperDerivation r(spec, std::max(generators, g.generators));
    for (auto& [c, v] : parts) r.add(c.scale(g), v);
    return r;
}

SuperDerivation SuperDerivation::scale(const Scalar& s) const {
    SuperDerivation r(spec, generators);
    for (auto& [c, v] : parts) r.add(c.scale(s), v);
    return r;
}

SuperDerivation SuperDerivation::canonical() const {
    SuperDerivation r(spec, generators);
    if (!spec) return r;
    int L = generators;
    for (std::size_t v = 0; v < spec->even.size(); ++v) {
        SuperSeries coord = SuperSeries::even_power(spec, L, (int)v, 1);
        SuperSeries c = apply(coord);
        r.add(c, spec->even[v].name);
    }
    for (std::size_t v = 0; v < spec->odd.size(); ++v) {
        SuperSeries coord = SuperSeries::odd_var(spec, L, (int)v);
        SuperSeries c = apply(coord);
        r.add(c, spec->odd[v]);
    }
    return r;
}

SuperDerivation sd_commutator(const SuperDerivation& S, const SuperDerivation& T) {
    if (S.spec != T.spec && (S.spec && T.spec && (S.spec->odd != T.spec->odd)))
        throw std::invalid_argument("sd_commutator: spec mismatch");
    int ps = S.parity(), pt = T.parity();
    if (ps < 0 || pt < 0) throw std::invalid_argument("sd_commutator: non-homogeneous derivation");
    const SpecPtr& spec = S.spec ? S.spec : T.spec;
    int L = std::max(S.generators, T.generators);
    SuperDerivation r(spec, L);
    auto bracket_on = [&](const SuperSeries& coord, const std::string& name) {
        SuperSeries c = S.apply(T.apply(coord));
        SuperSeries d = T.apply(S.apply(coord));
        r.add((ps & pt) ? c + d : c - d, name);
    };
    for (std::size_t v = 0; v < spec->even.size(); ++v)
        bracket_on(SuperSeries::even_power(spec, L, (int)v, 1), spec->even[v].name);
    for (std::size_t v = 0; v < spec->odd.size(); ++v)
        bracket_on(SuperSeries::odd_var(spec, L, (int)v), spec->odd[v]);
    return r;
}

bool sd_equal_on_probes(const SuperDerivation& S, const SuperDerivation& T, int probe_range) {
    const SpecPtr& spec = S.spec ? S.spec : T.spec;
    if (!spec) return true;
    int L = std::max(S.generators, T.generators);
    for (int k = -probe_range; k <= probe_range; ++k)
        for (std::uint32_t mask = 0; mask < (1u << spec->odd.size()); ++mask) {
            TermKey key;
            key.e[0] = k;
            key.mask = (std::uint8_t)mask;
            SuperSeries probe = SuperSeries::monomial(spec, L, key, GrassmannElement::one(L));
            if (S.apply(probe) != T.apply(probe)) return false;
        }
    return true;
}

BasisTag rep_tag(RepFamily family) {
    switch (family) {
        case RepFamily::homo2: return BasisTag::homogeneous;
        case RepFamily::nonhomo2:
        case RepFamily::n2_one_var: return BasisTag::nonhomogeneous;
        case RepFamily::n1:
        case RepFamily::n1_ds: return BasisTag::n1;
    }
    return BasisTag::homogeneous;
}

RepContext make_rep_context(RepFamily family, int L, int window, const GrassmannElement& s) {
    RepContext ctx;
    ctx.family = family;
    ctx.generators = L;
    ctx.s = s;
    switch (family) {
        case RepFamily::homo2:
            ctx.spec = make_spec({{"x", -window, window}}, {"phi+", "phi-"});
            break;
        case RepFamily::nonhomo2:
            ctx.spec = make_spec({{"x", -window, window}}, {"phi1", "phi2"});
            break;
        case RepFamily::n1:
        case RepFamily::n1_ds:
        case RepFamily::n2_one_var:
            ctx.spec = make_spec({{"x", -window, window}}, {"phi"});
            break;
    }
    return ctx;
}

namespace {

SuperSeries xpow(const RepContext& ctx, int k) {
    return SuperSeries::even_power(ctx.spec, ctx.generators, 0, k);
}

SuperSeries odd(const RepContext& ctx, int j) {
    return SuperSeries::odd_var(ctx.spec, ctx.generators, j);
}

} // namespace

SuperDerivation make_rep(const RepContext& ctx, Kind kind, int n) {
    SuperDerivation D(ctx.spec, ctx.generators);
    Scalar half = Scalar(make_rational(1, 2));
    switch (ctx.family) {
        case RepFamily::homo2: {
            if (kind == Kind::L) {
                D.add(-xpow(ctx, n + 1), "x");
                auto c = xpow(ctx, n).scale(Scalar(Rational(n + 1)) * half);
                D.add(-(c * odd(ctx, 0)), "phi+");
                D.add(-(c * odd(ctx, 1)), "phi-");
                return D;
            }
            if (kind == Kind::J) {
                D.add(-(xpow(ctx, n) * odd(ctx, 0)), "phi+");
                D.add(xpow(ctx, n) * odd(ctx, 1), "phi-");
                return D;
            }
            if (kind == Kind::Gp || kind == Kind::Gm) {
                bool plus = kind == Kind::Gp;
                const char* same = plus ? "phi+" : "phi-";
                int other = plus ? 1 : 0;
                D.add(-xpow(ctx, n), same);
                D.add(xpow(ctx, n) * odd(ctx, other), "x");
                auto c = xpow(ctx, n - 1).scale(Scalar(Rational(n))) * odd(ctx, 0) * odd(ctx, 1);
                D.add(plus ? -c : c, same);
                return D;
            }
            break;
        }
        case RepFamily::nonhomo2: {
            if (kind == Kind::L) {
                D.add(-xpow(ctx, n + 1), "x");
                auto c = xpow(ctx, n).scale(Scalar(Rational(n + 1)) * half);
                D.add(-(c * odd(ctx, 0)), "phi1");
                D.add(-(c * odd(ctx, 1)), "phi2");
                return D;
            }
            if (kind == Kind::J) {
                D.add(xpow(ctx, n).scale(Scalar::i()) * odd(ctx, 0), "phi2");
                D.add(-(xpow(ctx, n).scale(Scalar::i()) * odd(ctx, 1)), "phi1");
                return D;
            }
            if (kind == Kind::G1 || kind == Kind::G2) {
                bool one = kind == Kind::G1;
                const char* same = one ? "phi1" : "phi2";
                const char* other = one ? "phi2" : "phi1";
                int self = one ? 0 : 1;
                D.add(-xpow(ctx, n), same);
                D.add(xpow(ctx, n) * odd(ctx, self), "x");
                auto c = xpow(ctx, n - 1).scale(Scalar(Rational(n))) * odd(ctx, 0) * odd(ctx, 1);
                D.add(one ? c : -c, other);
                return D;
            }
            break;
        }
        case RepFamily::n1: {
            if (kind == Kind::L) {
                D.add(-xpow(ctx, n + 1), "x");
                D.add(-(xpow(ctx, n).scale(Scalar(Rational(n + 1)) * half) * odd(ctx, 0)), "phi");
                return D;
            }
            if (kind == Kind::Gn1) {
                D.add(-xpow(ctx, n), "phi");
                D.add(xpow(ctx, n) * odd(ctx, 0), "x");
                return D;
            }
            break;
        }
        case RepFamily::n1_ds: {
            if (kind == Kind::L) {
                D.add(-xpow(ctx, n + 1), "x");
                D.add(-(xpow(ctx, n).scale(Scalar(Rational(n + 1)) * half) * odd(ctx, 0)), "phi");
                return D;
            }
            if (kind == Kind::Gn1) {
                D.add(-xpow(ctx, n).scale(ctx.s.inverse()), "phi");
                D.add((xpow(ctx, n) * odd(ctx, 0)).scale(ctx.s), "x");
                return D;
            }
            break;
        }
        case RepFamily::n2_one_var: {
            if (kind == Kind::L) {
                D.add(-xpow(ctx, n + 1), "x");
                D.add(-(xpow(ctx, n).scale(Scalar(Rational(n + 1)) * half) * odd(ctx, 0)), "phi");
                return D;
            }
            if (kind == Kind::J) {
                D.add(xpow(ctx, n) * odd(ctx, 0), "phi");
                return D;
            }
            if (kind == Kind::G1 || kind == Kind::G2) {
                // (-i)^{j+1} x^n (d/dphi + (-1)^j phi d/dx)
                bool one = kind == Kind::G1;
                Scalar pref = one ? -Scalar::one() : Scalar::i();
                D.add(xpow(ctx, n).scale(pref), "phi");
                D.add((xpow(ctx, n) * odd(ctx, 0)).scale(one ? -pref : pref), "x");
                return D;
            }
            break;
        }
    }
    if (kind == Kind::D || kind == Kind::Id) return D; // central: represented by zero
    throw std::invalid_argument("make_rep: kind not in family");
}

SuperDerivation represent(const RepContext& ctx, const NsElement& e) {
    SuperDerivation D(ctx.spec, std::max(ctx.generators, e.generators));
    for (auto& [key, c] : e.terms) {
        if (key.kind == Kind::D || key.kind == Kind::Id) continue;
        D = D + make_rep(ctx, key.kind, key.n).scale(c);
    }
    return D;
}

SuperDerivation d_plus(const RepContext& ctx) {
    SuperDerivation D(ctx.spec, ctx.generators);
    D.add(SuperSeries::constant(ctx.spec, ctx.generators, GrassmannElement::one(ctx.generators)),
          "phi+");
    D.add(odd(ctx, 1), "x");
    return D;
}

SuperDerivation d_minus(const RepContext& ctx) {
    SuperDerivation D(ctx.spec, ctx.generators);
    D.add(SuperSeries::constant(ctx.spec, ctx.generators, GrassmannElement::one(ctx.generators)),
          "phi-");
    D.add(odd(ctx, 0), "x");
    return D;
}

SuperDerivation d_j(const RepContext& ctx, int j) {
    SuperDerivation D(ctx.spec, ctx.generators);
    const char* name = j == 1 ? "phi1" : "phi2";
    D.add(SuperSeries::constant(ctx.spec, ctx.generators, GrassmannElement::one(ctx.generators)),
          name);
    D.add(odd(ctx, j - 1), "x");
    return D;
}

SuperDerivation d_one(const RepContext& ctx) {
    SuperDerivation D(ctx.spec, ctx.generators);
    D.add(SuperSeries::constant(ctx.spec, ctx.generators, GrassmannElement::one(ctx.generators)),
          "phi");
    D.add(odd(ctx, 0), "x");
    return D;
}

SuperDerivation d_deformed(const RepContext& ctx, const GrassmannElement& s,
                           const GrassmannElement& sigma) {
    SuperDerivation D(ctx.spec, std::max(ctx.generators, s.generators));
    int L = D.generators;
    D.add(SuperSeries::constant(ctx.spec, L, s.inverse()), "phi");
    SuperSeries drift = SuperSeries::odd_var(ctx.spec, L, 0).scale(s);
    if (!sigma.is_zero()) drift += SuperSeries::constant(ctx.spec, L, sigma);
    D.add(drift, "x");
    return D;
}

namespace {

std::vector<Kind> family_kinds(RepFamily f) {
    switch (f) {
        case RepFamily::homo2: return {Kind::L, Kind::J, Kind::Gp, Kind::Gm};
        case RepFamily::nonhomo2:
        case RepFamily::n2_one_var: return {Kind::L, Kind::J, Kind::G1, Kind::G2};
        case RepFamily::n1:
        case RepFamily::n1_ds: return {Kind::L, Kind::Gn1};
    }
    return {};
}

} // namespace

VerifyReport verify_rep(const RepContext& ctx, int range, ExecMode mode) {
    VerifyReport rep;
    auto kinds = family_kinds(ctx.family);
    std::vector<BasisKey> keys;
    for (Kind k : kinds)
        for (int n = -range; n <= range; ++n) keys.push_back({k, n});

    std::vector<VerifyReport> parts(keys.size());
    for_each_index(keys.size(), mode, [&](std::size_t i) {
        const BasisKey& a = keys[i];
        SuperDerivation ra = make_rep(ctx, a.kind, a.n);
        for (auto& b : keys) {
            SuperDerivation rb = make_rep(ctx, b.kind, b.n);
            SuperDerivation lhs = sd_commutator(ra, rb);
            NsElement br = bracket_basis(ctx.generators, a, b); // d drops in represent()
            SuperDerivation rhs = represent(ctx, br);
            parts[i].checks++;
            if (!sd_equal_on_probes(lhs, rhs, 3))
                parts[i].fail("[" + basis_key_str(a) + ", " + basis_key_str(b) +
                              "] does not match the represented bracket");
        }
    });
    for (auto& p : parts) {
        rep.checks += p.checks;
        if (!p.pass) {
            rep.pass = false;
            for (auto& f : p.failures) rep.fail(f);
        }
    }
    return rep;
}

VerifyReport verify_deformed_square(const RepContext& ctx, const GrassmannElement& s,
                                    const GrassmannElement& sigma) {
    VerifyReport rep;
    SuperDerivation D = d_deformed(ctx, s, sigma);
    SuperDerivation lhs = sd_commutator(D, D); // = 2 D^2 for odd D
    SuperDerivation ddx(ctx.spec, D.generators);
    ddx.add(SuperSeries::constant(ctx.spec, D.generators,
                                  GrassmannElement::scalar(D.generators, Scalar(2))),
            "x");
    rep.checks++;
    if (!sd_equal_on_probes(lhs, ddx, 4)) rep.fail("D_(s,sigma)^2 != d/dx");
    return rep;
}

VerifyReport verify_dj_brackets(const RepContext& ctx) {
    VerifyReport rep;
    for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k) {
            SuperDerivation lhs = sd_commutator(d_j(ctx, j), d_j(ctx, k));
            SuperDerivation rhs(ctx.spec, ctx.generators);
            if (j == k)
                rhs.add(SuperSeries::constant(ctx.spec, ctx.generators,
                                              GrassmannElement::scalar(ctx.generators, Scalar(2))),
                        "x");
            rep.checks++;
            if (!sd_equal_on_probes(lhs, rhs, 4))
                rep.fail("[D(" + std::to_string(j) + "), D(" + std::to_string(k) + ")]");
        }
    return rep;
}

VerifyReport verify_one_var_spanning(const RepContext& ctx, int range) {
    VerifyReport rep;
    if (ctx.family != RepFamily::n2_one_var)
        throw std::invalid_argument("verify_one_var_spanning: wrong family");
    Scalar half = Scalar(make_rational(1, 2));
    for (int n = -range; n <= range; ++n) {
        SuperDerivation xdx(ctx.spec, ctx.generators);
        xdx.add(xpow(ctx, n), "x");
        SuperDerivation cand = (-make_rep(ctx, Kind::L, n - 1)) +
                               make_rep(ctx, Kind::J, n - 1).scale(Scalar(Rational(-n)) * half);
        rep.checks++;
        if (!sd_equal_on_probes(xdx, cand, 3)) rep.fail("x^n d/dx at n=" + std::to_string(n));

        SuperDerivation xpdx(ctx.spec, ctx.generators);
        xpdx.add(xpow(ctx, n) * odd(ctx, 0), "x");
        cand = (make_rep(ctx, Kind::G1, n) + make_rep(ctx, Kind::G2, n).scale(-Scalar::i()))
                   .scale(half);
        rep.checks++;
        if (!sd_equal_on_probes(xpdx, cand, 3)) rep.fail("x^n phi d/dx at n=" + std::to_string(n));

        SuperDerivation xdp(ctx.spec, ctx.generators);
        xdp.add(xpow(ctx, n), "phi");
        cand = ((-make_rep(ctx, Kind::G1, n)) + make_rep(ctx, Kind::G2, n).scale(-Scalar::i()))
                   .scale(half);
        rep.checks++;
        if (!sd_equal_on_probes(xdp, cand, 3)) rep.fail("x^n d/dphi at n=" + std::to_string(n));

        SuperDerivation xpdp(ctx.spec, ctx.generators);
        xpdp.add(xpow(ctx, n) * odd(ctx, 0), "phi");
        rep.checks++;
        if (!sd_equal_on_probes(xpdp, make_rep(ctx, Kind::J, n), 3))
            rep.fail("x^n phi d/dphi at n=" + std::to_string(n));
    }
    return rep;
}

std::vector<SuperSeries> superconformal_residuals(ScFlavor flavor, const CoordTuple& f,
                                                  const std::string& x_var,
                                                  const std::vector<std::string>& phi_vars,
                                                  const GrassmannElement& s) {
    const SpecPtr& spec = f.x.spec;
    int L = f.x.generators;
    for (auto& p : f.phi) L = std::max(L, p.generators);
    auto oddv = [&](const std::string& name) {
        int idx = spec->odd_index(name);
        if (idx < 0) throw std::invalid_argument("superconformal_residuals: unknown odd var");
        return SuperSeries::odd_var(spec, L, idx);
    };
    auto D_of = [&](const std::string& phi_name, const SuperSeries& partner) {
        return [&, phi_name, partner](const SuperSeries& u) {
            return u.derive(phi_name) + partner * u.derive(x_var);
        };
    };
    std::vector<SuperSeries> res;
    switch (flavor) {
        case ScFlavor::homo2: {
            auto Dp = D_of(phi_vars[0], oddv(phi_vars[1]));
            auto Dm = D_of(phi_vars[1], oddv(phi_vars[0]));
            res.push_back(Dm(f.phi[0]));
            res.push_back(Dp(f.phi[1]));
            res.push_back(Dp(f.x) - f.phi[1] * Dp(f.phi[0]));
            res.push_back(Dm(f.x) - f.phi[0] * Dm(f.phi[1]));
            break;
        }
        case ScFlavor::nonhomo2: {
            auto D1 = D_of(phi_vars[0], oddv(phi_vars[0]));
            auto D2 = D_of(phi_vars[1], oddv(phi_vars[1]));
            res.push_back(D1(f.phi[0]) - D2(f.phi[1]));
            res.push_back(D1(f.phi[1]) + D2(f.phi[0]));
            res.push_back(D1(f.x) - f.phi[0] * D1(f.phi[0]) - f.phi[1] * D1(f.phi[1]));
            res.push_back(D2(f.x) - f.phi[0] * D2(f.phi[0]) - f.phi[1] * D2(f.phi[1]));
            break;
        }
        case ScFlavor::n1: {
            auto D1 = D_of(phi_vars[0], oddv(phi_vars[0]));
            res.push_back(D1(f.x) - f.phi[0] * D1(f.phi[0]));
            break;
        }
        case ScFlavor::n1_ds: {
            GrassmannElement sinv = s.inverse();
            auto Ds = [&](const SuperSeries& u) {
                return u.derive(phi_vars[0]).scale(sinv) +
                       (oddv(phi_vars[0]).scale(s)) * u.derive(x_var);
            };
            SuperSeries sphi = f.phi[0].scale(s);
            res.push_back(Ds(f.x) - sphi * Ds(sphi));
            break;
        }
    }
    return res;
}

bool is_superconformal(ScFlavor flavor, const CoordTuple& f, const std::string& x_var,
                       const std::vector<std::string>& phi_vars, const GrassmannElement& s) {
    for (auto& r : superconformal_residuals(flavor, f, x_var, phi_vars, s))
        if (!r.is_zero()) return false;
    return true;
}

} // namespace n2alg
