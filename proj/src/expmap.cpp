#include "n2alg/expmap.hpp"

#include <sstream>
#include <stdexcept>

namespace n2alg {

InfinitesimalData InfinitesimalData::identity(int L, int weight) {
    InfinitesimalData g;
    g.generators = L;
    g.weight = weight;
    g.a0_1 = GrassmannElement::one(L);
    g.a0_2 = GrassmannElement::one(L);
    g.A1.assign(weight, GrassmannElement(L));
    g.A2.assign(weight, GrassmannElement(L));
    g.M1.assign(weight, GrassmannElement(L));
    g.M2.assign(weight, GrassmannElement(L));
    return g;
}

void InfinitesimalData::canonicalize() {
    if (!a0_1.body().canonical_sign()) {
        a0_1 = -a0_1;
        a0_2 = -a0_2;
    }
}

bool InfinitesimalData::operator==(const InfinitesimalData& o) const {
    auto seq_eq = [](const std::vector<GrassmannElement>& x,
                     const std::vector<GrassmannElement>& y) {
        std::size_t n = std::max(x.size(), y.size());
        for (std::size_t i = 0; i < n; ++i) {
            GrassmannElement a = i < x.size() ? x[i] : GrassmannElement();
            GrassmannElement b = i < y.size() ? y[i] : GrassmannElement();
            if (a != b) return false;
        }
        return true;
    };
    return a0_1 == o.a0_1 && a0_2 == o.a0_2 && seq_eq(A1, o.A1) && seq_eq(A2, o.A2) &&
           seq_eq(M1, o.M1) && seq_eq(M2, o.M2);
}

std::string InfinitesimalData::str() const {
    std::ostringstream os;
    os << "a0_1=" << a0_1.str() << " a0_2=" << a0_2.str();
    auto seq = [&](const char* name, const std::vector<GrassmannElement>& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero()) os << " " << name << "[" << (i + 1) << "]=" << v[i].str();
    };
    seq("A1", A1);
    seq("A2", A2);
    seq("M1", M1);
    seq("M2", M2);
    return os.str();
}

RepFamily flavor_family(EFlavor f) {
    switch (f) {
        case EFlavor::e2_homo: return RepFamily::homo2;
        case EFlavor::e2_nonhomo: return RepFamily::nonhomo2;
        case EFlavor::e1: return RepFamily::n2_one_var;
    }
    return RepFamily::homo2;
}

namespace {

int locus_dir(Locus l) { return l == Locus::zero ? +1 : -1; }

/// Series are carried two levels past the nominal weight: the level-N
/// unknowns are read off coefficients of weight N+1 at zero and N+3/2 at
/// infinity, and those must stay exact under maps and compositions.
WeightTrunc trunc_of(Locus locus, int weight) {
    return WeightTrunc::at(0, locus_dir(locus), 2 * weight + 4);
}

RepContext context_for(EFlavor flavor, int L, int weight) {
    return make_rep_context(flavor_family(flavor), L, 2 * weight + 8);
}

int n_odd(EFlavor f) { return f == EFlavor::e1 ? 1 : 2; }

} // namespace

SuperSeries exp_apply(const SuperDerivation& T, const SuperSeries& f, Locus locus, int weight) {
    WeightTrunc trunc = trunc_of(locus, weight);
    SuperSeries acc = f.truncated(trunc);
    SuperSeries power = acc;
    Rational fact(1);
    int guard = 4 * weight + 16;
    for (int k = 1; k <= guard; ++k) {
        power = T.apply(power, trunc);
        if (power.is_zero()) return acc;
        fact *= k;
        acc += power.scale(Scalar(Rational(1) / fact));
    }
    throw std::runtime_error("exp_apply: derivation does not raise the weight filtration");
}

SuperSeries grading_apply(EFlavor flavor, Locus locus, const GrassmannElement& a,
                          const GrassmannElement& b, const SuperSeries& f) {
    const SpecPtr& spec = f.spec;
    int L = std::max({f.generators, a.generators, b.generators});
    GrassmannElement ainv = a.inverse(), binv = b.inverse();
    GrassmannElement x_scale = locus == Locus::zero ? a * a : ainv * ainv;
    GrassmannElement odd_pref = locus == Locus::zero ? a : ainv;
    Scalar half(make_rational(1, 2));

    std::map<std::string, EvenBinding> eb;
    TermKey xkey;
    xkey.e[0] = 1;
    eb.emplace(spec->even[0].name,
               EvenBinding{SuperSeries::even_power(spec, L, 0, 1).scale(x_scale), xkey});
    std::map<std::string, SuperSeries> ob;
    auto sodd = [&](int j) { return SuperSeries::odd_var(spec, L, j); };
    switch (flavor) {
        case EFlavor::e2_homo:
            ob.emplace(spec->odd[0], sodd(0).scale(odd_pref * b));
            ob.emplace(spec->odd[1], sodd(1).scale(odd_pref * binv));
            break;
        case EFlavor::e2_nonhomo: {
            GrassmannElement cosh_b = (b + binv) * half;
            GrassmannElement sinh_b = (b - binv) * half;
            ob.emplace(spec->odd[0], sodd(0).scale(odd_pref * cosh_b) +
                                         sodd(1).scale(odd_pref * sinh_b * Scalar::i()));
            ob.emplace(spec->odd[1], sodd(0).scale(odd_pref * sinh_b * (-Scalar::i())) +
                                         sodd(1).scale(odd_pref * cosh_b));
            break;
        }
        case EFlavor::e1:
            ob.emplace(spec->odd[0], sodd(0).scale(odd_pref * binv));
            break;
    }
    return ss_substitute(f, eb, ob);
}

SuperDerivation exp_generator(EFlavor flavor, Locus locus, const InfinitesimalData& g,
                              const RepContext& ctx) {
    int N = g.weight;
    SuperDerivation T(ctx.spec, std::max(ctx.generators, g.generators));
    Kind k1, k2;
    switch (flavor) {
        case EFlavor::e2_homo:
            k1 = Kind::Gp;
            k2 = Kind::Gm;
            break;
        default:
            k1 = Kind::G1;
            k2 = Kind::G2;
            break;
    }
    for (int n = 1; n <= N; ++n) {
        GrassmannElement A1 = n <= (int)g.A1.size() ? g.A1[n - 1] : GrassmannElement();
        GrassmannElement A2 = n <= (int)g.A2.size() ? g.A2[n - 1] : GrassmannElement();
        GrassmannElement M1 = n <= (int)g.M1.size() ? g.M1[n - 1] : GrassmannElement();
        GrassmannElement M2 = n <= (int)g.M2.size() ? g.M2[n - 1] : GrassmannElement();
        if (locus == Locus::zero) {
            // -(A1_n L_n + A2_n J_n + M1_{n-1/2} G1_{n-1/2} + M2_{n-1/2} G2_{n-1/2})
            if (!A1.is_zero()) T = T + make_rep(ctx, Kind::L, n).scale(-A1);
            if (!A2.is_zero()) T = T + make_rep(ctx, Kind::J, n).scale(-A2);
            if (!M1.is_zero()) T = T + make_rep(ctx, k1, n).scale(-M1);
            if (!M2.is_zero()) T = T + make_rep(ctx, k2, n).scale(-M2);
        } else {
            // +(A1_n L_{-n} - A2_n J_{-n} + i M1 G1_{-n+1/2} + i M2 G2_{-n+1/2})
            if (!A1.is_zero()) T = T + make_rep(ctx, Kind::L, -n).scale(A1);
            if (!A2.is_zero()) T = T + make_rep(ctx, Kind::J, -n).scale(-A2);
            if (!M1.is_zero()) T = T + make_rep(ctx, k1, -n + 1).scale(M1 * Scalar::i());
            if (!M2.is_zero()) T = T + make_rep(ctx, k2, -n + 1).scale(M2 * Scalar::i());
        }
    }
    return T.canonical();
}

namespace {

CoordMap hat_e_capped(const InfinitesimalData& g, EFlavor flavor, Locus locus, int cap) {
    int L = g.generators;
    int N = std::min(g.weight, cap);
    RepContext ctx = context_for(flavor, L, g.weight);
    const SpecPtr& spec = ctx.spec;
    CoordTuple base;
    if (locus == Locus::zero) {
        base.x = SuperSeries::even_power(spec, L, 0, 1);
        for (int j = 0; j < n_odd(flavor); ++j)
            base.phi.push_back(SuperSeries::odd_var(spec, L, j));
    } else {
        base.x = SuperSeries::even_power(spec, L, 0, -1);
        for (int j = 0; j < n_odd(flavor); ++j)
            base.phi.push_back(
                (SuperSeries::odd_var(spec, L, j) * SuperSeries::even_power(spec, L, 0, -1))
                    .scale(Scalar::i()));
    }
    SuperDerivation T = exp_generator(flavor, locus, g, ctx);
    CoordMap out;
    out.flavor = flavor;
    out.locus = locus;
    out.weight = N;
    out.comps.x = exp_apply(T, grading_apply(flavor, locus, g.a0_1, g.a0_2, base.x), locus, N);
    for (auto& p : base.phi)
        out.comps.phi.push_back(
            exp_apply(T, grading_apply(flavor, locus, g.a0_1, g.a0_2, p), locus, N));
    out.weight = g.weight;
    return out;
}

} // namespace

CoordMap hat_e(const InfinitesimalData& g, EFlavor flavor, Locus locus) {
    return hat_e_capped(g, flavor, locus, g.weight);
}

namespace {

struct Target {
    int comp; // 0 = x, 1 = phi[0], 2 = phi[1]
    int exp;
    int mask;
};

struct LevelTargets {
    Target odd1, odd2, even1, even2;
};

LevelTargets level_targets(EFlavor flavor, Locus locus, int n) {
    bool zero = locus == Locus::zero;
    switch (flavor) {
        case EFlavor::e2_homo:
            // M+ -> phi~+[x^n], M- -> phi~-[x^n], A+ -> x~[x^(n+1)],
            // A- -> phi~+[phi+ x^n]; mirrored exponents at infinity.
            if (zero)
                return {Target{1, n, 0}, Target{2, n, 0}, Target{0, n + 1, 0}, Target{1, n, 0b01}};
            return {Target{1, -n, 0}, Target{2, -n, 0}, Target{0, -n - 1, 0},
                    Target{1, -n - 1, 0b01}};
        case EFlavor::e2_nonhomo:
            // A2 (the J coefficient) mixes phi1 into phi2: target phi~1[phi2 x^n].
            if (zero)
                return {Target{1, n, 0}, Target{2, n, 0}, Target{0, n + 1, 0}, Target{1, n, 0b10}};
            return {Target{1, -n, 0}, Target{2, -n, 0}, Target{0, -n - 1, 0},
                    Target{1, -n - 1, 0b10}};
        case EFlavor::e1:
            if (zero)
                return {Target{1, n, 0}, Target{0, n, 0b01}, Target{0, n + 1, 0},
                        Target{1, n, 0b01}};
            return {Target{1, -n, 0}, Target{0, -n - 1, 0b01}, Target{0, -n - 1, 0},
                    Target{1, -n - 1, 0b01}};
    }
    throw std::logic_error("level_targets");
}

GrassmannElement read_target(const CoordMap& m, const Target& t) {
    const SuperSeries& s = t.comp == 0 ? m.comps.x : m.comps.phi[t.comp - 1];
    TermKey key;
    key.e[0] = t.exp;
    key.mask = (std::uint8_t)t.mask;
    return s.coeff(key);
}

GrassmannElement lift(const GrassmannElement& g, int L) {
    GrassmannElement out(L);
    for (auto& [mask, s] : g.terms) out.add_term(mask, s);
    return out;
}

} // namespace

bool in_restricted_shape(const CoordMap& f) {
    if (f.flavor != EFlavor::e1) return false;
    bool zero = f.locus == Locus::zero;
    for (auto& [key, g] : f.comps.x.terms) {
        if (key.mask == 0 && !(zero ? key.e[0] >= 1 : key.e[0] <= -1)) return false;
        if (key.mask == 1 && !(zero ? key.e[0] >= 1 : key.e[0] <= -2)) return false;
        if (key.mask > 1) return false;
    }
    for (auto& [key, g] : f.comps.phi[0].terms) {
        if (key.mask == 0 && !(zero ? key.e[0] >= 1 : key.e[0] <= -1)) return false;
        if (key.mask == 1 && !(zero ? key.e[0] >= 0 : key.e[0] <= -1)) return false;
        if (key.mask > 1) return false;
    }
    return true;
}

InfinitesimalData extract(const CoordMap& f, EFlavor flavor) {
    const int N = f.weight;
    const Locus locus = f.locus;
    const int L = f.comps.x.generators;

    auto coeff_at = [&](int comp, int exp, int mask) {
        const SuperSeries& s = comp == 0 ? f.comps.x : f.comps.phi[comp - 1];
        TermKey key;
        key.e[0] = exp;
        key.mask = (std::uint8_t)mask;
        return lift(s.coeff(key), L);
    };
    bool zero = locus == Locus::zero;
    GrassmannElement u = coeff_at(0, zero ? 1 : -1, 0);
    auto a_opt = u.sqrt();
    if (!a_opt || !a_opt->is_invertible())
        throw std::domain_error("extract: leading even coefficient is not an invertible square");
    GrassmannElement a = *a_opt;
    GrassmannElement b;
    switch (flavor) {
        case EFlavor::e2_homo: {
            GrassmannElement v = coeff_at(1, zero ? 0 : -1, 0b01);
            b = zero ? a.inverse() * v : (a * Scalar::i()).inverse() * v;
            break;
        }
        case EFlavor::e2_nonhomo: {
            GrassmannElement P = coeff_at(1, zero ? 0 : -1, 0b01);
            GrassmannElement Q = coeff_at(1, zero ? 0 : -1, 0b10);
            GrassmannElement ab = P - Q * Scalar::i();
            b = zero ? a.inverse() * ab : (a * Scalar::i()).inverse() * ab;
            break;
        }
        case EFlavor::e1: {
            GrassmannElement v = coeff_at(1, zero ? 0 : -1, 0b01);
            if (!v.is_invertible())
                throw std::domain_error("extract: odd component has non-invertible leading term");
            b = zero ? a * v.inverse() : (a * Scalar::i()) * v.inverse();
            break;
        }
    }
    InfinitesimalData g = InfinitesimalData::identity(L, N);
    g.a0_1 = a;
    g.a0_2 = b;

    // Level-by-level triangular solve.  The response of a target
    // coefficient to its level unknown is exactly the single application of
    // the unknown's unit derivation to the graded base point: every cross
    // term with other slots lands strictly above the target weight.
    RepContext ctx = context_for(flavor, L, N);
    CoordTuple graded;
    {
        const SpecPtr& spec = ctx.spec;
        SuperSeries bx, bp0, bp1;
        if (zero) {
            bx = SuperSeries::even_power(spec, L, 0, 1);
            bp0 = SuperSeries::odd_var(spec, L, 0);
            if (flavor != EFlavor::e1) bp1 = SuperSeries::odd_var(spec, L, 1);
        } else {
            bx = SuperSeries::even_power(spec, L, 0, -1);
            bp0 = (SuperSeries::odd_var(spec, L, 0) * bx).scale(Scalar::i());
            if (flavor != EFlavor::e1)
                bp1 = (SuperSeries::odd_var(spec, L, 1) * bx).scale(Scalar::i());
        }
        graded.x = grading_apply(flavor, locus, a, b, bx);
        graded.phi.push_back(grading_apply(flavor, locus, a, b, bp0));
        if (flavor != EFlavor::e1) graded.phi.push_back(grading_apply(flavor, locus, a, b, bp1));
    }
    Kind k1 = flavor == EFlavor::e2_homo ? Kind::Gp : Kind::G1;
    Kind k2 = flavor == EFlavor::e2_homo ? Kind::Gm : Kind::G2;
    // unit derivations per slot, matching exp_generator's scalings
    auto unit_slot = [&](int slot, int n) {
        SuperDerivation D(ctx.spec, L);
        if (zero) {
            switch (slot) {
                case 0: return make_rep(ctx, Kind::L, n).scale(Scalar(-1));
                case 1: return make_rep(ctx, Kind::J, n).scale(Scalar(-1));
                case 2: return make_rep(ctx, k1, n).scale(Scalar(-1));
                case 3: return make_rep(ctx, k2, n).scale(Scalar(-1));
            }
        } else {
            switch (slot) {
                case 0: return make_rep(ctx, Kind::L, -n);
                case 1: return make_rep(ctx, Kind::J, -n).scale(Scalar(-1));
                case 2: return make_rep(ctx, k1, -n + 1).scale(Scalar::i());
                case 3: return make_rep(ctx, k2, -n + 1).scale(Scalar::i());
            }
        }
        return D;
    };
    auto response = [&](int slot, int n, const Target& t) {
        const SuperSeries& comp = t.comp == 0 ? graded.x : graded.phi[t.comp - 1];
        SuperSeries img = unit_slot(slot, n).apply(comp);
        TermKey key;
        key.e[0] = t.exp;
        key.mask = (std::uint8_t)t.mask;
        return img.coeff(key);
    };
    for (int n = 1; n <= N; ++n) {
        LevelTargets tg = level_targets(flavor, locus, n);
        CoordMap base = hat_e_capped(g, flavor, locus, std::min(N, n + 1));
        auto resid = [&](const Target& t) {
            return coeff_at(t.comp, t.exp, t.mask) - lift(read_target(base, t), L);
        };
        // odd block
        {
            GrassmannElement d1 = resid(tg.odd1), d2 = resid(tg.odd2);
            GrassmannElement r11 = response(2, n, tg.odd1);
            GrassmannElement r12 = response(2, n, tg.odd2);
            GrassmannElement r21 = response(3, n, tg.odd1);
            GrassmannElement r22 = response(3, n, tg.odd2);
            GrassmannElement det = r11 * r22 - r12 * r21;
            GrassmannElement di = det.inverse();
            g.M1[n - 1] += (d1 * r22 - d2 * r21) * di;
            g.M2[n - 1] += (d2 * r11 - d1 * r12) * di;
        }
        // even block: the baseline must reflect the fresh odd solution;
        // second-order (M_n, M_1) terms reach the even targets' weight
        base = hat_e_capped(g, flavor, locus, std::min(N, n + 1));
        {
            GrassmannElement d1 = resid(tg.even1), d2 = resid(tg.even2);
            GrassmannElement r11 = response(0, n, tg.even1);
            GrassmannElement r12 = response(0, n, tg.even2);
            GrassmannElement r21 = response(1, n, tg.even1);
            GrassmannElement r22 = response(1, n, tg.even2);
            GrassmannElement det = r11 * r22 - r12 * r21;
            GrassmannElement di = det.inverse();
            g.A1[n - 1] += (d1 * r22 - d2 * r21) * di;
            g.A2[n - 1] += (d2 * r11 - d1 * r12) * di;
        }
    }

    InfinitesimalData out = g;
    out.canonicalize();

    // Round trip seals the extraction: a mismatch means the input map was
    // not in the admissible shape for this flavor and locus.  Weight-N data
    // only determines coefficients of weight <= N (composites carry genuine
    // level-(N+1) content), so the seal compares there.
    CoordMap back = hat_e(out, flavor, locus);
    WeightTrunc tr = WeightTrunc::at(0, locus_dir(locus), 2 * N);
    auto same = [&](const SuperSeries& p, const SuperSeries& q) {
        return p.truncated(tr) == q.truncated(tr);
    };
    bool ok = same(back.comps.x, f.comps.x);
    for (std::size_t j = 0; j < back.comps.phi.size(); ++j)
        ok = ok && same(back.comps.phi[j], f.comps.phi[j]);
    if (!ok)
        throw std::domain_error("extract: map is not in the admissible shape for this flavor");
    return out;
}

CoordMap compose_maps(const CoordMap& outer, const CoordMap& inner) {
    if (outer.flavor != inner.flavor)
        throw std::invalid_argument("compose_maps: flavor mismatch");
    int N = std::min(outer.weight, inner.weight);
    WeightTrunc tr = trunc_of(inner.locus, N);
    const SpecPtr& ispec = inner.comps.x.spec;
    int L = inner.comps.x.generators;
    for (auto& p : inner.comps.phi) L = std::max(L, p.generators);
    L = std::max(L, outer.comps.x.generators);
    auto lead = inner.comps.x.lead_key(0, locus_dir(inner.locus));

    // Substitution monomials are shared by all components, so the powers and
    // the (exponent, odd-monomial) products are cached across them.
    std::map<int, SuperSeries> pow_cache;
    auto even_pow = [&](int e) -> const SuperSeries& {
        auto it = pow_cache.find(e);
        if (it != pow_cache.end()) return it->second;
        return pow_cache.emplace(e, inner.comps.x.pow_int(e, lead, tr)).first->second;
    };
    std::map<std::pair<int, int>, SuperSeries> combo_cache;
    auto combo = [&](int e, int mask) -> const SuperSeries& {
        auto key = std::make_pair(e, mask);
        auto it = combo_cache.find(key);
        if (it != combo_cache.end()) return it->second;
        SuperSeries v = e == 0 ? SuperSeries::constant(ispec, L, GrassmannElement::one(L))
                               : even_pow(e);
        if (e == 0)
            for (int u = 0; u < v.n_even(); ++u)
                v.cert[u] = CertWindow{-kUnbounded, kUnbounded, 0, 0};
        for (std::size_t j = 0; j < inner.comps.phi.size(); ++j)
            if (mask & (1 << j)) v = v.mul(inner.comps.phi[j], tr);
        return combo_cache.emplace(key, std::move(v)).first->second;
    };

    auto subst = [&](const SuperSeries& f) {
        SuperSeries out = SuperSeries::zero(ispec, L);
        for (auto& [key, g] : f.terms)
            out += combo(key.e[0], key.mask).scale(g).truncated(tr);
        return out;
    };

    CoordMap out;
    out.flavor = outer.flavor;
    out.locus = inner.locus;
    out.weight = N;
    out.comps.x = subst(outer.comps.x);
    for (auto& p : outer.comps.phi) out.comps.phi.push_back(subst(p));
    return out;
}

CoordMap inversion_map(EFlavor flavor, int L, int weight, bool inverse) {
    RepContext ctx = context_for(flavor, L, weight);
    const SpecPtr& spec = ctx.spec;
    CoordMap m;
    m.flavor = flavor;
    m.locus = Locus::infinity;
    m.weight = weight;
    m.comps.x = SuperSeries::even_power(spec, L, 0, -1);
    Scalar c = inverse ? -Scalar::i() : Scalar::i();
    for (int j = 0; j < n_odd(flavor); ++j)
        m.comps.phi.push_back(
            (SuperSeries::odd_var(spec, L, j) * SuperSeries::even_power(spec, L, 0, -1)).scale(c));
    return m;
}

namespace {

/// Compositional inverse of a map whose components have an invertible linear
/// part (x-coefficient of the even component, odd-odd matrix of the odd
/// components).  Picard iteration on H = Lin^{-1}(id - High(H)); the result
/// is verified exactly at the carried truncation and failure throws.
CoordMap invert_map(const CoordMap& F) {
    const SpecPtr& spec = F.comps.x.spec;
    int L = F.comps.x.generators;
    for (auto& p : F.comps.phi) L = std::max(L, p.generators);
    int N = F.weight;
    WeightTrunc tr = trunc_of(F.locus, N);
    int nphi = (int)F.comps.phi.size();

    // linear data
    TermKey xkey;
    xkey.e[0] = 1;
    GrassmannElement c = F.comps.x.coeff(xkey);
    if (!c.is_invertible()) throw std::domain_error("invert_map: even linear part not invertible");
    std::vector<std::vector<GrassmannElement>> P(nphi, std::vector<GrassmannElement>(nphi));
    for (int j = 0; j < nphi; ++j)
        for (int k = 0; k < nphi; ++k) {
            TermKey pk;
            pk.mask = (std::uint8_t)(1u << k);
            P[j][k] = lift(F.comps.phi[j].coeff(pk), L);
        }
    // invert P (1x1 or 2x2, even entries)
    std::vector<std::vector<GrassmannElement>> Pi(nphi, std::vector<GrassmannElement>(nphi));
    if (nphi == 1) {
        Pi[0][0] = P[0][0].inverse();
    } else {
        GrassmannElement det = P[0][0] * P[1][1] - P[0][1] * P[1][0];
        GrassmannElement di = det.inverse();
        Pi[0][0] = P[1][1] * di;
        Pi[1][1] = P[0][0] * di;
        Pi[0][1] = -P[0][1] * di;
        Pi[1][0] = -P[1][0] * di;
    }
    GrassmannElement cinv = c.inverse();

    // high part of F
    CoordTuple high;
    high.x = F.comps.x;
    high.x.add_term(xkey, -c);
    for (int j = 0; j < nphi; ++j) {
        SuperSeries h = F.comps.phi[j];
        for (int k = 0; k < nphi; ++k) {
            TermKey pk;
            pk.mask = (std::uint8_t)(1u << k);
            h.add_term(pk, -lift(F.comps.phi[j].coeff(pk), L));
        }
        high.phi.push_back(h);
    }

    auto lin_inv_apply = [&](const CoordTuple& W) {
        CoordTuple out;
        out.x = W.x.scale(cinv);
        for (int j = 0; j < nphi; ++j) {
            SuperSeries s = SuperSeries::zero(spec, L);
            for (int k = 0; k < nphi; ++k) s += W.phi[k].scale(Pi[j][k]);
            out.phi.push_back(s);
        }
        return out;
    };
    auto substitute_into = [&](const SuperSeries& f, const CoordTuple& H) {
        std::map<std::string, EvenBinding> eb;
        auto lead = H.x.lead_key(0, locus_dir(F.locus));
        eb.emplace(spec->even[0].name, EvenBinding{H.x, lead});
        std::map<std::string, SuperSeries> ob;
        for (int j = 0; j < nphi; ++j) ob.emplace(spec->odd[j], H.phi[j]);
        return ss_substitute(f, eb, ob, tr);
    };

    CoordTuple id;
    id.x = SuperSeries::even_power(spec, L, 0, 1);
    for (int j = 0; j < nphi; ++j) id.phi.push_back(SuperSeries::odd_var(spec, L, j));

    CoordTuple H = lin_inv_apply(id);
    for (int it = 0; it < 2 * N + 6; ++it) {
        CoordTuple W;
        W.x = id.x - substitute_into(high.x, H);
        for (int j = 0; j < nphi; ++j) W.phi.push_back(id.phi[j] - substitute_into(high.phi[j], H));
        CoordTuple Hn = lin_inv_apply(W);
        bool fixed = Hn.x.truncated(tr) == H.x.truncated(tr);
        for (int j = 0; j < nphi; ++j)
            fixed = fixed && Hn.phi[j].truncated(tr) == H.phi[j].truncated(tr);
        H = Hn;
        if (fixed) break;
    }
    // verify F o H = id at the carried truncation
    SuperSeries vx = substitute_into(F.comps.x, H);
    bool ok = vx.truncated(tr) == id.x.truncated(tr);
    for (int j = 0; j < nphi; ++j)
        ok = ok && substitute_into(F.comps.phi[j], H).truncated(tr) == id.phi[j].truncated(tr);
    if (!ok) throw std::runtime_error("invert_map: reversion did not converge");

    CoordMap out;
    out.flavor = F.flavor;
    out.locus = F.locus;
    out.weight = N;
    out.comps = H;
    return out;
}

} // namespace

InfinitesimalData compose_at_zero(const InfinitesimalData& g, const InfinitesimalData& h,
                                  GroupLaw law) {
    if (g.weight != h.weight)
        throw std::invalid_argument("compose_at_zero: weights must agree");
    EFlavor flavor = law == GroupLaw::N2 ? EFlavor::e2_nonhomo : EFlavor::e1;
    CoordMap eg = hat_e(g, flavor, Locus::zero);
    CoordMap eh = hat_e(h, flavor, Locus::zero);
    CoordMap comp = compose_maps(eh, eg); // apply hatE(g) first
    return extract(comp, flavor);
}

InfinitesimalData compose_at_infinity(const InfinitesimalData& g, const InfinitesimalData& h,
                                      GroupLaw law) {
    if (g.weight != h.weight)
        throw std::invalid_argument("compose_at_infinity: weights must agree");
    EFlavor flavor = law == GroupLaw::N2 ? EFlavor::e2_nonhomo : EFlavor::e1;
    int L = std::max(g.generators, h.generators);
    int N = g.weight;
    CoordMap eg = hat_e(g, flavor, Locus::infinity);
    CoordMap eh = hat_e(h, flavor, Locus::infinity);
    CoordMap iinv = inversion_map(flavor, L, N, true);
    CoordMap step = compose_maps(iinv, eg); // I^{-1} after hatE(g)
    CoordMap full = compose_maps(eh, step); // hatE(h) after that
    return extract(full, flavor);
}

InfinitesimalData group_inverse(const InfinitesimalData& g, GroupLaw law, Locus locus) {
    EFlavor flavor = law == GroupLaw::N2 ? EFlavor::e2_nonhomo : EFlavor::e1;
    if (locus == Locus::zero) {
        // hatE(h) o hatE(g) = id  <=>  h is the group inverse.
        CoordMap H = invert_map(hat_e(g, flavor, Locus::zero));
        return extract(H, flavor);
    }
    // hatE(h) o I^{-1} o hatE(g) = hatE(identity) = I
    CoordMap eg = hat_e(g, flavor, Locus::infinity);
    CoordMap iinv = inversion_map(flavor, g.generators, g.weight, true);
    CoordMap K = compose_maps(iinv, eg);
    CoordMap Kinv = invert_map(K);
    CoordMap I = inversion_map(flavor, g.generators, g.weight, false);
    CoordMap W = compose_maps(I, Kinv);
    return extract(W, flavor);
}

InfinitesimalData random_infinitesimal(Rng& rng, int L, int weight) {
    InfinitesimalData g = InfinitesimalData::identity(L, weight);
    g.a0_1 = rng.invertible_even(L);
    g.a0_2 = rng.invertible_even(L);
    for (int n = 1; n <= weight; ++n) {
        g.A1[n - 1] = GrassmannElement::scalar(L, rng.scalar(false)) + rng.even_soul(L);
        g.A2[n - 1] = GrassmannElement::scalar(L, rng.scalar(false)) + rng.even_soul(L);
        g.M1[n - 1] = rng.odd_element(L);
        g.M2[n - 1] = rng.odd_element(L);
    }
    g.canonicalize();
    return g;
}

bool map_superconformal(const CoordMap& m) {
    ScFlavor flavor = ScFlavor::n1;
    std::vector<std::string> phis;
    switch (m.flavor) {
        case EFlavor::e2_homo:
            flavor = ScFlavor::homo2;
            phis = {"phi+", "phi-"};
            break;
        case EFlavor::e2_nonhomo:
            flavor = ScFlavor::nonhomo2;
            phis = {"phi1", "phi2"};
            break;
        case EFlavor::e1:
            flavor = ScFlavor::n1;
            phis = {"phi"};
            break;
    }
    // The components are only complete up to the carried weight, so the
    // residuals can be asserted zero only below it.
    WeightTrunc tr = WeightTrunc::at(0, locus_dir(m.locus), 2 * m.weight);
    for (auto& r : superconformal_residuals(flavor, m.comps, "x", phis))
        if (!r.truncated(tr).is_zero()) return false;
    return true;
}

VerifyReport check_isomorphism(const InfinitesimalData& g, const InfinitesimalData& h,
                               Locus locus) {
    VerifyReport rep;
    InfinitesimalData n2 = locus == Locus::zero ? compose_at_zero(g, h, GroupLaw::N2)
                                                : compose_at_infinity(g, h, GroupLaw::N2);
    InfinitesimalData n1 = locus == Locus::zero ? compose_at_zero(g, h, GroupLaw::N1)
                                                : compose_at_infinity(g, h, GroupLaw::N1);
    rep.checks++;
    if (n2 != n1) rep.fail("N2 and N1 compositions disagree:\n  " + n2.str() + "\n  " + n1.str());
    return rep;
}

VerifyReport composition_switch_check(const SuperSeries& f1, const InfinitesimalData& g,
                                      Locus locus) {
    VerifyReport rep;
    EFlavor flavor = EFlavor::e1;
    int N = g.weight;
    CoordMap f2 = hat_e(g, flavor, locus);
    WeightTrunc tr = trunc_of(locus, N);

    std::map<std::string, EvenBinding> eb;
    auto lead = f2.comps.x.lead_key(0, locus_dir(locus));
    eb.emplace(f1.spec->even[0].name, EvenBinding{f2.comps.x, lead});
    std::map<std::string, SuperSeries> ob;
    ob.emplace(f1.spec->odd[0], f2.comps.phi[0]);
    SuperSeries lhs = ss_substitute(f1, eb, ob, tr);

    RepContext ctx = context_for(flavor, std::max(g.generators, f1.generators), N);
    SuperDerivation T = exp_generator(flavor, locus, g, ctx);
    SuperSeries rhs;
    if (locus == Locus::zero) {
        // f1 o hatE(g) = exp(T) grading . f1
        rhs = exp_apply(T, grading_apply(flavor, locus, g.a0_1, g.a0_2, f1), locus, N);
    } else {
        // hatE_inf(g) = [exp(T) grading] . I, so f1 o hatE_inf(g) equals the
        // operators applied to (f1 o I).
        CoordMap I = inversion_map(flavor, f1.generators, N, false);
        std::map<std::string, EvenBinding> ebi;
        TermKey ik;
        ik.e[0] = -1;
        ebi.emplace(f1.spec->even[0].name, EvenBinding{I.comps.x, ik});
        std::map<std::string, SuperSeries> obi;
        obi.emplace(f1.spec->odd[0], I.comps.phi[0]);
        SuperSeries f1I = ss_substitute(f1, ebi, obi, WeightTrunc::none());
        rhs = exp_apply(T, grading_apply(flavor, locus, g.a0_1, g.a0_2, f1I), locus, N);
    }

    // Compare where both sides are complete.  Substituting the carried
    // components into x^e with e < 0 factors through the geometric series of
    // the leading monomial (weight 1), which is complete only up to
    // carry + 2(e - 1) in doubled-weight units; positive powers keep the
    // full carry.
    int carry2 = 2 * N + 4;
    int bound2 = carry2;
    for (auto& [key, c] : f1.terms)
        if (key.e[0] < 0) bound2 = std::min(bound2, carry2 + 2 * (key.e[0] - 1));
    WeightTrunc cmp = WeightTrunc::at(0, locus_dir(locus), bound2 - 1);
    rep.checks++;
    if (lhs.truncated(cmp) != rhs.truncated(cmp))
        rep.fail("composition switch mismatch");
    return rep;
}

} // namespace n2alg
