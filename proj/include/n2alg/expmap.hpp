#pragma once

#include "n2alg/rng.hpp"
#include "n2alg/superderiv.hpp"

#include <optional>
#include <string>
#include <vector>

namespace n2alg {

enum class EFlavor { e2_homo, e2_nonhomo, e1 };
enum class Locus { zero, infinity };

/// Element of the parameter space: grading pair (a0_1, a0_2) modulo
/// <(-1,-1)>, plus the even sequences A1, A2 and odd sequences M1, M2
/// (index j holds the coefficient of level n = j+1).
struct InfinitesimalData {
    int generators = 4;
    int weight = 6;
    GrassmannElement a0_1, a0_2;
    std::vector<GrassmannElement> A1, A2, M1, M2;

    static InfinitesimalData identity(int L, int weight);
    /// Fix the <(-1,-1)> representative: body(a0_1) first nonzero component
    /// positive.
    void canonicalize();
    bool operator==(const InfinitesimalData& o) const;
    bool operator!=(const InfinitesimalData& o) const { return !(*this == o); }
    std::string str() const;
};

/// Formal coordinate map: an even component plus one or two odd components
/// in the flavor's variables, complete up to the stated weight.
struct CoordMap {
    EFlavor flavor;
    Locus locus;
    int weight = 6;
    CoordTuple comps;
};

RepFamily flavor_family(EFlavor f);

/// Apply exp(T) to a series with weight truncation; T must raise the weight
/// filtration of the locus.
SuperSeries exp_apply(const SuperDerivation& T, const SuperSeries& f, Locus locus, int weight);

/// The grading operator a^{s*2L0} b^{-J0} as a coordinate substitution on a
/// series (s = -1 at zero, +1 at infinity, matching the exponential forms).
SuperSeries grading_apply(EFlavor flavor, Locus locus, const GrassmannElement& a,
                          const GrassmannElement& b, const SuperSeries& f);

/// The weight-raising derivation T of the exponential form for this flavor
/// and locus (including the locus's index reflection and i-twists).
SuperDerivation exp_generator(EFlavor flavor, Locus locus, const InfinitesimalData& g,
                              const RepContext& ctx);

/// The exponential coordinate map of the data.
CoordMap hat_e(const InfinitesimalData& g, EFlavor flavor, Locus locus);

/// Triangular extraction: the unique data with hat_e(data) = f to the map's
/// weight.  Throws std::domain_error when f is not in the admissible shape.
InfinitesimalData extract(const CoordMap& f, EFlavor flavor);

/// Shape membership for one-variable superanalytic maps (restricted class).
bool in_restricted_shape(const CoordMap& f);

/// Flavor-matched superconformality of a weight-truncated map (residuals
/// vanish up to the map's weight).
bool map_superconformal(const CoordMap& m);

/// Composition of coordinate maps: outer after inner (both same flavor).
CoordMap compose_maps(const CoordMap& outer, const CoordMap& inner);

/// Inversion base point I(x, phi..) = (1/x, i phi/x, ...), and its inverse.
CoordMap inversion_map(EFlavor flavor, int L, int weight, bool inverse);

enum class GroupLaw { N2, N1 };

/// g o_0 h = extract(hatE(h) after hatE(g)); N2 uses the nonhomogeneous
/// two-variable flavor, N1 the one-variable flavor.
InfinitesimalData compose_at_zero(const InfinitesimalData& g, const InfinitesimalData& h,
                                  GroupLaw law);
/// g o_inf h = extract_inf(hatE_inf(h) after I^{-1} after hatE_inf(g)).
InfinitesimalData compose_at_infinity(const InfinitesimalData& g, const InfinitesimalData& h,
                                      GroupLaw law);

/// Inverse element of the group law at the given locus.
InfinitesimalData group_inverse(const InfinitesimalData& g, GroupLaw law, Locus locus);

/// Random data with soul-bearing coefficients, all levels up to `weight`.
InfinitesimalData random_infinitesimal(Rng& rng, int L, int weight);

/// E2(nonhomo) and E1 compositions agree: the identity map on parameters
/// intertwines the two group laws.
VerifyReport check_isomorphism(const InfinitesimalData& g, const InfinitesimalData& h, Locus locus);

/// Prop composition-switch: f1 after hatE(g) equals exp(T) grading applied
/// to f1, exactly up to the truncation weight (one-variable flavor; both
/// loci, the infinity side using the conjugated generator).
VerifyReport composition_switch_check(const SuperSeries& f1, const InfinitesimalData& g,
                                      Locus locus);

} // namespace n2alg
