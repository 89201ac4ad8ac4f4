#pragma once

#include "n2alg/ns_algebra.hpp"
#include "n2alg/superseries.hpp"

#include <string>
#include <vector>

namespace n2alg {

/// First-order superderivation: sum of coefficient * d/d(var).  Acts on
/// SuperSeries by the graded Leibniz rule (the coefficient multiplies from
/// the left, so all signs are handled by the series product).
class SuperDerivation {
public:
    SpecPtr spec;
    int generators = 0;
    std::vector<std::pair<SuperSeries, std::string>> parts; // (coefficient, target var)

    SuperDerivation() = default;
    SuperDerivation(SpecPtr s, int L) : spec(std::move(s)), generators(L) {}

    void add(const SuperSeries& coeff, const std::string& var);
    bool is_zero() const;

    SuperSeries apply(const SuperSeries& f, const WeightTrunc& trunc = WeightTrunc::none()) const;
    /// -1 when mixed; else parity of coefficient + target variable.
    int parity() const;

    SuperDerivation operator+(const SuperDerivation& o) const;
    SuperDerivation operator-() const;
    SuperDerivation scale(const GrassmannElement& g) const;
    SuperDerivation scale(const Scalar& s) const;
    /// Canonical form: one coefficient per variable, computed by applying
    /// the derivation to each coordinate.
    SuperDerivation canonical() const;
};

/// Graded commutator S T - (-1)^{|S||T|} T S, re-expressed in canonical form
/// through the action on coordinates.
SuperDerivation sd_commutator(const SuperDerivation& S, const SuperDerivation& T);

/// Equality as operators, checked on probe monomials x^k * (odd monomial).
bool sd_equal_on_probes(const SuperDerivation& S, const SuperDerivation& T, int probe_range = 3);

/// Representation families of the NS algebras by superderivations.
enum class RepFamily { homo2, nonhomo2, n1, n1_ds, n2_one_var };

struct RepContext {
    RepFamily family;
    SpecPtr spec;
    int generators = 0;
    GrassmannElement s; // deformation parameter for n1_ds
};

/// Variable layout for a family: (x, phi+, phi-), (x, phi1, phi2) or (x, phi).
RepContext make_rep_context(RepFamily family, int L, int window = 12,
                            const GrassmannElement& s = GrassmannElement());

/// The superderivation representing a basis element of the family's algebra.
SuperDerivation make_rep(const RepContext& ctx, Kind kind, int index);
/// Linear extension to algebra elements (d maps to zero).
SuperDerivation represent(const RepContext& ctx, const NsElement& e);

BasisTag rep_tag(RepFamily family);

/// Distinguished odd derivations: D+/D- (homo), D(1)/D(2) (nonhomo),
/// D_1 (one variable), D_(s,sigma) (deformed).
SuperDerivation d_plus(const RepContext& ctx);
SuperDerivation d_minus(const RepContext& ctx);
SuperDerivation d_j(const RepContext& ctx, int j); // nonhomo D(1), D(2)
SuperDerivation d_one(const RepContext& ctx);      // D_1 on (x, phi)
SuperDerivation d_deformed(const RepContext& ctx, const GrassmannElement& s,
                           const GrassmannElement& sigma);

/// Commutation relations of the family hold with d = 0 on probe monomials,
/// for all index pairs in [-range, range].
VerifyReport verify_rep(const RepContext& ctx, int range, ExecMode mode = ExecMode::serial);

/// D_(s,sigma)^2 = d/dx on probes.
VerifyReport verify_deformed_square(const RepContext& ctx, const GrassmannElement& s,
                                    const GrassmannElement& sigma);

/// [D(j), D(k)] = 2 delta_jk d/dx.
VerifyReport verify_dj_brackets(const RepContext& ctx);

/// The one-variable L, J, G derivations span Der: x^n d/dx, x^n phi d/dx,
/// x^n d/dphi, x^n phi d/dphi are reproduced by linear combinations.
VerifyReport verify_one_var_spanning(const RepContext& ctx, int range);

/// Superconformality flavors and their defining residuals.
enum class ScFlavor { homo2, nonhomo2, n1, n1_ds };

struct CoordTuple {
    SuperSeries x;                // even component
    std::vector<SuperSeries> phi; // odd components (1 or 2)
};

/// Evaluates the defining residuals of the flavor with the distinguished
/// derivations acting in the named source variables (which may sit inside a
/// larger spec with spectator variables).  All residuals vanishing means
/// superconformal.  n1_ds uses the deformation parameter s.
std::vector<SuperSeries> superconformal_residuals(
    ScFlavor flavor, const CoordTuple& f, const std::string& x_var,
    const std::vector<std::string>& phi_vars,
    const GrassmannElement& s = GrassmannElement());
bool is_superconformal(ScFlavor flavor, const CoordTuple& f, const std::string& x_var,
                       const std::vector<std::string>& phi_vars,
                       const GrassmannElement& s = GrassmannElement());

} // namespace n2alg
