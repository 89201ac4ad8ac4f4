#pragma once

#include "n2alg/ns_algebra.hpp"
#include "n2alg/parallel.hpp"
#include "n2alg/superseries.hpp"

#include <map>
#include <string>
#include <vector>

namespace n2alg {

/// Polynomial in the central charge symbol with Q[i, sqrt(2)] coefficients.
/// Vacuum-module coefficients live here: central terms deposit one factor of
/// the symbol per d encountered.
struct CPoly {
    std::map<int, Scalar> coeff; // degree -> scalar

    CPoly() = default;
    CPoly(const Scalar& s) { add(0, s); }
    static CPoly c_charge() {
        CPoly p;
        p.add(1, Scalar::one());
        return p;
    }
    void add(int deg, const Scalar& s);
    bool is_zero() const { return coeff.empty(); }
    CPoly operator+(const CPoly& o) const;
    CPoly operator*(const CPoly& o) const;
    CPoly operator*(const Scalar& s) const;
    CPoly operator-() const;
    bool operator==(const CPoly& o) const { return coeff == o.coeff; }
    std::string str() const;
};

/// Word of modes applied to the vacuum, kept in a canonical normal order.
using Word = std::vector<BasisKey>;

/// Vector of the vacuum module: linear combination of canonical words with
/// CPoly coefficients.  All arithmetic is derived from the bracket tables
/// plus the annihilation rules; nothing here is transcribed by hand.
class VacuumVector {
public:
    std::map<Word, CPoly> terms;

    static VacuumVector vacuum();
    static VacuumVector word(const Word& w); // normalizes

    bool is_zero() const { return terms.empty(); }
    void add(const Word& w, const CPoly& c);
    VacuumVector operator+(const VacuumVector& o) const;
    VacuumVector operator-(const VacuumVector& o) const;
    VacuumVector operator-() const;
    VacuumVector scale(const CPoly& c) const;
    VacuumVector scale(const Scalar& s) const;
    bool operator==(const VacuumVector& o) const { return terms == o.terms; }
    std::string str() const;
};

/// Left action of a mode; d acts as the central-charge symbol.
VacuumVector act(const BasisKey& mode, const VacuumVector& v);

/// Annihilation predicate on the vacuum: L(n>=-1), J(n>=0), G(mode>=-1/2).
bool annihilates_vacuum(const BasisKey& k);

/// L(0)- and J(0)-eigenvalues (doubled L(0)-weight to stay integral).
/// Throws when the vector is not an eigenvector.
int weight2_of(const VacuumVector& v);
int j_weight_of(const VacuumVector& v);

/// The field dictionary labels.
enum class FieldLabel { vac, mu, tau_plus, tau_minus, tau1, tau2, omega };
enum class FieldFlavor { homo, nonhomo, one_var };

VacuumVector label_vector(FieldLabel label, FieldFlavor flavor);
std::string field_label_name(FieldLabel label);

/// Formal field: map from (x-exponent, odd monomial) to an NsElement, with
/// the odd monomial written to the left of the operator coefficient.
/// Coefficients must be parity-homogeneous with even Grassmann parts.
class NsField {
public:
    FieldFlavor flavor = FieldFlavor::homo;
    int window = 12;
    int generators = 0;
    std::map<std::pair<int, std::uint8_t>, NsElement> coeffs;

    void add(int exp, std::uint8_t mask, const NsElement& e);
    NsElement coeff(int exp, std::uint8_t mask) const;
    bool operator==(const NsField& o) const { return coeffs == o.coeffs; }
    NsField operator+(const NsField& o) const;
    NsField operator-(const NsField& o) const;
    NsField operator-() const;
    NsField scale(const Scalar& s) const;
    NsField scale(const GrassmannElement& g) const;
    /// d/dx on the field.
    NsField derive_x() const;
    /// Multiply by x^k and by an odd monomial from the left.
    NsField shift(int dx, std::uint8_t mask) const;
    int odd_count() const { return flavor == FieldFlavor::one_var ? 1 : 2; }
};

/// Number of odd variables and their display names per flavor.
std::vector<std::string> flavor_odd_names(FieldFlavor flavor);

/// The field of a dictionary vector, built from the mu field by the
/// derivative properties (never transcribed): Y(G(-1/2)v) = D Y(v) and
/// Y(L(-1)v) = d/dx Y(v), starting from the defining expansion of Y(mu).
NsField build_field(FieldLabel label, FieldFlavor flavor, int window, int L = 0);
/// Field of a general dictionary vector (resolves canonical words).
NsField field_of(const VacuumVector& v, FieldFlavor flavor, int window, int L = 0);
/// Restriction to the pure-mode part Y(v, x).
NsField modes_only(const NsField& f);
/// Apply the flavor's odd derivation D (j = 1, 2 or +, -) to the field.
NsField apply_d(const NsField& f, int j);

/// Two-variable field in (x1, odd1..) x (x2, odd2..), used for brackets.
class NsField2 {
public:
    FieldFlavor flavor = FieldFlavor::homo;
    int generators = 0;
    std::map<std::tuple<int, int, std::uint8_t>, NsElement> coeffs; // (e1, e2, mask)
    CertWindow cert1, cert2;

    void add(int e1, int e2, std::uint8_t mask, const NsElement& e);
    NsElement coeff(int e1, int e2, std::uint8_t mask) const;
    NsField2 operator-(const NsField2& o) const;
    bool is_zero() const { return coeffs.empty(); }
};

/// Coefficient-wise graded commutator [Y(u,(x1,..)), Y(v,(x2,..))].
NsField2 field_bracket(const NsField& u, const NsField& v);

/// The commutator predicted by the singular part of the product of two mu
/// fields: delta-derivative kernels against Y(tau+-), Y(mu), dY(mu) and the
/// central term, materialized on the window.
NsField2 ope_rhs_mu(FieldFlavor flavor, int window, int L = 0);

struct FieldCheck {
    std::string id;
    bool pass = true;
    bool negative_control = false;
    long compared = 0;
    std::vector<std::string> mismatches;
    void fail(const std::string& m) {
        pass = false;
        if (mismatches.size() < 8) mismatches.push_back(m);
    }
};

/// field_bracket(Y(mu), Y(mu)) == ope_rhs_mu on the joint certified region.
FieldCheck check_mu_bracket_vs_ope(FieldFlavor flavor, int window);
/// Residue extractions of the bracket reproduce ns_bracket for m, n in
/// [-range, range], all relation families of the flavor's basis.
FieldCheck check_bracket_residues(FieldFlavor flavor, int window, int range);
/// G(-1/2)- and L(-1)-derivative properties for the dictionary labels.
FieldCheck check_derivative_property(FieldLabel label, FieldFlavor flavor, int window);
/// Bracket specializations: [L(0), Y(v)], [J(0), Y(v)], [G(+-1/2), Y(v)].
FieldCheck check_bracket_specializations(FieldLabel label, FieldFlavor flavor, int window);
/// L(0)- and J(0)-conjugation identities for the label's field.
FieldCheck check_grading_conjugation(FieldLabel label, FieldFlavor flavor, int window,
                                     const GrassmannElement& b);
/// Y(v,(x,phi..)) from the modes-only field and the D-action table.
FieldCheck check_reconstruction(FieldLabel label, FieldFlavor flavor, int window);
/// Homogeneous -> nonhomogeneous conversion matches the directly built
/// nonhomogeneous fields; round trip is the identity.
FieldCheck check_flavor_conversion(int window);
/// (x1 - x2 - phi-shift)^k [Y(mu), Y(mu)] vanishes for k >= 4; k = 1 is the
/// negative control and must NOT vanish.
FieldCheck check_weak_supercommutativity(int k, int window, bool expect_zero);
/// Mode/weight bookkeeping: ad-eigenvalues of coefficients and the classical
/// expansions of the dictionary fields.
FieldCheck check_expansions_and_grading(FieldFlavor flavor, int window);

NsField to_nonhomogeneous(const NsField& f);
/// General flavor conversion between the two two-variable flavors.
NsField convert_flavor(const NsField& f, FieldFlavor target);

std::vector<FieldCheck> run_fields_suite(int window, int range, ExecMode mode);

} // namespace n2alg
