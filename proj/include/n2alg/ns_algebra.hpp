#pragma once

#include "n2alg/grassmann.hpp"
#include "n2alg/parallel.hpp"

#include <map>
#include <string>
#include <vector>

namespace n2alg {

/// Basis kinds of the supported Lie superalgebras.
///  - homogeneous N=2 basis: L, J, Gp, Gm, d
///  - nonhomogeneous N=2 basis: L, J, G1, G2, d
///  - N=1 basis: L, Gn1, d
/// Id is a second central element used by the field layer for identity
/// coefficients; it brackets to zero with everything.
enum class Kind : std::uint8_t { L, J, Gp, Gm, G1, G2, Gn1, D, Id };

enum class BasisTag { homogeneous, nonhomogeneous, n1 };

/// Basis element.  For the G kinds the integer index k labels the mode
/// k - 1/2, so half-integer keys never appear.
struct BasisKey {
    Kind kind;
    int n = 0;

    bool operator<(const BasisKey& o) const {
        if (kind != o.kind) return kind < o.kind;
        return n < o.n;
    }
    bool operator==(const BasisKey& o) const { return kind == o.kind && n == o.n; }
};

inline bool kind_is_odd(Kind k) {
    return k == Kind::Gp || k == Kind::Gm || k == Kind::G1 || k == Kind::G2 || k == Kind::Gn1;
}
bool kind_in_tag(Kind k, BasisTag tag);
std::string basis_key_str(const BasisKey& k);

/// Finite linear combination of basis elements with Grassmann coefficients.
class NsElement {
public:
    std::map<BasisKey, GrassmannElement> terms;
    int generators = 0;

    NsElement() = default;
    explicit NsElement(int L) : generators(L) {}
    static NsElement basis(int L, Kind kind, int n, const GrassmannElement& coeff);
    static NsElement basis(int L, Kind kind, int n) {
        return basis(L, kind, n, GrassmannElement::one(L));
    }

    bool is_zero() const { return terms.empty(); }
    void add(const BasisKey& key, const GrassmannElement& coeff);
    GrassmannElement coeff(const BasisKey& key) const;

    /// -1 when mixed, else 0/1; combines basis parity with coefficient parity.
    int parity() const;

    NsElement operator-() const;
    NsElement& operator+=(const NsElement& o);
    NsElement& operator-=(const NsElement& o);
    NsElement operator+(const NsElement& o) const;
    NsElement operator-(const NsElement& o) const;
    NsElement scale(const GrassmannElement& g) const; // left multiplication
    NsElement scale(const Scalar& s) const;

    bool operator==(const NsElement& o) const { return terms == o.terms; }
    bool operator!=(const NsElement& o) const { return !(*this == o); }

    std::string str() const;
};

/// Bracket of two basis elements from the structure-constant tables.
NsElement bracket_basis(int L, const BasisKey& a, const BasisKey& b);

/// Bilinear super-bracket; Grassmann coefficients pick up Koszul signs when
/// odd basis elements move past odd coefficients.
NsElement ns_bracket(const NsElement& u, const NsElement& v);

/// Change between homogeneous and nonhomogeneous G-bases (L, J, d fixed).
NsElement basis_convert(const NsElement& u, BasisTag to);

/// The automorphism families preserving the even subalgebra.
struct Automorphism {
    enum class Type { scale, flip, flip_scale } type;
    GrassmannElement b; // scale parameter, invertible even
    BasisTag tag = BasisTag::homogeneous;
};
NsElement apply_automorphism(const NsElement& u, const Automorphism& a);

struct VerifyReport {
    bool pass = true;
    long checks = 0;
    std::vector<std::string> failures;
    void fail(const std::string& msg) {
        pass = false;
        if (failures.size() < 16) failures.push_back(msg);
    }
};

/// Exhaustive super-skew + super-Jacobi sweep over basis pairs/triples with
/// indices in [-range, range].
VerifyReport verify_lie_superalgebra(BasisTag tag, int range,
                                     ExecMode mode = ExecMode::serial);

/// basis_convert intertwines brackets on all pairs in range.
VerifyReport verify_basis_conversion(int range);

/// All three automorphism families preserve brackets; flip and scale compose
/// to flip_scale(b).
VerifyReport verify_automorphisms(BasisTag tag, int range, const GrassmannElement& b);

/// Every L_k, J_k (and d at k=0) lies in the span of G-mode brackets.
VerifyReport verify_generated_by_g(BasisTag tag, int range);

enum class SubalgebraKind { osp12_neg, osp12, osp22_neg, osp22, N1_j1, N1_j2 };
std::vector<BasisKey> subalgebra(SubalgebraKind kind);
/// Closure of span{members} under bracket (allowing all indices).
VerifyReport verify_subalgebra_closure(SubalgebraKind kind);

std::string ns_element_str(const NsElement& e);
NsElement ns_element_parse(int L, const std::string& text);

} // namespace n2alg
