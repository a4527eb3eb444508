#ifndef HOPFORGE_GROUPALG_HPP
#define HOPFORGE_GROUPALG_HPP

// The Hopf algebra K[C_p^n] on the group-element basis, its dual on the
// point-mass basis, the xi-functionals, the duality pairing and the structure
// maps on both sides.  Elements are dense vectors of LocalScalar indexed by
// exponent tuples in lexicographic order (first generator most significant).

#include <memory>
#include <vector>

#include "hopforge/localfield.hpp"
#include "hopforge/matrix.hpp"

namespace hopforge {

namespace detail {
struct GroupContext;
using GroupContextPtr = std::shared_ptr<const GroupContext>;
GroupContextPtr group_context(uint32_t p, int n);
} // namespace detail

// ---------------------------------------------------------------------------
// GroupExponent: an element of C_p^n written additively.

class GroupExponent {
public:
    GroupExponent(PrimeConfig cfg, std::vector<uint8_t> digits);
    static GroupExponent zero(PrimeConfig cfg, int n);
    static GroupExponent unit(PrimeConfig cfg, int n, int i);

    int rank() const { return static_cast<int>(d_.size()); }
    uint32_t p() const { return p_; }
    uint8_t operator[](int i) const { return d_[static_cast<std::size_t>(i)]; }
    const std::vector<uint8_t>& digits() const { return d_; }
    bool is_zero() const;

    GroupExponent operator+(const GroupExponent& o) const;
    GroupExponent operator-() const;

    friend bool operator==(const GroupExponent& a, const GroupExponent& b) = default;

private:
    uint32_t p_;
    std::vector<uint8_t> d_;
};

class TensorElement;

// ---------------------------------------------------------------------------
// GroupAlgebraElement: an element of K[C_p^n].

class GroupAlgebraElement {
public:
    GroupAlgebraElement(PrimeConfig cfg, int n); // zero
    static GroupAlgebraElement one(PrimeConfig cfg, int n);
    static GroupAlgebraElement group_element(PrimeConfig cfg, int n, const GroupExponent& g);
    static GroupAlgebraElement from_raw(PrimeConfig cfg, int n, std::vector<LocalScalar> coeffs);

    PrimeConfig cfg() const;
    int rank() const;
    std::size_t dimension() const { return c_.size(); }
    const std::vector<LocalScalar>& raw() const { return c_; }
    const LocalScalar& coeff(const GroupExponent& g) const;
    void set_coeff(const GroupExponent& g, LocalScalar v);

    GroupAlgebraElement operator-() const;
    friend GroupAlgebraElement operator+(const GroupAlgebraElement&, const GroupAlgebraElement&);
    friend GroupAlgebraElement operator-(const GroupAlgebraElement&, const GroupAlgebraElement&);
    friend GroupAlgebraElement operator*(const GroupAlgebraElement&, const GroupAlgebraElement&);
    friend GroupAlgebraElement operator*(const LocalScalar& s, const GroupAlgebraElement& x);
    GroupAlgebraElement& operator+=(const GroupAlgebraElement& o) { return *this = *this + o; }
    GroupAlgebraElement& operator-=(const GroupAlgebraElement& o) { return *this = *this - o; }
    GroupAlgebraElement pow(unsigned e) const;
    bool is_zero() const;
    bool is_one() const;

    // Hopf structure: grouplike comultiplication extended linearly
    Mat delta_raw() const;
    TensorElement delta() const;
    LocalScalar counit() const;
    GroupAlgebraElement antipode() const;

    friend bool operator==(const GroupAlgebraElement&, const GroupAlgebraElement&);

private:
    friend class TensorElement;
    detail::GroupContextPtr ctx_;
    std::vector<LocalScalar> c_;
};

// ---------------------------------------------------------------------------
// DualElement: a K-valued function on C_p^n, i.e. an element of (K[C_p^n])*
// in point-mass coordinates.  The product is pointwise.

class DualElement {
public:
    DualElement(PrimeConfig cfg, int n); // zero functional
    static DualElement one(PrimeConfig cfg, int n);
    static DualElement point_mass(PrimeConfig cfg, int n, const GroupExponent& g);
    static DualElement from_raw(PrimeConfig cfg, int n, std::vector<LocalScalar> values);

    PrimeConfig cfg() const;
    int rank() const;
    std::size_t dimension() const { return c_.size(); }
    const std::vector<LocalScalar>& raw() const { return c_; }
    const LocalScalar& value(const GroupExponent& g) const;
    void set_value(const GroupExponent& g, LocalScalar v);

    DualElement operator-() const;
    friend DualElement operator+(const DualElement&, const DualElement&);
    friend DualElement operator-(const DualElement&, const DualElement&);
    friend DualElement operator*(const DualElement&, const DualElement&);
    friend DualElement operator*(const LocalScalar& s, const DualElement& x);
    DualElement& operator+=(const DualElement& o) { return *this = *this + o; }
    DualElement& operator-=(const DualElement& o) { return *this = *this - o; }
    DualElement pow(unsigned e) const;
    bool is_zero() const;
    bool is_one() const;

    // Hopf structure: Delta(f)(s,t) = f(st), eps(f) = f(e), S(f)(s) = f(s^-1)
    Mat delta_raw() const;
    TensorElement delta() const;
    LocalScalar counit() const;
    DualElement antipode() const;

    friend bool operator==(const DualElement&, const DualElement&);

private:
    friend class TensorElement;
    detail::GroupContextPtr ctx_;
    std::vector<LocalScalar> c_;
};

// ---------------------------------------------------------------------------
// TensorElement: dense element of B (x) B for either side.

class TensorElement {
public:
    enum class Side { group, dual };

    static TensorElement tensor(const GroupAlgebraElement& a, const GroupAlgebraElement& b);
    static TensorElement tensor(const DualElement& a, const DualElement& b);
    static TensorElement from_matrix(PrimeConfig cfg, int n, Side side, Mat m);

    Side side() const { return side_; }
    PrimeConfig cfg() const;
    int rank() const;
    /// entry indexed by the pair (left exponent, right exponent)
    const Mat& matrix() const { return m_; }

    friend TensorElement operator+(const TensorElement&, const TensorElement&);
    friend TensorElement operator-(const TensorElement&, const TensorElement&);
    /// componentwise algebra structure of B (x) B
    friend TensorElement operator*(const TensorElement&, const TensorElement&);

    friend bool operator==(const TensorElement&, const TensorElement&);

private:
    TensorElement(detail::GroupContextPtr ctx, Side side, Mat m);
    detail::GroupContextPtr ctx_;
    Side side_;
    Mat m_;
};

// ---------------------------------------------------------------------------
// pairings and distinguished functionals

/// duality pairing <f, x> = sum_s x(s) f(s)
LocalScalar pair(const DualElement& f, const GroupAlgebraElement& x);
/// the pairing of B* (x) B* against B (x) B, factoring componentwise
LocalScalar pair(const TensorElement& dual_side, const TensorElement& group_side);

/// xi-functional attached to a standard unit tuple: the unique functional with
/// <xi, (g_1-1)^{j_1}...(g_n-1)^{j_n}> = delta_{J, e_i} over the exponent box.
/// Computed by inverting the (g-1)-basis change matrix over F_p (cached).
DualElement xi(PrimeConfig cfg, int n, int i);

/// truncated exponential u^[e] = sum_{m<p} C(e,m)(u-1)^m; requires
/// (u-1)^p = 0, equivalently u^p = 1 (checked).
GroupAlgebraElement trunc_exp(const GroupAlgebraElement& u, const LocalScalar& e);

/// Group automorphism action g^a -> g^{Ma} (group side) and precomposition
/// with the inverse (dual side); M must be invertible mod p.
GroupAlgebraElement apply_group_automorphism(const FpMat& m, const GroupAlgebraElement& x);
DualElement apply_group_automorphism(const FpMat& m, const DualElement& f);

template <class Elem>
struct HopfMaps {
    TensorElement delta;
    LocalScalar counit;
    Elem antipode;
};

template <class Elem>
HopfMaps<Elem> hopf_maps(const Elem& x) {
    return HopfMaps<Elem>{x.delta(), x.counit(), x.antipode()};
}

// ---------------------------------------------------------------------------
// cached coordinate changes used by the order machinery (F_p matrices)

/// raw group coefficients -> coordinates on the (g-1)-monomial box
const FpMat& group_coord_map(PrimeConfig cfg, int n);
/// raw dual values -> coordinates on the xi-monomial box
const FpMat& dual_coord_map(PrimeConfig cfg, int n);

/// all exponent tuples in index order
std::vector<GroupExponent> exponent_box(PrimeConfig cfg, int n);

} // namespace hopforge

#endif
