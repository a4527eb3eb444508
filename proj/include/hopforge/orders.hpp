#ifndef HOPFORGE_ORDERS_HPP
#define HOPFORGE_ORDERS_HPP

// Construction of the R-order families inside K[C_p^n] and its dual, the
// triangular-matrix construction on the dual side, and the verification
// engine: membership, closure axioms, p-th power relations, parameter
// conditions, dualization, pairing unimodularity and discriminants.
//
// Membership and closure are decided through exact coordinates on the box
// monomial basis of a presentation; coordinates are unique, so a failed
// closure always carries a concrete witness.

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hopforge/groupalg.hpp"
#include "hopforge/localfield.hpp"
#include "hopforge/matrix.hpp"

namespace hopforge {

enum class Ambient { group, dual };

using AnyElement = std::variant<GroupAlgebraElement, DualElement>;

// ---------------------------------------------------------------------------
// family parameters and their conditions

struct DualFamilyParams {
    explicit DualFamilyParams(PrimeConfig cfg)
        : i1(0), i2(0), i3(0),
          mu(LocalScalar::zero(cfg)),
          alpha(LocalScalar::zero(cfg)),
          beta(LocalScalar::zero(cfg)) {}

    int i1, i2, i3;           // subset used depends on n
    LocalScalar mu, alpha, beta;
};

/// Exact evaluation of the parameter inequalities.  The main trio governs
/// both families; the two mild conditions are additionally required for the
/// rank-3 group-side family.
struct ConditionReport {
    int n = 3;
    bool nonneg_exponents = false;
    bool wp_mu = true;         // nu(wp(mu)) >= i2 - p i1          (n >= 2)
    bool wp_alpha_beta = true; // nu(wp(alpha) + wp(mu) beta) >= i3 - p i1   (n = 3)
    bool wp_beta = true;       // nu(wp(beta)) >= i3 - p i2        (n = 3)
    bool mild_mu = true;       // nu(mu) >= i3 - i1                (n = 3)
    bool mild_degrees = true;  // i2 >= i3                         (n = 3)

    // diagnostics
    Valuation wp_mu_val = Valuation::infinity();
    Valuation wp_alpha_beta_val = Valuation::infinity();
    Valuation wp_beta_val = Valuation::infinity();
    Valuation mu_val = Valuation::infinity();

    bool main() const { return nonneg_exponents && wp_mu && wp_alpha_beta && wp_beta; }
    bool all() const { return main() && mild_mu && mild_degrees; }
};

ConditionReport check_conditions(PrimeConfig cfg, int n, const DualFamilyParams& params);

// ---------------------------------------------------------------------------
// triangular-matrix construction on the dual side

class ThetaMatrix {
public:
    /// lower triangular with nonzero diagonal; m is n x n over K
    ThetaMatrix(PrimeConfig cfg, Mat m);
    PrimeConfig cfg() const { return cfg_; }
    int n() const { return static_cast<int>(m_.rows); }
    const Mat& matrix() const { return m_; }
    const LocalScalar& entry(int i, int j) const {
        return m_.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }

private:
    PrimeConfig cfg_;
    Mat m_;
};

struct KochMatrix {
    Mat a;              // Theta^{-1} Theta^{(p)}
    bool integral;      // every entry has nu >= 0
    int bad_row = -1;   // first offending entry when not integral
    int bad_col = -1;
};

KochMatrix koch_matrix(const ThetaMatrix& theta);

// ---------------------------------------------------------------------------
// order presentations

struct Witness {
    std::string check;          // independence | algebra | comultiplication | counit | antipode
    std::vector<int> monomials; // basis monomial indices entering the check
    int coordinate = -1;        // offending coordinate (flattened i*N+j for tensors)
    Valuation valuation = Valuation::infinity();
};

struct VerificationReport {
    bool algebra_closed = false;
    bool comult_closed = false;
    bool counit_integral = false;
    bool antipode_closed = false;
    bool generically_full = false;
    std::vector<Witness> witnesses;

    bool all_pass() const {
        return algebra_closed && comult_closed && counit_integral && antipode_closed &&
               generically_full;
    }
};

struct ContainsResult {
    bool contained = false;
    std::vector<LocalScalar> coords;
};

struct PairingMatrixResult {
    Mat matrix;
    bool entries_integral = false;
    Valuation det_valuation = Valuation::infinity();
    bool unimodular = false;
};

class OrderPresentation {
public:
    static OrderPresentation from_generators(Ambient ambient, PrimeConfig cfg, int n,
                                             std::vector<AnyElement> generators);
    /// explicit module basis (p^n elements), e.g. the output of dualize
    static OrderPresentation from_basis(Ambient ambient, PrimeConfig cfg, int n,
                                        std::vector<AnyElement> basis);

    Ambient ambient() const;
    PrimeConfig cfg() const;
    int rank() const;
    std::size_t dimension() const; // p^n
    const std::vector<AnyElement>& generators() const;

    /// Box monomials prod_k gen_k^{e_k} in lexicographic order of
    /// (e_1,...,e_n); throws dependence_error if they do not span.
    const std::vector<AnyElement>& monomial_basis() const;
    /// spanning check without throwing
    bool spans() const;

    struct Impl; // opaque; defined with the engine

private:
    std::shared_ptr<Impl> impl_;
    OrderPresentation(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

    friend ContainsResult contains(const OrderPresentation&, const AnyElement&);
    friend VerificationReport verify_hopf_order(const OrderPresentation&);
    friend std::vector<LocalScalar> pth_power_witness(const OrderPresentation&, int);
    friend bool orders_equal(const OrderPresentation&, const OrderPresentation&);
    friend OrderPresentation dualize(const OrderPresentation&);
    friend PairingMatrixResult pairing_matrix(const OrderPresentation&,
                                              const OrderPresentation&);
    friend Valuation discriminant_valuation(const OrderPresentation&);
};

// ---------------------------------------------------------------------------
// constructors

/// H_Theta = R[{sum_j theta_{j,i} xi_j}]; requires koch_matrix(theta)
/// integral, otherwise throws integrality_error naming the offending entry.
OrderPresentation koch_order(const ThetaMatrix& theta);

/// R[pi^{i1}(xi_1 - mu xi_2 - alpha xi_3), pi^{i2}(xi_2 - beta xi_3),
///   pi^{i3} xi_3] and its lower-rank truncations.
OrderPresentation build_dual_order(PrimeConfig cfg, int n, const DualFamilyParams& params);

/// R[(g1-1)/pi^{i1}, (g2 g1^[mu] - 1)/pi^{i2},
///   (g3 g1^[alpha] (g2 g1^[mu])^[beta] - 1)/pi^{i3}] and truncations.
OrderPresentation build_primal_order(PrimeConfig cfg, int n, const DualFamilyParams& params);

// ---------------------------------------------------------------------------
// verification engine

/// exact coordinates of x on the monomial basis; contained iff all
/// coordinates lie in R
ContainsResult contains(const OrderPresentation& pres, const AnyElement& x);

VerificationReport verify_hopf_order(const OrderPresentation& pres);

/// coordinates of gen_k^p on the monomial basis (k is 0-based)
std::vector<LocalScalar> pth_power_witness(const OrderPresentation& pres, int gen_index);

/// (alpha, beta) pairs equivalent modulo F_p(mu,-1) + (F_p + p^{i3-i1}, p^{i3-i2})
bool params_equivalent(const std::pair<LocalScalar, LocalScalar>& a,
                       const std::pair<LocalScalar, LocalScalar>& b, const LocalScalar& mu,
                       int i1, int i2, int i3);

/// rank-2 analogue: mu cosets modulo F_p + p^{i2-i1}
bool mu_equivalent(const LocalScalar& a, const LocalScalar& b, int i1, int i2);

/// mutual containment of monomial bases
bool orders_equal(const OrderPresentation& a, const OrderPresentation& b);

/// the dual module basis {f_m : <f_m, m'> = delta} as an explicit-basis
/// presentation in the opposite ambient
OrderPresentation dualize(const OrderPresentation& pres);

/// P[i][j] = <d_i, e_j> over the monomial bases; unimodular iff all entries
/// lie in R and nu(det P) = 0
PairingMatrixResult pairing_matrix(const OrderPresentation& dual_side,
                                   const OrderPresentation& group_side);

/// valuation of det of the regular-representation trace form on the monomial
/// basis; infinity when the form is degenerate (always on the group side in
/// characteristic p)
Valuation discriminant_valuation(const OrderPresentation& pres);

} // namespace hopforge

#endif
