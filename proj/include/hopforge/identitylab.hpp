#ifndef HOPFORGE_IDENTITYLAB_HPP
#define HOPFORGE_IDENTITYLAB_HPP

// Sparse multivariate polynomial arithmetic over Z and over F_p, quotients by
// (x^p, y^p, ...), symbolic truncated exponentials and the mechanical
// verification of the product identities they satisfy.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hopforge/localfield.hpp"

namespace hopforge {

using BigInt = boost::multiprecision::cpp_int;

/// graded lexicographic order on exponent vectors
struct GradedLex {
    bool operator()(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) const;
};

/// Declares a polynomial ring: ordered variable names plus the coefficient
/// domain tag (modulus 0 = integers, otherwise the prime p).
class PolyRing {
public:
    PolyRing(std::vector<std::string> vars, uint32_t modulus);

    const std::vector<std::string>& vars() const { return vars_; }
    uint32_t modulus() const { return modulus_; }
    std::size_t arity() const { return vars_.size(); }
    std::size_t var_index(const std::string& name) const;

    friend bool operator==(const PolyRing& a, const PolyRing& b) {
        return a.modulus_ == b.modulus_ && a.vars_ == b.vars_;
    }

private:
    std::vector<std::string> vars_;
    uint32_t modulus_;
};

class MultiPoly {
public:
    explicit MultiPoly(PolyRing ring) : ring_(std::move(ring)) {}
    static MultiPoly constant(const PolyRing& ring, BigInt c);
    static MultiPoly variable(const PolyRing& ring, std::size_t index);
    static MultiPoly monomial(const PolyRing& ring, std::vector<uint32_t> expo, BigInt c);

    const PolyRing& ring() const { return ring_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// coefficient of a monomial (zero if absent)
    BigInt coeff(const std::vector<uint32_t>& expo) const;
    const std::map<std::vector<uint32_t>, BigInt, GradedLex>& terms() const { return terms_; }

    MultiPoly operator-() const;
    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    MultiPoly& operator+=(const MultiPoly& o) { return *this = *this + o; }
    MultiPoly& operator-=(const MultiPoly& o) { return *this = *this - o; }
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }
    MultiPoly pow(unsigned e) const;

    /// divide every coefficient by d; throws internal_error unless exact
    MultiPoly exact_divide(const BigInt& d) const;
    /// image in F_p[vars]
    MultiPoly reduced_mod(uint32_t p) const;
    /// substitute a constant for one variable
    MultiPoly specialized(std::size_t var, const BigInt& value) const;

    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.ring_ == b.ring_ && a.terms_ == b.terms_;
    }

private:
    void add_term(const std::vector<uint32_t>& expo, BigInt c);
    void normalize_coeff(BigInt& c) const;
    PolyRing ring_;
    std::map<std::vector<uint32_t>, BigInt, GradedLex> terms_;
};

std::string to_string(const MultiPoly& f);

/// F_p[vars] / (v^p : v nilpotent).  Monomials with exponent >= p in a
/// nilpotent variable are dropped on reduction.
class QuotientPoly {
public:
    QuotientPoly(MultiPoly base, std::vector<std::size_t> nilpotent_vars);

    const MultiPoly& base() const { return base_; }
    const std::vector<std::size_t>& nilpotent_vars() const { return nilpotent_; }
    bool is_zero() const { return base_.is_zero(); }

    friend QuotientPoly operator+(const QuotientPoly& a, const QuotientPoly& b);
    friend QuotientPoly operator-(const QuotientPoly& a, const QuotientPoly& b);
    friend QuotientPoly operator*(const QuotientPoly& a, const QuotientPoly& b);
    QuotientPoly pow(unsigned e) const;
    QuotientPoly specialized(std::size_t var, const BigInt& value) const;

    friend bool operator==(const QuotientPoly& a, const QuotientPoly& b) {
        return a.nilpotent_ == b.nilpotent_ && a.base_ == b.base_;
    }

private:
    void reduce();
    void check_compatible(const QuotientPoly& o) const;
    MultiPoly base_;
    std::vector<std::size_t> nilpotent_;
};

/// the carry polynomial Q(x,y) = ((x+y+xy)^p - x^p - y^p - (xy)^p)/p,
/// computed over Z and reduced mod p; lives in F_p[x,y]
MultiPoly q_polynomial(PrimeConfig cfg);

/// truncated exponential u^[e] = sum_{m<p} C(e,m)(u-1)^m with a polynomial
/// exponent (a variable, a constant, or any polynomial of the same ring);
/// u-1 must be nilpotent: each of its monomials must contain a nilpotent
/// variable.
QuotientPoly trunc_exp(const QuotientPoly& u, const MultiPoly& e);

/// (1+x+y+xy)^[z] = (1+x)^[z] (1+y)^[z] (1 + (z^p - z) Q(x,y))
bool verify_identity_basic(PrimeConfig cfg);
/// ((1+x+y+xy)^[z])^[a] = ((1+x)^[z] (1+y)^[z])^[a] (1 + (z^p - z) a Q(x,y))
bool verify_identity_iterated(PrimeConfig cfg);
/// Q(x,y)^2 lies in (x^p, y^p)
bool verify_q_square(PrimeConfig cfg);

} // namespace hopforge

#endif
