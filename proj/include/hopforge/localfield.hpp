#ifndef HOPFORGE_LOCALFIELD_HPP
#define HOPFORGE_LOCALFIELD_HPP

// Exact arithmetic in K = F_p(t) with the t-adic valuation.  Scalars are
// reduced fractions of dense F_p-coefficient polynomials; the valuation ring
// R is {nu >= 0} and the uniformizer is t itself.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hopforge/errors.hpp"

namespace hopforge {

// ---------------------------------------------------------------------------
// degree cap

/// Global bound on polynomial degrees produced by multiplication.  Operations
/// that would exceed it throw degree_cap_error with a diagnostic.
int degree_cap();
void set_degree_cap(int cap);

// ---------------------------------------------------------------------------
// PrimeConfig

class PrimeConfig {
public:
    explicit PrimeConfig(uint32_t p);

    uint32_t p() const { return p_; }
    /// p = 7 works but the dense kernels slow down noticeably.
    bool performance_warning() const { return p_ == 7; }
    /// multiplicative inverse of a (mod p), a != 0 mod p
    uint32_t inv(uint32_t a) const;

    friend bool operator==(PrimeConfig a, PrimeConfig b) { return a.p_ == b.p_; }

private:
    uint32_t p_;
};

// ---------------------------------------------------------------------------
// Valuation: Z together with +infinity (the valuation of 0), ordered above
// every integer.

class Valuation {
public:
    Valuation(long v) : v_(v), inf_(false) {}
    static Valuation infinity() { return Valuation(inf_tag{}); }

    bool is_infinity() const { return inf_; }
    long value() const;

    Valuation operator+(const Valuation& o) const;
    Valuation operator-() const;

    friend bool operator==(const Valuation& a, const Valuation& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }
    friend std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
        if (a.inf_ && b.inf_) return std::strong_ordering::equal;
        if (a.inf_) return std::strong_ordering::greater;
        if (b.inf_) return std::strong_ordering::less;
        return a.v_ <=> b.v_;
    }

private:
    struct inf_tag {};
    explicit Valuation(inf_tag) : v_(0), inf_(true) {}
    long v_;
    bool inf_;
};

std::string to_string(const Valuation& v);

// ---------------------------------------------------------------------------
// FpPoly: dense polynomial over F_p in the variable t.

class FpPoly {
public:
    explicit FpPoly(uint32_t p) : p_(p) {}
    static FpPoly constant(uint32_t p, long c);
    static FpPoly t_power(uint32_t p, unsigned k, long c = 1);

    uint32_t p() const { return p_; }
    bool is_zero() const { return c_.empty(); }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
    /// degree; -1 for the zero polynomial
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    /// order of vanishing at t = 0; -1 for the zero polynomial
    int ord() const;
    uint32_t coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0; }
    uint32_t lead() const { return c_.empty() ? 0 : c_.back(); }

    FpPoly operator-() const;
    FpPoly& operator+=(const FpPoly& o);
    FpPoly& operator-=(const FpPoly& o);
    friend FpPoly operator+(FpPoly a, const FpPoly& b) { return a += b; }
    friend FpPoly operator-(FpPoly a, const FpPoly& b) { return a -= b; }
    friend FpPoly operator*(const FpPoly& a, const FpPoly& b);

    /// a = q*b + r with deg r < deg b; b nonzero
    static void divrem(const FpPoly& a, const FpPoly& b, FpPoly& q, FpPoly& r);
    /// monic gcd (zero if both inputs are zero)
    static FpPoly gcd(FpPoly a, FpPoly b);

    FpPoly pow(unsigned e) const;
    /// multiply by t^k
    FpPoly shifted(unsigned k) const;
    FpPoly monic() const;
    /// entrywise p-th power: sum c_k t^k  ->  sum c_k t^{pk}
    FpPoly frobenius_map() const;
    FpPoly scaled(uint32_t c) const;

    friend bool operator==(const FpPoly& a, const FpPoly& b) = default;

private:
    void normalize();
    uint32_t p_;
    std::vector<uint8_t> c_; // c_[k] = coefficient of t^k; no trailing zeros
};

std::string to_string(const FpPoly& f);

// ---------------------------------------------------------------------------
// LocalScalar: element of K = F_p(t) in canonical form.
//
// Invariants: den != 0, den monic, gcd(num, den) = 1; zero is 0/1.  Equality
// is therefore structural.

class LocalScalar {
public:
    static LocalScalar zero(PrimeConfig cfg);
    static LocalScalar one(PrimeConfig cfg);
    static LocalScalar from_int(PrimeConfig cfg, long c);
    /// t^k for any sign of k
    static LocalScalar t_power(PrimeConfig cfg, int k);
    static LocalScalar from_fraction(FpPoly num, FpPoly den);

    const FpPoly& num() const { return num_; }
    const FpPoly& den() const { return den_; }
    uint32_t p() const { return num_.p(); }
    PrimeConfig cfg() const { return PrimeConfig(p()); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }

    Valuation valuation() const;

    LocalScalar operator-() const;
    friend LocalScalar operator+(const LocalScalar& a, const LocalScalar& b);
    friend LocalScalar operator-(const LocalScalar& a, const LocalScalar& b);
    friend LocalScalar operator*(const LocalScalar& a, const LocalScalar& b);
    friend LocalScalar operator/(const LocalScalar& a, const LocalScalar& b);
    LocalScalar& operator+=(const LocalScalar& o) { return *this = *this + o; }
    LocalScalar& operator-=(const LocalScalar& o) { return *this = *this - o; }
    LocalScalar& operator*=(const LocalScalar& o) { return *this = *this * o; }

    LocalScalar inverse() const;
    LocalScalar pow(long e) const;
    /// multiply by a constant c in F_p (cheap: no re-reduction needed)
    LocalScalar scaled(uint32_t c) const;

    friend bool operator==(const LocalScalar& a, const LocalScalar& b) = default;

private:
    LocalScalar(FpPoly num, FpPoly den) : num_(std::move(num)), den_(std::move(den)) {}
    FpPoly num_, den_;
};

/// Parse the scalar literal grammar: integer coefficients, variable t,
/// operators + - * / ^ and parentheses; whitespace ignored.
LocalScalar scalar_parse(std::string_view text, PrimeConfig cfg);

/// Canonical printing, e.g. "(1+t^2)/t^3"; round-trips through scalar_parse.
std::string to_string(const LocalScalar& x);

/// x^p
LocalScalar frobenius(const LocalScalar& x);
/// the Artin-Schreier map x -> x^p - x
LocalScalar artin_schreier(const LocalScalar& x);
/// generalized binomial coefficient y(y-1)...(y-m+1)/m!, 0 <= m <= p-1
LocalScalar gen_binom(const LocalScalar& y, int m);

} // namespace hopforge

#endif
