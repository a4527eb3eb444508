#include "hopforge/identitylab.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace hopforge {

bool GradedLex::operator()(const std::vector<uint32_t>& a,
                           const std::vector<uint32_t>& b) const {
    uint64_t da = std::accumulate(a.begin(), a.end(), uint64_t{0});
    uint64_t db = std::accumulate(b.begin(), b.end(), uint64_t{0});
    if (da != db) return da < db;
    return a < b;
}

// ---------------------------------------------------------------------------
// PolyRing

PolyRing::PolyRing(std::vector<std::string> vars, uint32_t modulus)
    : vars_(std::move(vars)), modulus_(modulus) {
    if (modulus_ != 0) PrimeConfig check(modulus_); // validates the prime
}

std::size_t PolyRing::var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return i;
    throw std::invalid_argument("unknown variable '" + name + "'");
}

// ---------------------------------------------------------------------------
// MultiPoly

void MultiPoly::normalize_coeff(BigInt& c) const {
    if (ring_.modulus() == 0) return;
    c %= ring_.modulus();
    if (c < 0) c += ring_.modulus();
}

void MultiPoly::add_term(const std::vector<uint32_t>& expo, BigInt c) {
    normalize_coeff(c);
    if (c == 0) return;
    auto it = terms_.find(expo);
    if (it == terms_.end()) {
        terms_.emplace(expo, std::move(c));
        return;
    }
    it->second += c;
    normalize_coeff(it->second);
    if (it->second == 0) terms_.erase(it);
}

MultiPoly MultiPoly::constant(const PolyRing& ring, BigInt c) {
    MultiPoly f(ring);
    f.add_term(std::vector<uint32_t>(ring.arity(), 0), std::move(c));
    return f;
}

MultiPoly MultiPoly::variable(const PolyRing& ring, std::size_t index) {
    if (index >= ring.arity()) throw std::invalid_argument("variable index out of range");
    MultiPoly f(ring);
    std::vector<uint32_t> expo(ring.arity(), 0);
    expo[index] = 1;
    f.add_term(expo, 1);
    return f;
}

MultiPoly MultiPoly::monomial(const PolyRing& ring, std::vector<uint32_t> expo, BigInt c) {
    if (expo.size() != ring.arity()) throw std::invalid_argument("exponent arity mismatch");
    MultiPoly f(ring);
    f.add_term(expo, std::move(c));
    return f;
}

bool MultiPoly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const auto& expo = terms_.begin()->first;
    return std::all_of(expo.begin(), expo.end(), [](uint32_t e) { return e == 0; });
}

BigInt MultiPoly::coeff(const std::vector<uint32_t>& expo) const {
    auto it = terms_.find(expo);
    return it == terms_.end() ? BigInt(0) : it->second;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(ring_);
    for (const auto& [e, c] : terms_) r.add_term(e, -c);
    return r;
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    if (!(a.ring_ == b.ring_)) throw std::invalid_argument("polynomial ring mismatch");
    MultiPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    if (!(a.ring_ == b.ring_)) throw std::invalid_argument("polynomial ring mismatch");
    MultiPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
    return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    if (!(a.ring_ == b.ring_)) throw std::invalid_argument("polynomial ring mismatch");
    MultiPoly r(a.ring_);
    std::vector<uint32_t> expo(a.ring_.arity());
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < expo.size(); ++i) expo[i] = ea[i] + eb[i];
            r.add_term(expo, ca * cb);
        }
    return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly acc = constant(ring_, 1);
    MultiPoly base = *this;
    while (e > 0) {
        if (e & 1u) acc = acc * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return acc;
}

MultiPoly MultiPoly::exact_divide(const BigInt& d) const {
    if (d == 0) throw internal_error("exact_divide by zero");
    MultiPoly r(ring_);
    for (const auto& [e, c] : terms_) {
        if (c % d != 0) {
            std::ostringstream os;
            os << "inexact division: coefficient " << c << " not divisible by " << d;
            throw internal_error(os.str());
        }
        r.add_term(e, c / d);
    }
    return r;
}

MultiPoly MultiPoly::reduced_mod(uint32_t p) const {
    PolyRing target(ring_.vars(), p);
    MultiPoly r(target);
    for (const auto& [e, c] : terms_) r.add_term(e, c);
    return r;
}

MultiPoly MultiPoly::specialized(std::size_t var, const BigInt& value) const {
    if (var >= ring_.arity()) throw std::invalid_argument("variable index out of range");
    MultiPoly r(ring_);
    for (const auto& [e, c] : terms_) {
        BigInt scale = 1;
        for (uint32_t k = 0; k < e[var]; ++k) scale *= value;
        std::vector<uint32_t> expo = e;
        expo[var] = 0;
        r.add_term(expo, c * scale);
    }
    return r;
}

std::string to_string(const MultiPoly& f) {
    if (f.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : f.terms()) {
        if (!first) os << " + ";
        first = false;
        bool printed = false;
        bool unit = (c == 1);
        if (!unit || std::all_of(e.begin(), e.end(), [](uint32_t x) { return x == 0; })) {
            os << c;
            printed = true;
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (printed) os << "*";
            os << f.ring().vars()[i];
            if (e[i] > 1) os << "^" << e[i];
            printed = true;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// QuotientPoly

QuotientPoly::QuotientPoly(MultiPoly base, std::vector<std::size_t> nilpotent_vars)
    : base_(std::move(base)), nilpotent_(std::move(nilpotent_vars)) {
    if (base_.ring().modulus() == 0)
        throw std::invalid_argument("quotient requires F_p coefficients");
    std::sort(nilpotent_.begin(), nilpotent_.end());
    for (std::size_t v : nilpotent_)
        if (v >= base_.ring().arity())
            throw std::invalid_argument("nilpotent variable index out of range");
    reduce();
}

void QuotientPoly::reduce() {
    const uint32_t p = base_.ring().modulus();
    MultiPoly kept(base_.ring());
    bool changed = false;
    for (const auto& [e, c] : base_.terms()) {
        bool dead = false;
        for (std::size_t v : nilpotent_)
            if (e[v] >= p) {
                dead = true;
                break;
            }
        if (dead)
            changed = true;
        else
            kept += MultiPoly::monomial(base_.ring(), e, c);
    }
    if (changed) base_ = std::move(kept);
}

void QuotientPoly::check_compatible(const QuotientPoly& o) const {
    if (!(base_.ring() == o.base_.ring()) || nilpotent_ != o.nilpotent_)
        throw std::invalid_argument("quotient ring mismatch");
}

QuotientPoly operator+(const QuotientPoly& a, const QuotientPoly& b) {
    a.check_compatible(b);
    return QuotientPoly(a.base_ + b.base_, a.nilpotent_);
}

QuotientPoly operator-(const QuotientPoly& a, const QuotientPoly& b) {
    a.check_compatible(b);
    return QuotientPoly(a.base_ - b.base_, a.nilpotent_);
}

QuotientPoly operator*(const QuotientPoly& a, const QuotientPoly& b) {
    a.check_compatible(b);
    return QuotientPoly(a.base_ * b.base_, a.nilpotent_);
}

QuotientPoly QuotientPoly::pow(unsigned e) const {
    QuotientPoly acc(MultiPoly::constant(base_.ring(), 1), nilpotent_);
    QuotientPoly base = *this;
    while (e > 0) {
        if (e & 1u) acc = acc * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return acc;
}

QuotientPoly QuotientPoly::specialized(std::size_t var, const BigInt& value) const {
    return QuotientPoly(base_.specialized(var, value), nilpotent_);
}

// ---------------------------------------------------------------------------
// carry polynomial

MultiPoly q_polynomial(PrimeConfig cfg) {
    const uint32_t p = cfg.p();
    PolyRing zring({"x", "y"}, 0);
    MultiPoly x = MultiPoly::variable(zring, 0);
    MultiPoly y = MultiPoly::variable(zring, 1);
    MultiPoly xy = x * y;
    MultiPoly num = (x + y + xy).pow(p) - x.pow(p) - y.pow(p) - xy.pow(p);
    MultiPoly q = num.exact_divide(BigInt(p)).reduced_mod(p);
    // Q must lie in the ideal (x, y)^p
    for (const auto& [e, c] : q.terms()) {
        (void)c;
        if (e[0] + e[1] < p)
            throw internal_error("carry polynomial left the ideal (x,y)^p");
    }
    return q;
}

// ---------------------------------------------------------------------------
// truncated exponential

QuotientPoly trunc_exp(const QuotientPoly& u, const MultiPoly& e) {
    const PolyRing& ring = u.base().ring();
    if (!(e.ring() == ring)) throw std::invalid_argument("exponent ring mismatch");
    const uint32_t p = ring.modulus();
    PrimeConfig cfg(p);

    QuotientPoly w = u - QuotientPoly(MultiPoly::constant(ring, 1), u.nilpotent_vars());
    for (const auto& [expo, c] : w.base().terms()) {
        (void)c;
        bool has_nilpotent = false;
        for (std::size_t v : u.nilpotent_vars())
            if (expo[v] > 0) {
                has_nilpotent = true;
                break;
            }
        if (!has_nilpotent)
            throw std::invalid_argument(
                "trunc_exp: u - 1 is not nilpotent (monomial without nilpotent variable)");
    }

    QuotientPoly acc(MultiPoly::constant(ring, 0), u.nilpotent_vars());
    QuotientPoly wpow(MultiPoly::constant(ring, 1), u.nilpotent_vars());
    uint32_t fact = 1;
    MultiPoly falling = MultiPoly::constant(ring, 1);
    for (uint32_t m = 0; m < p; ++m) {
        if (m > 0) {
            falling = falling * (e - MultiPoly::constant(ring, m - 1));
            fact = fact * m % p;
            wpow = wpow * w;
        }
        MultiPoly coef = falling * MultiPoly::constant(ring, cfg.inv(fact));
        acc = acc + QuotientPoly(coef, u.nilpotent_vars()) * wpow;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// identity verifiers

namespace {

struct IdentityScene {
    PolyRing ring;
    std::vector<std::size_t> nil;
    MultiPoly x, y, z;

    explicit IdentityScene(uint32_t p, bool with_a)
        : ring(with_a ? std::vector<std::string>{"x", "y", "z", "a"}
                      : std::vector<std::string>{"x", "y", "z"},
               p),
          nil{0, 1},
          x(MultiPoly::variable(ring, 0)),
          y(MultiPoly::variable(ring, 1)),
          z(MultiPoly::variable(ring, 2)) {}

    QuotientPoly embed(const MultiPoly& f) const { return QuotientPoly(f, nil); }

    /// Q(x,y) transported into this ring
    MultiPoly q() const {
        MultiPoly qxy = q_polynomial(PrimeConfig(ring.modulus()));
        MultiPoly out(ring);
        for (const auto& [e, c] : qxy.terms()) {
            MultiPoly term = MultiPoly::constant(ring, c);
            for (uint32_t k = 0; k < e[0]; ++k) term *= x;
            for (uint32_t k = 0; k < e[1]; ++k) term *= y;
            out += term;
        }
        return out;
    }

    MultiPoly wp_z() const { return z.pow(ring.modulus()) - z; }
};

} // namespace

bool verify_identity_basic(PrimeConfig cfg) {
    IdentityScene s(cfg.p(), false);
    MultiPoly one = MultiPoly::constant(s.ring, 1);
    QuotientPoly lhs = trunc_exp(s.embed(one + s.x + s.y + s.x * s.y), s.z);
    QuotientPoly rhs = trunc_exp(s.embed(one + s.x), s.z) *
                       trunc_exp(s.embed(one + s.y), s.z) *
                       s.embed(one + s.wp_z() * s.q());
    return lhs == rhs;
}

bool verify_identity_iterated(PrimeConfig cfg) {
    IdentityScene s(cfg.p(), true);
    MultiPoly one = MultiPoly::constant(s.ring, 1);
    MultiPoly a = MultiPoly::variable(s.ring, 3);
    QuotientPoly lhs = trunc_exp(trunc_exp(s.embed(one + s.x + s.y + s.x * s.y), s.z), a);
    QuotientPoly rhs =
        trunc_exp(trunc_exp(s.embed(one + s.x), s.z) * trunc_exp(s.embed(one + s.y), s.z), a) *
        s.embed(one + s.wp_z() * a * s.q());
    return lhs == rhs;
}

bool verify_q_square(PrimeConfig cfg) {
    const uint32_t p = cfg.p();
    MultiPoly q = q_polynomial(cfg);
    MultiPoly q2 = q * q;
    for (const auto& [e, c] : q2.terms()) {
        (void)c;
        if (e[0] < p && e[1] < p) return false;
    }
    return true;
}

} // namespace hopforge
