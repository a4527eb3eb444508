#include "hopforge/localfield.hpp"

#include <atomic>
#include <cctype>
#include <sstream>

namespace hopforge {

// ---------------------------------------------------------------------------
// degree cap

namespace {
std::atomic<int> g_degree_cap{4096};
}

int degree_cap() { return g_degree_cap.load(std::memory_order_relaxed); }

void set_degree_cap(int cap) {
    if (cap < 1) throw std::invalid_argument("degree cap must be positive");
    g_degree_cap.store(cap, std::memory_order_relaxed);
}

namespace {

void check_degree(int deg, const char* op) {
    if (deg > degree_cap()) {
        std::ostringstream os;
        os << "degree cap exceeded in " << op << ": result degree " << deg
           << " > cap " << degree_cap();
        throw degree_cap_error(os.str());
    }
}

uint32_t mod_of(long c, uint32_t p) {
    long r = c % static_cast<long>(p);
    if (r < 0) r += p;
    return static_cast<uint32_t>(r);
}

} // namespace

// ---------------------------------------------------------------------------
// PrimeConfig

PrimeConfig::PrimeConfig(uint32_t p) : p_(p) {
    if (p != 2 && p != 3 && p != 5 && p != 7)
        throw std::invalid_argument("unsupported prime p = " + std::to_string(p) +
                                    " (supported: 2, 3, 5, 7)");
}

uint32_t PrimeConfig::inv(uint32_t a) const {
    a %= p_;
    if (a == 0) throw internal_error("inverse of 0 mod p requested");
    // p <= 7: brute force
    for (uint32_t b = 1; b < p_; ++b)
        if (a * b % p_ == 1) return b;
    throw internal_error("no inverse found; p not prime?");
}

// ---------------------------------------------------------------------------
// Valuation

long Valuation::value() const {
    if (inf_) throw internal_error("value() on infinite valuation");
    return v_;
}

Valuation Valuation::operator+(const Valuation& o) const {
    if (inf_ || o.inf_) return infinity();
    return Valuation(v_ + o.v_);
}

Valuation Valuation::operator-() const {
    if (inf_) throw internal_error("negation of infinite valuation");
    return Valuation(-v_);
}

std::string to_string(const Valuation& v) {
    return v.is_infinity() ? "inf" : std::to_string(v.value());
}

// ---------------------------------------------------------------------------
// FpPoly

void FpPoly::normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

FpPoly FpPoly::constant(uint32_t p, long c) {
    FpPoly f(p);
    uint32_t r = mod_of(c, p);
    if (r != 0) f.c_.push_back(static_cast<uint8_t>(r));
    return f;
}

FpPoly FpPoly::t_power(uint32_t p, unsigned k, long c) {
    check_degree(static_cast<int>(k), "t_power");
    FpPoly f(p);
    uint32_t r = mod_of(c, p);
    if (r != 0) {
        f.c_.assign(k + 1, 0);
        f.c_[k] = static_cast<uint8_t>(r);
    }
    return f;
}

int FpPoly::ord() const {
    for (std::size_t k = 0; k < c_.size(); ++k)
        if (c_[k] != 0) return static_cast<int>(k);
    return -1;
}

FpPoly FpPoly::operator-() const {
    FpPoly r(*this);
    for (auto& c : r.c_) c = static_cast<uint8_t>((p_ - c) % p_);
    return r;
}

FpPoly& FpPoly::operator+=(const FpPoly& o) {
    if (p_ != o.p_) throw std::invalid_argument("FpPoly prime mismatch");
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t k = 0; k < o.c_.size(); ++k)
        c_[k] = static_cast<uint8_t>((c_[k] + o.c_[k]) % p_);
    normalize();
    return *this;
}

FpPoly& FpPoly::operator-=(const FpPoly& o) {
    if (p_ != o.p_) throw std::invalid_argument("FpPoly prime mismatch");
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t k = 0; k < o.c_.size(); ++k)
        c_[k] = static_cast<uint8_t>((c_[k] + p_ - o.c_[k]) % p_);
    normalize();
    return *this;
}

FpPoly operator*(const FpPoly& a, const FpPoly& b) {
    if (a.p_ != b.p_) throw std::invalid_argument("FpPoly prime mismatch");
    FpPoly r(a.p_);
    if (a.is_zero() || b.is_zero()) return r;
    check_degree(a.degree() + b.degree(), "polynomial multiplication");
    r.c_.assign(a.c_.size() + b.c_.size() - 1, 0);
    const uint32_t p = a.p_;
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0) continue;
        const uint32_t ai = a.c_[i];
        for (std::size_t j = 0; j < b.c_.size(); ++j) {
            if (b.c_[j] == 0) continue;
            r.c_[i + j] = static_cast<uint8_t>((r.c_[i + j] + ai * b.c_[j]) % p);
        }
    }
    r.normalize();
    return r;
}

void FpPoly::divrem(const FpPoly& a, const FpPoly& b, FpPoly& q, FpPoly& r) {
    if (a.p_ != b.p_) throw std::invalid_argument("FpPoly prime mismatch");
    if (b.is_zero()) throw internal_error("FpPoly division by zero");
    const uint32_t p = a.p_;
    q = FpPoly(p);
    r = a;
    if (a.degree() < b.degree()) return;
    q.c_.assign(a.c_.size() - b.c_.size() + 1, 0);
    PrimeConfig cfg(p);
    const uint32_t lead_inv = cfg.inv(b.lead());
    for (int k = a.degree() - b.degree(); k >= 0; --k) {
        std::size_t top = static_cast<std::size_t>(k + b.degree());
        if (top >= r.c_.size() || r.c_[top] == 0) continue;
        uint32_t f = r.c_[top] * lead_inv % p;
        q.c_[static_cast<std::size_t>(k)] = static_cast<uint8_t>(f);
        for (std::size_t j = 0; j < b.c_.size(); ++j) {
            std::size_t idx = static_cast<std::size_t>(k) + j;
            r.c_[idx] = static_cast<uint8_t>((r.c_[idx] + p * p - f * b.c_[j]) % p);
        }
    }
    q.normalize();
    r.normalize();
}

FpPoly FpPoly::gcd(FpPoly a, FpPoly b) {
    while (!b.is_zero()) {
        FpPoly q(a.p_), r(a.p_);
        divrem(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

FpPoly FpPoly::pow(unsigned e) const {
    FpPoly base(*this);
    FpPoly acc = FpPoly::constant(p_, 1);
    if (!is_zero() && static_cast<long>(degree()) * e > static_cast<long>(degree_cap()))
        throw degree_cap_error("degree cap exceeded in polynomial power");
    while (e > 0) {
        if (e & 1u) acc = acc * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return acc;
}

FpPoly FpPoly::shifted(unsigned k) const {
    if (is_zero() || k == 0) {
        FpPoly r(*this);
        return r;
    }
    check_degree(degree() + static_cast<int>(k), "shift");
    FpPoly r(p_);
    r.c_.assign(c_.size() + k, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i + k] = c_[i];
    return r;
}

FpPoly FpPoly::monic() const {
    if (is_zero() || lead() == 1) return *this;
    return scaled(PrimeConfig(p_).inv(lead()));
}

FpPoly FpPoly::frobenius_map() const {
    if (is_zero()) return *this;
    check_degree(degree() * static_cast<int>(p_), "frobenius");
    FpPoly r(p_);
    r.c_.assign(static_cast<std::size_t>(degree()) * p_ + 1, 0);
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k * p_] = c_[k]; // c^p = c in F_p
    return r;
}

FpPoly FpPoly::scaled(uint32_t c) const {
    c %= p_;
    FpPoly r(p_);
    if (c == 0) return r;
    if (c == 1) return *this;
    r.c_.resize(c_.size());
    for (std::size_t k = 0; k < c_.size(); ++k)
        r.c_[k] = static_cast<uint8_t>(c_[k] * c % p_);
    return r;
}

std::string to_string(const FpPoly& f) {
    if (f.is_zero()) return "0";
    std::string out;
    for (int k = 0; k <= f.degree(); ++k) {
        uint32_t c = f.coeff(static_cast<std::size_t>(k));
        if (c == 0) continue;
        if (!out.empty()) out += '+';
        if (k == 0) {
            out += std::to_string(c);
        } else {
            if (c != 1) {
                out += std::to_string(c);
                out += '*';
            }
            out += 't';
            if (k != 1) {
                out += '^';
                out += std::to_string(k);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// LocalScalar

LocalScalar LocalScalar::zero(PrimeConfig cfg) {
    return LocalScalar(FpPoly(cfg.p()), FpPoly::constant(cfg.p(), 1));
}

LocalScalar LocalScalar::one(PrimeConfig cfg) {
    return LocalScalar(FpPoly::constant(cfg.p(), 1), FpPoly::constant(cfg.p(), 1));
}

LocalScalar LocalScalar::from_int(PrimeConfig cfg, long c) {
    return LocalScalar(FpPoly::constant(cfg.p(), c), FpPoly::constant(cfg.p(), 1));
}

LocalScalar LocalScalar::t_power(PrimeConfig cfg, int k) {
    FpPoly one = FpPoly::constant(cfg.p(), 1);
    if (k >= 0)
        return LocalScalar(FpPoly::t_power(cfg.p(), static_cast<unsigned>(k)), one);
    return LocalScalar(one, FpPoly::t_power(cfg.p(), static_cast<unsigned>(-k)));
}

LocalScalar LocalScalar::from_fraction(FpPoly num, FpPoly den) {
    if (num.p() != den.p()) throw std::invalid_argument("fraction prime mismatch");
    if (den.is_zero()) throw parse_error("division by zero (denominator is 0 mod p)");
    if (num.is_zero()) return zero(PrimeConfig(num.p()));
    FpPoly g = FpPoly::gcd(num, den);
    if (!g.is_one()) {
        FpPoly q(num.p()), r(num.p());
        FpPoly::divrem(num, g, q, r);
        num = q;
        FpPoly::divrem(den, g, q, r);
        den = q;
    }
    uint32_t lead = den.lead();
    if (lead != 1) {
        uint32_t li = PrimeConfig(num.p()).inv(lead);
        num = num.scaled(li);
        den = den.scaled(li);
    }
    return LocalScalar(std::move(num), std::move(den));
}

Valuation LocalScalar::valuation() const {
    if (is_zero()) return Valuation::infinity();
    return Valuation(num_.ord() - den_.ord());
}

LocalScalar LocalScalar::operator-() const { return LocalScalar(-num_, den_); }

LocalScalar operator+(const LocalScalar& a, const LocalScalar& b) {
    if (a.p() != b.p()) throw std::invalid_argument("scalar prime mismatch");
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    FpPoly g = FpPoly::gcd(a.den_, b.den_);
    FpPoly da = a.den_, db = b.den_;
    if (!g.is_one()) {
        FpPoly q(a.p()), r(a.p());
        FpPoly::divrem(a.den_, g, q, r);
        da = q;
        FpPoly::divrem(b.den_, g, q, r);
        db = q;
    }
    // a.num/(g*da) + b.num/(g*db) = (a.num*db + b.num*da)/(g*da*db)
    FpPoly num = a.num_ * db + b.num_ * da;
    FpPoly den = g * da * db;
    return LocalScalar::from_fraction(std::move(num), std::move(den));
}

LocalScalar operator-(const LocalScalar& a, const LocalScalar& b) { return a + (-b); }

LocalScalar operator*(const LocalScalar& a, const LocalScalar& b) {
    if (a.p() != b.p()) throw std::invalid_argument("scalar prime mismatch");
    if (a.is_zero() || b.is_zero()) return LocalScalar::zero(a.cfg());
    // cross-cancel so the products below are already coprime
    FpPoly g1 = FpPoly::gcd(a.num_, b.den_);
    FpPoly g2 = FpPoly::gcd(b.num_, a.den_);
    FpPoly an = a.num_, bd = b.den_, bn = b.num_, ad = a.den_;
    FpPoly q(a.p()), r(a.p());
    if (!g1.is_one()) {
        FpPoly::divrem(an, g1, q, r);
        an = q;
        FpPoly::divrem(bd, g1, q, r);
        bd = q;
    }
    if (!g2.is_one()) {
        FpPoly::divrem(bn, g2, q, r);
        bn = q;
        FpPoly::divrem(ad, g2, q, r);
        ad = q;
    }
    FpPoly num = an * bn;
    FpPoly den = ad * bd;
    uint32_t lead = den.lead();
    if (lead != 1) {
        uint32_t li = PrimeConfig(a.p()).inv(lead);
        num = num.scaled(li);
        den = den.scaled(li);
    }
    return LocalScalar(std::move(num), std::move(den));
}

LocalScalar operator/(const LocalScalar& a, const LocalScalar& b) { return a * b.inverse(); }

LocalScalar LocalScalar::inverse() const {
    if (is_zero()) throw parse_error("division by zero scalar");
    return from_fraction(den_, num_);
}

LocalScalar LocalScalar::pow(long e) const {
    if (e == 0) return one(cfg());
    LocalScalar base = e > 0 ? *this : inverse();
    unsigned long k = static_cast<unsigned long>(e > 0 ? e : -e);
    LocalScalar acc = one(cfg());
    while (k > 0) {
        if (k & 1ul) acc = acc * base;
        k >>= 1ul;
        if (k > 0) base = base * base;
    }
    return acc;
}

LocalScalar LocalScalar::scaled(uint32_t c) const {
    c %= p();
    if (c == 0) return zero(cfg());
    if (c == 1) return *this;
    return LocalScalar(num_.scaled(c), den_);
}

LocalScalar frobenius(const LocalScalar& x) {
    if (x.is_zero()) return x;
    // gcd(num,den)=1 is preserved by the entrywise p-power map
    FpPoly num = x.num().frobenius_map();
    FpPoly den = x.den().frobenius_map();
    return LocalScalar::from_fraction(std::move(num), std::move(den));
}

LocalScalar artin_schreier(const LocalScalar& x) { return frobenius(x) - x; }

LocalScalar gen_binom(const LocalScalar& y, int m) {
    const uint32_t p = y.p();
    if (m < 0 || m >= static_cast<int>(p))
        throw std::invalid_argument("gen_binom: m must satisfy 0 <= m <= p-1");
    LocalScalar acc = LocalScalar::one(y.cfg());
    for (int j = 0; j < m; ++j) acc = acc * (y - LocalScalar::from_int(y.cfg(), j));
    uint32_t fact = 1;
    for (int j = 2; j <= m; ++j) fact = fact * static_cast<uint32_t>(j) % p;
    return acc.scaled(y.cfg().inv(fact));
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class ScalarParser {
public:
    ScalarParser(std::string_view s, PrimeConfig cfg) : s_(s), cfg_(cfg) {}

    LocalScalar run() {
        LocalScalar v = expr();
        skip_ws();
        if (pos_ != s_.size())
            fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    LocalScalar expr() {
        LocalScalar v = term();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                v = v + term();
            } else if (peek() == '-') {
                ++pos_;
                v = v - term();
            } else {
                return v;
            }
        }
    }

    LocalScalar term() {
        LocalScalar v = factor();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                v = v * factor();
            } else if (peek() == '/') {
                ++pos_;
                LocalScalar d = factor();
                if (d.is_zero()) fail("division by zero (denominator is 0 mod p)");
                v = v / d;
            } else {
                return v;
            }
        }
    }

    LocalScalar factor() {
        skip_ws();
        bool neg = false;
        while (peek() == '-' || peek() == '+') {
            if (peek() == '-') neg = !neg;
            ++pos_;
            skip_ws();
        }
        LocalScalar v = base();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            long e = exponent();
            if (v.is_zero() && e < 0) fail("division by zero (0 to a negative power)");
            if (!v.is_zero()) {
                long size_est = (std::max(v.num().degree(), v.den().degree())) *
                                (e > 0 ? e : -e);
                if (size_est > degree_cap())
                    throw degree_cap_error("degree cap exceeded while parsing power");
            }
            v = v.is_zero() && e > 0 ? v : v.pow(e);
        }
        return neg ? -v : v;
    }

    LocalScalar base() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            LocalScalar v = expr();
            skip_ws();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return v;
        }
        if (c == 't') {
            ++pos_;
            return LocalScalar::t_power(cfg_, 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            uint32_t r = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                r = (r * 10 + static_cast<uint32_t>(peek() - '0')) % cfg_.p();
                ++pos_;
            }
            return LocalScalar::from_int(cfg_, static_cast<long>(r));
        }
        if (c == '\0') fail("unexpected end of input");
        fail("unexpected character '" + std::string(1, c) + "'");
        return LocalScalar::zero(cfg_); // unreachable
    }

    long exponent() {
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        }
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer exponent");
        long e = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            e = e * 10 + (peek() - '0');
            if (e > 1000000) fail("exponent too large");
            ++pos_;
        }
        return neg ? -e : e;
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "scalar parse error at position " << pos_ << ": " << msg;
        throw parse_error(os.str());
    }

    std::string_view s_;
    PrimeConfig cfg_;
    std::size_t pos_ = 0;
};

bool single_term(const FpPoly& f) {
    int n = 0;
    for (int k = 0; k <= f.degree(); ++k)
        if (f.coeff(static_cast<std::size_t>(k)) != 0) ++n;
    return n <= 1;
}

} // namespace

LocalScalar scalar_parse(std::string_view text, PrimeConfig cfg) {
    return ScalarParser(text, cfg).run();
}

std::string to_string(const LocalScalar& x) {
    if (x.is_zero()) return "0";
    std::string num = to_string(x.num());
    if (x.den().is_one()) return num;
    if (!single_term(x.num())) num = "(" + num + ")";
    std::string den = to_string(x.den());
    if (!single_term(x.den())) den = "(" + den + ")";
    return num + "/" + den;
}

} // namespace hopforge
