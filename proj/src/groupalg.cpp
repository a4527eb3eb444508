#include "hopforge/groupalg.hpp"

#include <map>
#include <mutex>

namespace hopforge {

namespace detail {

struct GroupContext {
    uint32_t p = 2;
    int n = 1;
    std::size_t N = 2; // p^n
    std::vector<uint8_t> digit; // digit[i*n + k] = k-th digit of index i
    std::vector<uint32_t> neg;  // index of the inverse group element
    std::vector<uint32_t> add_table; // empty when too large
    FpMat gm1;          // rows J, cols s: coefficient of g^s in prod (g_k - 1)^{J_k}
    FpMat gm1_inv;
    FpMat group_coords; // (gm1_inv)^T: raw group coefficients -> box coordinates
    FpMat xi_vals;      // rows s, cols i: value of xi_i at g^s
    FpMat dual_w;       // W[s][J] = value of xi^J at g^s
    FpMat dual_coords;  // W^{-1}

    std::size_t index_of(const uint8_t* d) const {
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) idx = idx * p + d[k];
        return idx;
    }

    uint32_t add(uint32_t i, uint32_t j) const {
        if (!add_table.empty()) return add_table[i * N + j];
        const uint8_t* di = &digit[i * static_cast<std::size_t>(n)];
        const uint8_t* dj = &digit[j * static_cast<std::size_t>(n)];
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) idx = idx * p + (di[k] + dj[k]) % p;
        return static_cast<uint32_t>(idx);
    }
};

namespace {

uint32_t binom_mod(uint32_t j, uint32_t s, uint32_t p) {
    // j, s < p <= 7
    uint64_t num = 1, den = 1;
    for (uint32_t k = 0; k < s; ++k) {
        num *= (j - k);
        den *= (k + 1);
    }
    uint64_t b = num / den;
    return static_cast<uint32_t>(b % p);
}

GroupContextPtr build_context(uint32_t p, int n) {
    PrimeConfig cfg(p);
    if (n < 1 || n > 4) throw std::invalid_argument("rank n must satisfy 1 <= n <= 4");
    auto ctx = std::make_shared<GroupContext>();
    ctx->p = p;
    ctx->n = n;
    std::size_t N = 1;
    for (int k = 0; k < n; ++k) N *= p;
    ctx->N = N;

    ctx->digit.assign(N * static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t v = i;
        for (int k = n - 1; k >= 0; --k) {
            ctx->digit[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] =
                static_cast<uint8_t>(v % p);
            v /= p;
        }
    }

    ctx->neg.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) {
            uint32_t d = ctx->digit[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
            idx = idx * p + (p - d) % p;
        }
        ctx->neg[i] = static_cast<uint32_t>(idx);
    }

    if (N * N <= (1u << 20)) {
        ctx->add_table.resize(N * N);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) {
                std::size_t idx = 0;
                for (int k = 0; k < n; ++k) {
                    uint32_t a = ctx->digit[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
                    uint32_t b = ctx->digit[j * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
                    idx = idx * p + (a + b) % p;
                }
                ctx->add_table[i * N + j] = static_cast<uint32_t>(idx);
            }
    }

    // (g-1)-monomial expansion: coefficient of g^s in prod_k (g_k - 1)^{J_k}
    ctx->gm1 = FpMat(p, N, N);
    for (std::size_t J = 0; J < N; ++J)
        for (std::size_t s = 0; s < N; ++s) {
            uint32_t c = 1;
            for (int k = 0; k < n && c != 0; ++k) {
                uint32_t jk = ctx->digit[J * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
                uint32_t sk = ctx->digit[s * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
                if (sk > jk) {
                    c = 0;
                    break;
                }
                uint32_t b = binom_mod(jk, sk, p);
                if ((jk - sk) % 2 == 1) b = (p - b) % p; // sign (-1)^{jk-sk}
                c = c * b % p;
            }
            ctx->gm1.at(J, s) = static_cast<uint8_t>(c);
        }
    auto inv = fp_inverse(ctx->gm1);
    if (!inv) throw internal_error("(g-1)-basis change matrix is singular");
    ctx->gm1_inv = std::move(*inv);

    ctx->group_coords = FpMat(p, N, N);
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) ctx->group_coords.at(r, c) = ctx->gm1_inv.at(c, r);

    // xi_i values: column idx(e_i) of gm1_inv
    ctx->xi_vals = FpMat(p, N, static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::size_t ei = 0;
        for (int k = 0; k < n; ++k) ei = ei * p + (k == i ? 1u : 0u);
        for (std::size_t s = 0; s < N; ++s)
            ctx->xi_vals.at(s, static_cast<std::size_t>(i)) = ctx->gm1_inv.at(s, ei);
    }

    // xi-monomial values W[s][J] = prod_k xi_k(s)^{J_k}
    ctx->dual_w = FpMat(p, N, N);
    for (std::size_t s = 0; s < N; ++s)
        for (std::size_t J = 0; J < N; ++J) {
            uint32_t v = 1;
            for (int k = 0; k < n; ++k) {
                uint32_t jk = ctx->digit[J * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
                uint32_t base = ctx->xi_vals.at(s, static_cast<std::size_t>(k));
                for (uint32_t e = 0; e < jk; ++e) v = v * base % p;
            }
            ctx->dual_w.at(s, J) = static_cast<uint8_t>(v);
        }
    auto winv = fp_inverse(ctx->dual_w);
    if (!winv) throw internal_error("xi-monomial value matrix is singular");
    ctx->dual_coords = std::move(*winv);

    return ctx;
}

} // namespace

GroupContextPtr group_context(uint32_t p, int n) {
    static std::mutex mu;
    static std::map<std::pair<uint32_t, int>, GroupContextPtr> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, n);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second;
    GroupContextPtr ctx = build_context(p, n);
    registry.emplace(key, ctx);
    return ctx;
}

} // namespace detail

using detail::GroupContext;

// ---------------------------------------------------------------------------
// GroupExponent

GroupExponent::GroupExponent(PrimeConfig cfg, std::vector<uint8_t> digits)
    : p_(cfg.p()), d_(std::move(digits)) {
    if (d_.empty() || d_.size() > 4)
        throw std::invalid_argument("exponent tuple must have 1 <= n <= 4 entries");
    for (uint8_t x : d_)
        if (x >= p_) throw std::invalid_argument("exponent digit out of range [0, p)");
}

GroupExponent GroupExponent::zero(PrimeConfig cfg, int n) {
    return GroupExponent(cfg, std::vector<uint8_t>(static_cast<std::size_t>(n), 0));
}

GroupExponent GroupExponent::unit(PrimeConfig cfg, int n, int i) {
    if (i < 0 || i >= n) throw std::invalid_argument("unit index out of range");
    std::vector<uint8_t> d(static_cast<std::size_t>(n), 0);
    d[static_cast<std::size_t>(i)] = 1;
    return GroupExponent(cfg, std::move(d));
}

bool GroupExponent::is_zero() const {
    for (uint8_t x : d_)
        if (x != 0) return false;
    return true;
}

GroupExponent GroupExponent::operator+(const GroupExponent& o) const {
    if (p_ != o.p_ || d_.size() != o.d_.size())
        throw std::invalid_argument("exponent shape mismatch");
    std::vector<uint8_t> d(d_.size());
    for (std::size_t k = 0; k < d_.size(); ++k)
        d[k] = static_cast<uint8_t>((d_[k] + o.d_[k]) % p_);
    return GroupExponent(PrimeConfig(p_), std::move(d));
}

GroupExponent GroupExponent::operator-() const {
    std::vector<uint8_t> d(d_.size());
    for (std::size_t k = 0; k < d_.size(); ++k)
        d[k] = static_cast<uint8_t>((p_ - d_[k]) % p_);
    return GroupExponent(PrimeConfig(p_), std::move(d));
}

namespace {

std::size_t exp_index(const detail::GroupContext& ctx, const GroupExponent& g) {
    if (g.p() != ctx.p || g.rank() != ctx.n)
        throw std::invalid_argument("exponent does not match element shape");
    return ctx.index_of(g.digits().data());
}

void check_same(const detail::GroupContext& a, const detail::GroupContext& b) {
    if (a.p != b.p || a.n != b.n)
        throw std::invalid_argument("rank/prime mismatch between elements");
}

} // namespace

// ---------------------------------------------------------------------------
// GroupAlgebraElement

GroupAlgebraElement::GroupAlgebraElement(PrimeConfig cfg, int n)
    : ctx_(detail::group_context(cfg.p(), n)), c_(ctx_->N, LocalScalar::zero(cfg)) {}

GroupAlgebraElement GroupAlgebraElement::one(PrimeConfig cfg, int n) {
    GroupAlgebraElement x(cfg, n);
    x.c_[0] = LocalScalar::one(cfg);
    return x;
}

GroupAlgebraElement GroupAlgebraElement::group_element(PrimeConfig cfg, int n,
                                                       const GroupExponent& g) {
    GroupAlgebraElement x(cfg, n);
    x.c_[exp_index(*x.ctx_, g)] = LocalScalar::one(cfg);
    return x;
}

GroupAlgebraElement GroupAlgebraElement::from_raw(PrimeConfig cfg, int n,
                                                  std::vector<LocalScalar> coeffs) {
    GroupAlgebraElement x(cfg, n);
    if (coeffs.size() != x.c_.size()) throw std::invalid_argument("coefficient vector size");
    x.c_ = std::move(coeffs);
    return x;
}

PrimeConfig GroupAlgebraElement::cfg() const { return PrimeConfig(ctx_->p); }
int GroupAlgebraElement::rank() const { return ctx_->n; }

const LocalScalar& GroupAlgebraElement::coeff(const GroupExponent& g) const {
    return c_[exp_index(*ctx_, g)];
}

void GroupAlgebraElement::set_coeff(const GroupExponent& g, LocalScalar v) {
    c_[exp_index(*ctx_, g)] = std::move(v);
}

GroupAlgebraElement GroupAlgebraElement::operator-() const {
    GroupAlgebraElement r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

GroupAlgebraElement operator+(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    GroupAlgebraElement r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i)
        if (!b.c_[i].is_zero()) r.c_[i] += b.c_[i];
    return r;
}

GroupAlgebraElement operator-(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    GroupAlgebraElement r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i)
        if (!b.c_[i].is_zero()) r.c_[i] -= b.c_[i];
    return r;
}

GroupAlgebraElement operator*(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    GroupAlgebraElement r(a.cfg(), a.rank());
    const std::size_t N = a.c_.size();
    for (std::size_t i = 0; i < N; ++i) {
        if (a.c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < N; ++j) {
            if (b.c_[j].is_zero()) continue;
            r.c_[a.ctx_->add(static_cast<uint32_t>(i), static_cast<uint32_t>(j))] +=
                a.c_[i] * b.c_[j];
        }
    }
    return r;
}

GroupAlgebraElement operator*(const LocalScalar& s, const GroupAlgebraElement& x) {
    GroupAlgebraElement r = x;
    for (auto& c : r.c_) {
        if (c.is_zero()) continue;
        c = s * c;
    }
    return r;
}

GroupAlgebraElement GroupAlgebraElement::pow(unsigned e) const {
    GroupAlgebraElement acc = one(cfg(), rank());
    GroupAlgebraElement base = *this;
    while (e > 0) {
        if (e & 1u) acc = acc * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return acc;
}

bool GroupAlgebraElement::is_zero() const {
    for (const auto& x : c_)
        if (!x.is_zero()) return false;
    return true;
}

bool GroupAlgebraElement::is_one() const {
    if (!c_[0].is_one()) return false;
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (!c_[i].is_zero()) return false;
    return true;
}

Mat GroupAlgebraElement::delta_raw() const {
    Mat d = Mat::zeros(cfg(), c_.size(), c_.size());
    for (std::size_t s = 0; s < c_.size(); ++s) d.at(s, s) = c_[s];
    return d;
}

TensorElement GroupAlgebraElement::delta() const {
    return TensorElement::from_matrix(cfg(), rank(), TensorElement::Side::group, delta_raw());
}

LocalScalar GroupAlgebraElement::counit() const {
    LocalScalar s = LocalScalar::zero(cfg());
    for (const auto& x : c_)
        if (!x.is_zero()) s += x;
    return s;
}

GroupAlgebraElement GroupAlgebraElement::antipode() const {
    GroupAlgebraElement r(cfg(), rank());
    for (std::size_t s = 0; s < c_.size(); ++s) r.c_[ctx_->neg[s]] = c_[s];
    return r;
}

bool operator==(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
    return a.ctx_->p == b.ctx_->p && a.ctx_->n == b.ctx_->n && a.c_ == b.c_;
}

// ---------------------------------------------------------------------------
// DualElement

DualElement::DualElement(PrimeConfig cfg, int n)
    : ctx_(detail::group_context(cfg.p(), n)), c_(ctx_->N, LocalScalar::zero(cfg)) {}

DualElement DualElement::one(PrimeConfig cfg, int n) {
    DualElement f(cfg, n);
    for (auto& v : f.c_) v = LocalScalar::one(cfg);
    return f;
}

DualElement DualElement::point_mass(PrimeConfig cfg, int n, const GroupExponent& g) {
    DualElement f(cfg, n);
    f.c_[exp_index(*f.ctx_, g)] = LocalScalar::one(cfg);
    return f;
}

DualElement DualElement::from_raw(PrimeConfig cfg, int n, std::vector<LocalScalar> values) {
    DualElement f(cfg, n);
    if (values.size() != f.c_.size()) throw std::invalid_argument("value vector size");
    f.c_ = std::move(values);
    return f;
}

PrimeConfig DualElement::cfg() const { return PrimeConfig(ctx_->p); }
int DualElement::rank() const { return ctx_->n; }

const LocalScalar& DualElement::value(const GroupExponent& g) const {
    return c_[exp_index(*ctx_, g)];
}

void DualElement::set_value(const GroupExponent& g, LocalScalar v) {
    c_[exp_index(*ctx_, g)] = std::move(v);
}

DualElement DualElement::operator-() const {
    DualElement r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

DualElement operator+(const DualElement& a, const DualElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    DualElement r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i)
        if (!b.c_[i].is_zero()) r.c_[i] += b.c_[i];
    return r;
}

DualElement operator-(const DualElement& a, const DualElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    DualElement r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i)
        if (!b.c_[i].is_zero()) r.c_[i] -= b.c_[i];
    return r;
}

DualElement operator*(const DualElement& a, const DualElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    DualElement r(a.cfg(), a.rank());
    for (std::size_t i = 0; i < r.c_.size(); ++i)
        if (!a.c_[i].is_zero() && !b.c_[i].is_zero()) r.c_[i] = a.c_[i] * b.c_[i];
    return r;
}

DualElement operator*(const LocalScalar& s, const DualElement& x) {
    DualElement r = x;
    for (auto& c : r.c_) {
        if (c.is_zero()) continue;
        c = s * c;
    }
    return r;
}

DualElement DualElement::pow(unsigned e) const {
    if (e == 0) return one(cfg(), rank());
    DualElement r(cfg(), rank());
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        r.c_[i] = c_[i].pow(static_cast<long>(e));
    }
    return r;
}

bool DualElement::is_zero() const {
    for (const auto& x : c_)
        if (!x.is_zero()) return false;
    return true;
}

bool DualElement::is_one() const {
    for (const auto& x : c_)
        if (!x.is_one()) return false;
    return true;
}

Mat DualElement::delta_raw() const {
    const std::size_t N = c_.size();
    Mat d = Mat::zeros(cfg(), N, N);
    for (std::size_t s = 0; s < N; ++s)
        for (std::size_t t = 0; t < N; ++t) {
            const LocalScalar& v = c_[ctx_->add(static_cast<uint32_t>(s), static_cast<uint32_t>(t))];
            if (!v.is_zero()) d.at(s, t) = v;
        }
    return d;
}

TensorElement DualElement::delta() const {
    return TensorElement::from_matrix(cfg(), rank(), TensorElement::Side::dual, delta_raw());
}

LocalScalar DualElement::counit() const { return c_[0]; }

DualElement DualElement::antipode() const {
    DualElement r(cfg(), rank());
    for (std::size_t s = 0; s < c_.size(); ++s) r.c_[ctx_->neg[s]] = c_[s];
    return r;
}

bool operator==(const DualElement& a, const DualElement& b) {
    return a.ctx_->p == b.ctx_->p && a.ctx_->n == b.ctx_->n && a.c_ == b.c_;
}

// ---------------------------------------------------------------------------
// TensorElement

TensorElement::TensorElement(detail::GroupContextPtr ctx, Side side, Mat m)
    : ctx_(std::move(ctx)), side_(side), m_(std::move(m)) {
    if (m_.rows != ctx_->N || m_.cols != ctx_->N)
        throw std::invalid_argument("tensor matrix shape mismatch");
}

TensorElement TensorElement::tensor(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    Mat m = Mat::zeros(a.cfg(), a.c_.size(), a.c_.size());
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.c_.size(); ++j)
            if (!b.c_[j].is_zero()) m.at(i, j) = a.c_[i] * b.c_[j];
    }
    return TensorElement(a.ctx_, Side::group, std::move(m));
}

TensorElement TensorElement::tensor(const DualElement& a, const DualElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    Mat m = Mat::zeros(a.cfg(), a.c_.size(), a.c_.size());
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.c_.size(); ++j)
            if (!b.c_[j].is_zero()) m.at(i, j) = a.c_[i] * b.c_[j];
    }
    return TensorElement(a.ctx_, Side::dual, std::move(m));
}

TensorElement TensorElement::from_matrix(PrimeConfig cfg, int n, Side side, Mat m) {
    return TensorElement(detail::group_context(cfg.p(), n), side, std::move(m));
}

PrimeConfig TensorElement::cfg() const { return PrimeConfig(ctx_->p); }
int TensorElement::rank() const { return ctx_->n; }

TensorElement operator+(const TensorElement& a, const TensorElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    if (a.side_ != b.side_) throw std::invalid_argument("tensor side mismatch");
    Mat m = a.m_;
    for (std::size_t i = 0; i < m.a.size(); ++i)
        if (!b.m_.a[i].is_zero()) m.a[i] += b.m_.a[i];
    return TensorElement(a.ctx_, a.side_, std::move(m));
}

TensorElement operator-(const TensorElement& a, const TensorElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    if (a.side_ != b.side_) throw std::invalid_argument("tensor side mismatch");
    Mat m = a.m_;
    for (std::size_t i = 0; i < m.a.size(); ++i)
        if (!b.m_.a[i].is_zero()) m.a[i] -= b.m_.a[i];
    return TensorElement(a.ctx_, a.side_, std::move(m));
}

TensorElement operator*(const TensorElement& a, const TensorElement& b) {
    check_same(*a.ctx_, *b.ctx_);
    if (a.side_ != b.side_) throw std::invalid_argument("tensor side mismatch");
    const std::size_t N = a.ctx_->N;
    PrimeConfig cfg(a.ctx_->p);
    Mat m = Mat::zeros(cfg, N, N);
    if (a.side_ == TensorElement::Side::dual) {
        for (std::size_t i = 0; i < m.a.size(); ++i)
            if (!a.m_.a[i].is_zero() && !b.m_.a[i].is_zero()) m.a[i] = a.m_.a[i] * b.m_.a[i];
    } else {
        const auto& ctx = *a.ctx_;
        for (std::size_t i1 = 0; i1 < N; ++i1)
            for (std::size_t i2 = 0; i2 < N; ++i2) {
                const LocalScalar& x = a.m_.at(i1, i2);
                if (x.is_zero()) continue;
                for (std::size_t j1 = 0; j1 < N; ++j1)
                    for (std::size_t j2 = 0; j2 < N; ++j2) {
                        const LocalScalar& y = b.m_.at(j1, j2);
                        if (y.is_zero()) continue;
                        m.at(ctx.add(static_cast<uint32_t>(i1), static_cast<uint32_t>(j1)),
                             ctx.add(static_cast<uint32_t>(i2), static_cast<uint32_t>(j2))) +=
                            x * y;
                    }
            }
    }
    return TensorElement(a.ctx_, a.side_, std::move(m));
}

bool operator==(const TensorElement& a, const TensorElement& b) {
    return a.ctx_->p == b.ctx_->p && a.ctx_->n == b.ctx_->n && a.side_ == b.side_ &&
           a.m_ == b.m_;
}

// ---------------------------------------------------------------------------
// pairings

LocalScalar pair(const DualElement& f, const GroupAlgebraElement& x) {
    if (f.cfg().p() != x.cfg().p() || f.rank() != x.rank())
        throw std::invalid_argument("rank/prime mismatch in pairing");
    LocalScalar s = LocalScalar::zero(f.cfg());
    const auto& fv = f.raw();
    const auto& xv = x.raw();
    for (std::size_t i = 0; i < fv.size(); ++i)
        if (!fv[i].is_zero() && !xv[i].is_zero()) s += fv[i] * xv[i];
    return s;
}

LocalScalar pair(const TensorElement& dual_side, const TensorElement& group_side) {
    if (dual_side.side() != TensorElement::Side::dual ||
        group_side.side() != TensorElement::Side::group)
        throw std::invalid_argument("tensor pairing requires a dual and a group tensor");
    if (dual_side.cfg().p() != group_side.cfg().p() || dual_side.rank() != group_side.rank())
        throw std::invalid_argument("rank/prime mismatch in pairing");
    LocalScalar s = LocalScalar::zero(dual_side.cfg());
    const auto& f = dual_side.matrix().a;
    const auto& x = group_side.matrix().a;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!f[i].is_zero() && !x[i].is_zero()) s += f[i] * x[i];
    return s;
}

DualElement xi(PrimeConfig cfg, int n, int i) {
    if (i < 0 || i >= n) throw std::invalid_argument("xi index out of range");
    auto ctx = detail::group_context(cfg.p(), n);
    std::vector<LocalScalar> vals;
    vals.reserve(ctx->N);
    for (std::size_t s = 0; s < ctx->N; ++s)
        vals.push_back(LocalScalar::from_int(cfg, ctx->xi_vals.at(s, static_cast<std::size_t>(i))));
    return DualElement::from_raw(cfg, n, std::move(vals));
}

GroupAlgebraElement trunc_exp(const GroupAlgebraElement& u, const LocalScalar& e) {
    PrimeConfig cfg = u.cfg();
    if (e.p() != cfg.p()) throw std::invalid_argument("exponent prime mismatch");
    const uint32_t p = cfg.p();
    if (!u.pow(p).is_one())
        throw std::invalid_argument("trunc_exp: (u-1)^p != 0 in the group algebra");
    GroupAlgebraElement w = u - GroupAlgebraElement::one(cfg, u.rank());
    GroupAlgebraElement acc(cfg, u.rank());
    GroupAlgebraElement wpow = GroupAlgebraElement::one(cfg, u.rank());
    for (uint32_t m = 0; m < p; ++m) {
        if (m > 0) wpow = wpow * w;
        acc += gen_binom(e, static_cast<int>(m)) * wpow;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// group automorphisms

namespace {

std::vector<uint32_t> automorphism_permutation(const FpMat& m, const GroupContext& ctx,
                                               bool inverse) {
    if (m.rows != static_cast<std::size_t>(ctx.n) || m.cols != m.rows || m.p != ctx.p)
        throw std::invalid_argument("automorphism matrix shape/prime mismatch");
    auto minv = fp_inverse(m);
    if (!minv) throw std::invalid_argument("automorphism matrix is singular mod p");
    const FpMat& use = inverse ? *minv : m;
    std::vector<uint32_t> perm(ctx.N);
    const int n = ctx.n;
    for (std::size_t s = 0; s < ctx.N; ++s) {
        std::size_t idx = 0;
        for (int r = 0; r < n; ++r) {
            uint32_t acc = 0;
            for (int k = 0; k < n; ++k)
                acc += use.at(static_cast<std::size_t>(r), static_cast<std::size_t>(k)) *
                       ctx.digit[s * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
            idx = idx * ctx.p + acc % ctx.p;
        }
        perm[s] = static_cast<uint32_t>(idx);
    }
    return perm;
}

} // namespace

GroupAlgebraElement apply_group_automorphism(const FpMat& m, const GroupAlgebraElement& x) {
    auto ctx = detail::group_context(x.cfg().p(), x.rank());
    std::vector<uint32_t> perm = automorphism_permutation(m, *ctx, false);
    std::vector<LocalScalar> out(x.dimension(), LocalScalar::zero(x.cfg()));
    const auto& in = x.raw();
    for (std::size_t s = 0; s < in.size(); ++s) out[perm[s]] = in[s];
    return GroupAlgebraElement::from_raw(x.cfg(), x.rank(), std::move(out));
}

DualElement apply_group_automorphism(const FpMat& m, const DualElement& f) {
    auto ctx = detail::group_context(f.cfg().p(), f.rank());
    // precomposition with the inverse automorphism
    std::vector<uint32_t> perm = automorphism_permutation(m, *ctx, true);
    std::vector<LocalScalar> out(f.dimension(), LocalScalar::zero(f.cfg()));
    const auto& in = f.raw();
    for (std::size_t s = 0; s < in.size(); ++s) out[s] = in[perm[s]];
    return DualElement::from_raw(f.cfg(), f.rank(), std::move(out));
}

// ---------------------------------------------------------------------------
// coordinate caches

const FpMat& group_coord_map(PrimeConfig cfg, int n) {
    return detail::group_context(cfg.p(), n)->group_coords;
}

const FpMat& dual_coord_map(PrimeConfig cfg, int n) {
    return detail::group_context(cfg.p(), n)->dual_coords;
}

std::vector<GroupExponent> exponent_box(PrimeConfig cfg, int n) {
    auto ctx = detail::group_context(cfg.p(), n);
    std::vector<GroupExponent> out;
    out.reserve(ctx->N);
    for (std::size_t s = 0; s < ctx->N; ++s) {
        std::vector<uint8_t> d(ctx->digit.begin() + static_cast<long>(s * static_cast<std::size_t>(n)),
                               ctx->digit.begin() + static_cast<long>((s + 1) * static_cast<std::size_t>(n)));
        out.emplace_back(cfg, std::move(d));
    }
    return out;
}

} // namespace hopforge
