#include "hopforge/orders.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace hopforge {

namespace {

template <class E>
struct SideOf;

template <>
struct SideOf<GroupAlgebraElement> {
    static constexpr Ambient value = Ambient::group;
    static const FpMat& coord_map(PrimeConfig cfg, int n) { return group_coord_map(cfg, n); }
};

template <>
struct SideOf<DualElement> {
    static constexpr Ambient value = Ambient::dual;
    static const FpMat& coord_map(PrimeConfig cfg, int n) { return dual_coord_map(cfg, n); }
};

constexpr std::size_t kWitnessCap = 500;

Valuation lu_det_valuation(const LUFactors& f) {
    if (f.singular) return Valuation::infinity();
    Valuation v(0);
    for (std::size_t i = 0; i < f.lu.rows; ++i) v = v + f.lu.at(i, i).valuation();
    return v;
}

} // namespace

// ---------------------------------------------------------------------------
// conditions

ConditionReport check_conditions(PrimeConfig cfg, int n, const DualFamilyParams& params) {
    if (n < 1 || n > 3) throw std::invalid_argument("families are defined for 1 <= n <= 3");
    const long p = static_cast<long>(cfg.p());
    ConditionReport rep;
    rep.n = n;
    rep.nonneg_exponents = params.i1 >= 0 && (n < 2 || params.i2 >= 0) && (n < 3 || params.i3 >= 0);
    if (n >= 2) {
        rep.wp_mu_val = artin_schreier(params.mu).valuation();
        rep.wp_mu = rep.wp_mu_val >= Valuation(params.i2 - p * params.i1);
    }
    if (n == 3) {
        rep.wp_alpha_beta_val =
            (artin_schreier(params.alpha) + artin_schreier(params.mu) * params.beta).valuation();
        rep.wp_alpha_beta = rep.wp_alpha_beta_val >= Valuation(params.i3 - p * params.i1);
        rep.wp_beta_val = artin_schreier(params.beta).valuation();
        rep.wp_beta = rep.wp_beta_val >= Valuation(params.i3 - p * params.i2);
        rep.mu_val = params.mu.valuation();
        rep.mild_mu = rep.mu_val >= Valuation(params.i3 - params.i1);
        rep.mild_degrees = params.i2 >= params.i3;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// ThetaMatrix and the A = Theta^{-1} Theta^{(p)} construction

ThetaMatrix::ThetaMatrix(PrimeConfig cfg, Mat m) : cfg_(cfg), m_(std::move(m)) {
    if (m_.rows != m_.cols || m_.rows == 0 || m_.rows > 4)
        throw std::invalid_argument("Theta must be square with 1 <= n <= 4");
    for (const auto& x : m_.a)
        if (x.p() != cfg.p()) throw std::invalid_argument("Theta entry prime mismatch");
    for (std::size_t i = 0; i < m_.rows; ++i) {
        for (std::size_t j = i + 1; j < m_.cols; ++j)
            if (!m_.at(i, j).is_zero())
                throw std::invalid_argument("Theta must be lower triangular");
        if (m_.at(i, i).is_zero())
            throw std::invalid_argument("singular Theta: zero diagonal entry");
    }
}

KochMatrix koch_matrix(const ThetaMatrix& theta) {
    const Mat& m = theta.matrix();
    LUFactors f = lu_factorize(m);
    if (f.singular) throw std::invalid_argument("singular Theta");
    Mat mp = m;
    for (auto& x : mp.a)
        if (!x.is_zero()) x = frobenius(x);
    KochMatrix out{lu_solve_mat(f, mp), true, -1, -1};
    for (std::size_t i = 0; i < out.a.rows && out.integral; ++i)
        for (std::size_t j = 0; j < out.a.cols; ++j)
            if (out.a.at(i, j).valuation() < Valuation(0)) {
                out.integral = false;
                out.bad_row = static_cast<int>(i);
                out.bad_col = static_cast<int>(j);
                break;
            }
    return out;
}

// ---------------------------------------------------------------------------
// OrderPresentation

struct OrderPresentation::Impl {
    Ambient ambient;
    PrimeConfig cfg;
    int n;
    std::size_t N;
    std::vector<AnyElement> gens;
    std::vector<AnyElement> given_basis;

    std::once_flag once;
    std::vector<AnyElement> basis;
    Mat coords; // structured coordinates of the basis monomials, as columns
    LUFactors lu;
    std::exception_ptr build_error;

    Impl(Ambient a, PrimeConfig c, int nn) : ambient(a), cfg(c), n(nn), N(1) {
        if (nn < 1 || nn > 4) throw std::invalid_argument("rank n must satisfy 1 <= n <= 4");
        for (int k = 0; k < n; ++k) N *= cfg.p();
    }

    template <class E>
    void build_side() {
        const uint32_t p = cfg.p();
        basis.clear();
        basis.reserve(N);
        if (!given_basis.empty()) {
            basis = given_basis;
        } else {
            std::vector<std::vector<E>> pw(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) {
                pw[static_cast<std::size_t>(k)].push_back(E::one(cfg, n));
                const E& g = std::get<E>(gens[static_cast<std::size_t>(k)]);
                for (uint32_t e = 1; e < p; ++e)
                    pw[static_cast<std::size_t>(k)].push_back(
                        pw[static_cast<std::size_t>(k)].back() * g);
            }
            for (std::size_t idx = 0; idx < N; ++idx) {
                std::size_t v = idx;
                std::vector<uint32_t> d(static_cast<std::size_t>(n));
                for (int k = n - 1; k >= 0; --k) {
                    d[static_cast<std::size_t>(k)] = static_cast<uint32_t>(v % p);
                    v /= p;
                }
                E m = pw[0][d[0]];
                for (int k = 1; k < n; ++k)
                    m = m * pw[static_cast<std::size_t>(k)][d[static_cast<std::size_t>(k)]];
                basis.emplace_back(std::move(m));
            }
        }
        const FpMat& t = SideOf<E>::coord_map(cfg, n);
        coords = Mat::zeros(cfg, N, N);
        for (std::size_t j = 0; j < N; ++j) {
            std::vector<LocalScalar> c = fp_apply(t, std::get<E>(basis[j]).raw(), cfg);
            for (std::size_t i = 0; i < N; ++i) coords.at(i, j) = std::move(c[i]);
        }
        lu = lu_factorize(coords);
    }

    void ensure() {
        std::call_once(once, [this] {
            try {
                if (ambient == Ambient::group)
                    build_side<GroupAlgebraElement>();
                else
                    build_side<DualElement>();
            } catch (...) {
                build_error = std::current_exception();
            }
        });
        if (build_error) std::rethrow_exception(build_error);
    }

    void require_spanning() {
        ensure();
        if (lu.singular) {
            std::ostringstream os;
            os << "box monomials are K-linearly dependent: rank " << lu.rank << " < "
               << N;
            throw dependence_error(os.str(), lu.rank);
        }
    }
};

namespace {

void validate_elements(Ambient ambient, PrimeConfig cfg, int n,
                       const std::vector<AnyElement>& elems) {
    for (const AnyElement& e : elems) {
        std::visit(
            [&](const auto& x) {
                using E = std::decay_t<decltype(x)>;
                if (SideOf<E>::value != ambient)
                    throw std::invalid_argument("element ambient does not match presentation");
                if (x.cfg().p() != cfg.p() || x.rank() != n)
                    throw std::invalid_argument("element rank/prime mismatch");
            },
            e);
    }
}

} // namespace

OrderPresentation OrderPresentation::from_generators(Ambient ambient, PrimeConfig cfg, int n,
                                                     std::vector<AnyElement> generators) {
    if (generators.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("generator list must have exactly n entries");
    validate_elements(ambient, cfg, n, generators);
    auto impl = std::make_shared<Impl>(ambient, cfg, n);
    impl->gens = std::move(generators);
    return OrderPresentation(std::move(impl));
}

OrderPresentation OrderPresentation::from_basis(Ambient ambient, PrimeConfig cfg, int n,
                                                std::vector<AnyElement> basis) {
    auto impl = std::make_shared<Impl>(ambient, cfg, n);
    if (basis.size() != impl->N)
        throw std::invalid_argument("explicit basis must have exactly p^n entries");
    validate_elements(ambient, cfg, n, basis);
    impl->given_basis = std::move(basis);
    return OrderPresentation(std::move(impl));
}

Ambient OrderPresentation::ambient() const { return impl_->ambient; }
PrimeConfig OrderPresentation::cfg() const { return impl_->cfg; }
int OrderPresentation::rank() const { return impl_->n; }
std::size_t OrderPresentation::dimension() const { return impl_->N; }
const std::vector<AnyElement>& OrderPresentation::generators() const { return impl_->gens; }

const std::vector<AnyElement>& OrderPresentation::monomial_basis() const {
    impl_->require_spanning();
    return impl_->basis;
}

bool OrderPresentation::spans() const {
    impl_->ensure();
    return !impl_->lu.singular;
}

// ---------------------------------------------------------------------------
// family constructors

OrderPresentation koch_order(const ThetaMatrix& theta) {
    KochMatrix km = koch_matrix(theta);
    if (!km.integral) {
        std::ostringstream os;
        os << "A = Theta^{-1}Theta^(p) is not integral: entry (" << km.bad_row << ","
           << km.bad_col << ") = "
           << to_string(km.a.at(static_cast<std::size_t>(km.bad_row),
                                static_cast<std::size_t>(km.bad_col)))
           << " has negative valuation";
        throw integrality_error(os.str(), km.bad_row, km.bad_col);
    }
    PrimeConfig cfg = theta.cfg();
    const int n = theta.n();
    std::vector<AnyElement> gens;
    for (int i = 0; i < n; ++i) {
        DualElement u(cfg, n);
        for (int j = 0; j < n; ++j) {
            const LocalScalar& th = theta.entry(j, i);
            if (!th.is_zero()) u += th * xi(cfg, n, j);
        }
        gens.emplace_back(std::move(u));
    }
    return OrderPresentation::from_generators(Ambient::dual, cfg, n, std::move(gens));
}

OrderPresentation build_dual_order(PrimeConfig cfg, int n, const DualFamilyParams& params) {
    if (n < 1 || n > 3) throw std::invalid_argument("families are defined for 1 <= n <= 3");
    auto pi = [&](int k) { return LocalScalar::t_power(cfg, k); };
    std::vector<AnyElement> gens;
    if (n == 1) {
        gens.emplace_back(pi(params.i1) * xi(cfg, 1, 0));
    } else if (n == 2) {
        gens.emplace_back(pi(params.i1) * (xi(cfg, 2, 0) - params.mu * xi(cfg, 2, 1)));
        gens.emplace_back(pi(params.i2) * xi(cfg, 2, 1));
    } else {
        gens.emplace_back(pi(params.i1) * (xi(cfg, 3, 0) - params.mu * xi(cfg, 3, 1) -
                                           params.alpha * xi(cfg, 3, 2)));
        gens.emplace_back(pi(params.i2) * (xi(cfg, 3, 1) - params.beta * xi(cfg, 3, 2)));
        gens.emplace_back(pi(params.i3) * xi(cfg, 3, 2));
    }
    return OrderPresentation::from_generators(Ambient::dual, cfg, n, std::move(gens));
}

OrderPresentation build_primal_order(PrimeConfig cfg, int n, const DualFamilyParams& params) {
    if (n < 1 || n > 3) throw std::invalid_argument("families are defined for 1 <= n <= 3");
    auto pi = [&](int k) { return LocalScalar::t_power(cfg, k); };
    GroupAlgebraElement one = GroupAlgebraElement::one(cfg, n);
    auto g = [&](int i) {
        return GroupAlgebraElement::group_element(cfg, n, GroupExponent::unit(cfg, n, i));
    };
    std::vector<AnyElement> gens;
    gens.emplace_back(pi(-params.i1) * (g(0) - one));
    if (n >= 2) {
        GroupAlgebraElement w2 = g(1) * trunc_exp(g(0), params.mu);
        gens.emplace_back(pi(-params.i2) * (w2 - one));
        if (n == 3) {
            GroupAlgebraElement w3 =
                g(2) * trunc_exp(g(0), params.alpha) * trunc_exp(w2, params.beta);
            gens.emplace_back(pi(-params.i3) * (w3 - one));
        }
    }
    return OrderPresentation::from_generators(Ambient::group, cfg, n, std::move(gens));
}

// ---------------------------------------------------------------------------
// membership

namespace {

template <class E>
std::vector<LocalScalar> coords_of(OrderPresentation::Impl& im, const E& x) {
    const FpMat& t = SideOf<E>::coord_map(im.cfg, im.n);
    return lu_solve(im.lu, fp_apply(t, x.raw(), im.cfg));
}

} // namespace

ContainsResult contains(const OrderPresentation& pres, const AnyElement& x) {
    auto& im = *pres.impl_;
    im.require_spanning();
    return std::visit(
        [&](const auto& e) {
            using E = std::decay_t<decltype(e)>;
            if (SideOf<E>::value != im.ambient)
                throw std::invalid_argument("element ambient does not match presentation");
            if (e.cfg().p() != im.cfg.p() || e.rank() != im.n)
                throw std::invalid_argument("element rank/prime mismatch");
            ContainsResult r;
            r.coords = coords_of(im, e);
            r.contained = true;
            for (const auto& c : r.coords)
                if (c.valuation() < Valuation(0)) {
                    r.contained = false;
                    break;
                }
            return r;
        },
        x);
}

// ---------------------------------------------------------------------------
// verification

namespace {

template <class E>
void verify_side(OrderPresentation::Impl& im, VerificationReport& rep) {
    const std::size_t N = im.N;
    const PrimeConfig cfg = im.cfg;
    const FpMat& t = SideOf<E>::coord_map(cfg, im.n);
    auto bas = [&](std::size_t i) -> const E& { return std::get<E>(im.basis[i]); };
    auto note = [&](const char* check, std::vector<int> monos, int coord, Valuation v) {
        if (rep.witnesses.size() < kWitnessCap)
            rep.witnesses.push_back(Witness{check, std::move(monos), coord, v});
    };

    // (a) products of basis monomials stay integral
    rep.algebra_closed = true;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j) {
            E prod = bas(i) * bas(j);
            std::vector<LocalScalar> c = lu_solve(im.lu, fp_apply(t, prod.raw(), cfg));
            for (std::size_t k = 0; k < N; ++k)
                if (c[k].valuation() < Valuation(0)) {
                    rep.algebra_closed = false;
                    note("algebra", {static_cast<int>(i), static_cast<int>(j)},
                         static_cast<int>(k), c[k].valuation());
                }
        }

    // (b) comultiplication lands in basis (x) basis integrally
    rep.comult_closed = true;
    for (std::size_t j = 0; j < N; ++j) {
        Mat v = fp_conjugate(t, bas(j).delta_raw(), cfg);
        Mat y = lu_solve_mat(im.lu, v);
        Mat ct = lu_solve_mat(im.lu, y.transposed()); // C^T; C = M^{-1} V M^{-T}
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < N; ++b) {
                const LocalScalar& c = ct.at(b, a);
                if (c.valuation() < Valuation(0)) {
                    rep.comult_closed = false;
                    note("comultiplication", {static_cast<int>(j)},
                         static_cast<int>(a * N + b), c.valuation());
                }
            }
    }

    // (c) counit values lie in R
    rep.counit_integral = true;
    for (std::size_t j = 0; j < N; ++j) {
        LocalScalar e = bas(j).counit();
        if (e.valuation() < Valuation(0)) {
            rep.counit_integral = false;
            note("counit", {static_cast<int>(j)}, 0, e.valuation());
        }
    }

    // (d) antipode stays inside
    rep.antipode_closed = true;
    for (std::size_t j = 0; j < N; ++j) {
        E s = bas(j).antipode();
        std::vector<LocalScalar> c = lu_solve(im.lu, fp_apply(t, s.raw(), cfg));
        for (std::size_t k = 0; k < N; ++k)
            if (c[k].valuation() < Valuation(0)) {
                rep.antipode_closed = false;
                note("antipode", {static_cast<int>(j)}, static_cast<int>(k), c[k].valuation());
            }
    }
}

} // namespace

VerificationReport verify_hopf_order(const OrderPresentation& pres) {
    auto& im = *pres.impl_;
    im.ensure();
    VerificationReport rep;
    if (im.lu.singular) {
        rep.generically_full = false;
        rep.witnesses.push_back(
            Witness{"independence", {}, static_cast<int>(im.lu.rank), Valuation::infinity()});
        return rep;
    }
    rep.generically_full = true;
    if (im.ambient == Ambient::group)
        verify_side<GroupAlgebraElement>(im, rep);
    else
        verify_side<DualElement>(im, rep);
    return rep;
}

std::vector<LocalScalar> pth_power_witness(const OrderPresentation& pres, int gen_index) {
    auto& im = *pres.impl_;
    if (im.gens.empty())
        throw std::invalid_argument("presentation has no generator form");
    if (gen_index < 0 || gen_index >= im.n)
        throw std::invalid_argument("generator index out of range");
    im.require_spanning();
    return std::visit([&](const auto& g) { return coords_of(im, g.pow(im.cfg.p())); },
                      im.gens[static_cast<std::size_t>(gen_index)]);
}

// ---------------------------------------------------------------------------
// parameter equivalence

bool params_equivalent(const std::pair<LocalScalar, LocalScalar>& a,
                       const std::pair<LocalScalar, LocalScalar>& b, const LocalScalar& mu,
                       int i1, int i2, int i3) {
    const uint32_t p = mu.p();
    PrimeConfig cfg(p);
    for (uint32_t m = 0; m < p; ++m)
        for (uint32_t c = 0; c < p; ++c) {
            LocalScalar da = a.first - b.first - mu.scaled(m) - LocalScalar::from_int(cfg, c);
            LocalScalar db = a.second - b.second + LocalScalar::from_int(cfg, m);
            if (da.valuation() >= Valuation(i3 - i1) && db.valuation() >= Valuation(i3 - i2))
                return true;
        }
    return false;
}

bool mu_equivalent(const LocalScalar& a, const LocalScalar& b, int i1, int i2) {
    const uint32_t p = a.p();
    PrimeConfig cfg(p);
    for (uint32_t c = 0; c < p; ++c)
        if ((a - b - LocalScalar::from_int(cfg, c)).valuation() >= Valuation(i2 - i1))
            return true;
    return false;
}

// ---------------------------------------------------------------------------
// order comparison, duality, discriminants

bool orders_equal(const OrderPresentation& a, const OrderPresentation& b) {
    if (a.ambient() != b.ambient() || a.cfg().p() != b.cfg().p() || a.rank() != b.rank())
        throw std::invalid_argument("orders_equal requires the same ambient, prime and rank");
    for (const AnyElement& m : a.monomial_basis())
        if (!contains(b, m).contained) return false;
    for (const AnyElement& m : b.monomial_basis())
        if (!contains(a, m).contained) return false;
    return true;
}

OrderPresentation dualize(const OrderPresentation& pres) {
    auto& im = *pres.impl_;
    im.require_spanning();
    const std::size_t N = im.N;
    PrimeConfig cfg = im.cfg;

    Mat raw = Mat::zeros(cfg, N, N);
    for (std::size_t j = 0; j < N; ++j) {
        std::visit(
            [&](const auto& e) {
                const auto& v = e.raw();
                for (std::size_t i = 0; i < N; ++i) raw.at(i, j) = v[i];
            },
            im.basis[j]);
    }
    LUFactors ft = lu_factorize(raw.transposed());
    if (ft.singular) throw internal_error("raw basis matrix singular after spanning check");
    Mat inv = lu_solve_mat(ft, Mat::identity(cfg, N)); // (M^T)^{-1}; columns pair to delta

    std::vector<AnyElement> dual_basis;
    dual_basis.reserve(N);
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<LocalScalar> col;
        col.reserve(N);
        for (std::size_t i = 0; i < N; ++i) col.push_back(inv.at(i, j));
        if (im.ambient == Ambient::group)
            dual_basis.emplace_back(DualElement::from_raw(cfg, im.n, std::move(col)));
        else
            dual_basis.emplace_back(GroupAlgebraElement::from_raw(cfg, im.n, std::move(col)));
    }
    Ambient opposite = im.ambient == Ambient::group ? Ambient::dual : Ambient::group;
    return OrderPresentation::from_basis(opposite, cfg, im.n, std::move(dual_basis));
}

PairingMatrixResult pairing_matrix(const OrderPresentation& dual_side,
                                   const OrderPresentation& group_side) {
    if (dual_side.ambient() != Ambient::dual || group_side.ambient() != Ambient::group)
        throw std::invalid_argument("pairing_matrix expects a dual and a group presentation");
    if (dual_side.cfg().p() != group_side.cfg().p() || dual_side.rank() != group_side.rank())
        throw std::invalid_argument("rank/prime mismatch");
    const auto& db = dual_side.monomial_basis();
    const auto& gb = group_side.monomial_basis();
    PrimeConfig cfg = dual_side.cfg();
    const std::size_t N = db.size();

    PairingMatrixResult out;
    out.matrix = Mat::zeros(cfg, N, N);
    out.entries_integral = true;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            LocalScalar v = pair(std::get<DualElement>(db[i]), std::get<GroupAlgebraElement>(gb[j]));
            if (v.valuation() < Valuation(0)) out.entries_integral = false;
            out.matrix.at(i, j) = std::move(v);
        }
    out.det_valuation = lu_det_valuation(lu_factorize(out.matrix));
    out.unimodular = out.entries_integral && out.det_valuation == Valuation(0);
    return out;
}

namespace {

template <class E>
Valuation disc_side(OrderPresentation::Impl& im) {
    const std::size_t N = im.N;
    const PrimeConfig cfg = im.cfg;
    const FpMat& t = SideOf<E>::coord_map(cfg, im.n);
    auto bas = [&](std::size_t i) -> const E& { return std::get<E>(im.basis[i]); };

    // coordinates of all pairwise products (the algebra is commutative)
    std::vector<std::vector<LocalScalar>> table(N * N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j) {
            E prod = bas(i) * bas(j);
            table[i * N + j] = lu_solve(im.lu, fp_apply(t, prod.raw(), cfg));
        }
    auto prod_coords = [&](std::size_t i, std::size_t j) -> const std::vector<LocalScalar>& {
        return i <= j ? table[i * N + j] : table[j * N + i];
    };

    // trace of multiplication by each basis monomial
    std::vector<LocalScalar> tr(N, LocalScalar::zero(cfg));
    for (std::size_t J = 0; J < N; ++J)
        for (std::size_t k = 0; k < N; ++k) {
            const LocalScalar& c = prod_coords(J, k)[k];
            if (!c.is_zero()) tr[J] += c;
        }

    // trace form T[i][j] = tr(L_{m_i m_j}), expanded through the product table
    Mat form = Mat::zeros(cfg, N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j) {
            LocalScalar s = LocalScalar::zero(cfg);
            const auto& c = prod_coords(i, j);
            for (std::size_t J = 0; J < N; ++J)
                if (!c[J].is_zero() && !tr[J].is_zero()) s += c[J] * tr[J];
            form.at(i, j) = s;
            if (i != j) form.at(j, i) = std::move(s);
        }
    return lu_det_valuation(lu_factorize(std::move(form)));
}

} // namespace

Valuation discriminant_valuation(const OrderPresentation& pres) {
    auto& im = *pres.impl_;
    im.require_spanning();
    if (im.ambient == Ambient::group) return disc_side<GroupAlgebraElement>(im);
    return disc_side<DualElement>(im);
}

} // namespace hopforge
