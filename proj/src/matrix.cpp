#include "hopforge/matrix.hpp"

#include <algorithm>

namespace hopforge {

Mat Mat::identity(PrimeConfig cfg, std::size_t n) {
    Mat m = zeros(cfg, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = LocalScalar::one(cfg);
    return m;
}

Mat Mat::transposed() const {
    Mat r(cols, rows, a.empty() ? LocalScalar::zero(PrimeConfig(2)) : a[0]);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
    return r;
}

Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw internal_error("matrix shape mismatch");
    PrimeConfig cfg = x.a.at(0).cfg();
    Mat r = Mat::zeros(cfg, x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const LocalScalar& xik = x.at(i, k);
            if (xik.is_zero()) continue;
            for (std::size_t j = 0; j < y.cols; ++j) {
                const LocalScalar& ykj = y.at(k, j);
                if (ykj.is_zero()) continue;
                r.at(i, j) += xik * ykj;
            }
        }
    return r;
}

namespace {

// pivot preference: keep entries small
long complexity(const LocalScalar& x) {
    return x.num().degree() + x.den().degree();
}

// rank by destructive elimination with full pivoting; used only to report a
// faithful rank once the LU pass has hit a zero column
std::size_t full_rank(Mat m) {
    const std::size_t n = std::min(m.rows, m.cols);
    std::size_t rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
        std::size_t pivot = m.rows;
        for (std::size_t r = row; r < m.rows; ++r)
            if (!m.at(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot == m.rows) continue;
        if (pivot != row)
            for (std::size_t j = col; j < m.cols; ++j) std::swap(m.at(row, j), m.at(pivot, j));
        const LocalScalar inv = m.at(row, col).inverse();
        for (std::size_t r = row + 1; r < m.rows; ++r) {
            if (m.at(r, col).is_zero()) continue;
            LocalScalar f = m.at(r, col) * inv;
            for (std::size_t j = col; j < m.cols; ++j) {
                if (m.at(row, j).is_zero()) continue;
                m.at(r, j) -= f * m.at(row, j);
            }
        }
        ++row;
        ++rank;
        if (rank == n) break;
    }
    return rank;
}

} // namespace

LUFactors lu_factorize(Mat m) {
    if (m.rows != m.cols) throw internal_error("LU of non-square matrix");
    const std::size_t n = m.rows;
    LUFactors f;
    f.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
    uint32_t p = n ? m.a[0].p() : 2;
    std::size_t swaps = 0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = n;
        long best = 0;
        for (std::size_t r = k; r < n; ++r) {
            const LocalScalar& cand = m.at(r, k);
            if (cand.is_zero()) continue;
            long c = complexity(cand);
            if (pivot == n || c < best) {
                pivot = r;
                best = c;
            }
        }
        if (pivot == n) {
            f.singular = true;
            // the sub-diagonal of processed columns stores multipliers, not the
            // (zero) eliminated entries; clear them before measuring the rank
            Mat reduced = m;
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t r = c + 1; r < n; ++r)
                    reduced.at(r, c) = LocalScalar::zero(PrimeConfig(p));
            f.rank = full_rank(std::move(reduced));
            f.lu = std::move(m);
            return f;
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(pivot, j));
            std::swap(f.perm[k], f.perm[pivot]);
            ++swaps;
        }
        const LocalScalar piv = m.at(k, k);
        const LocalScalar piv_inv = piv.inverse();
        for (std::size_t r = k + 1; r < n; ++r) {
            LocalScalar& lrk = m.at(r, k);
            if (lrk.is_zero()) continue;
            LocalScalar factor = lrk * piv_inv;
            for (std::size_t j = k + 1; j < n; ++j) {
                const LocalScalar& mkj = m.at(k, j);
                if (mkj.is_zero()) continue;
                m.at(r, j) -= factor * mkj;
            }
            lrk = factor;
        }
    }
    f.rank = n;
    f.sign = (swaps % 2 == 0) ? 1u : p - 1u;
    f.lu = std::move(m);
    return f;
}

std::vector<LocalScalar> lu_solve(const LUFactors& f, const std::vector<LocalScalar>& rhs) {
    if (f.singular) throw internal_error("lu_solve on singular matrix");
    const std::size_t n = f.lu.rows;
    if (rhs.size() != n) throw internal_error("lu_solve rhs size mismatch");
    std::vector<LocalScalar> y;
    y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) y.push_back(rhs[f.perm[i]]);
    // forward: L y' = y
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const LocalScalar& l = f.lu.at(i, j);
            if (l.is_zero() || y[j].is_zero()) continue;
            y[i] -= l * y[j];
        }
    // back: U x = y'
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) {
            const LocalScalar& u = f.lu.at(ii, j);
            if (u.is_zero() || y[j].is_zero()) continue;
            y[ii] -= u * y[j];
        }
        if (!y[ii].is_zero()) y[ii] = y[ii] / f.lu.at(ii, ii);
    }
    return y;
}

Mat lu_solve_mat(const LUFactors& f, const Mat& rhs) {
    if (f.singular) throw internal_error("lu_solve_mat on singular matrix");
    const std::size_t n = f.lu.rows;
    if (rhs.rows != n) throw internal_error("lu_solve_mat rhs shape mismatch");
    Mat out(rhs.rows, rhs.cols, rhs.a.at(0));
    std::vector<LocalScalar> col(n, rhs.a.at(0));
    for (std::size_t c = 0; c < rhs.cols; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = rhs.at(r, c);
        std::vector<LocalScalar> x = lu_solve(f, col);
        for (std::size_t r = 0; r < n; ++r) out.at(r, c) = x[r];
    }
    return out;
}

LocalScalar lu_determinant(const LUFactors& f, PrimeConfig cfg) {
    if (f.singular) return LocalScalar::zero(cfg);
    LocalScalar det = LocalScalar::one(cfg).scaled(f.sign);
    for (std::size_t i = 0; i < f.lu.rows; ++i) det = det * f.lu.at(i, i);
    return det;
}

// ---------------------------------------------------------------------------
// FpMat

FpMat FpMat::identity(uint32_t p, std::size_t n) {
    FpMat m(p, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

FpMat fp_mul(const FpMat& x, const FpMat& y) {
    if (x.cols != y.rows || x.p != y.p) throw internal_error("FpMat shape/prime mismatch");
    FpMat r(x.p, x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            uint32_t v = x.at(i, k);
            if (v == 0) continue;
            for (std::size_t j = 0; j < y.cols; ++j)
                r.at(i, j) = static_cast<uint8_t>((r.at(i, j) + v * y.at(k, j)) % x.p);
        }
    return r;
}

std::optional<FpMat> fp_inverse(const FpMat& m) {
    if (m.rows != m.cols) throw internal_error("FpMat inverse of non-square matrix");
    const std::size_t n = m.rows;
    const uint32_t p = m.p;
    PrimeConfig cfg(p);
    FpMat a = m;
    FpMat inv = FpMat::identity(p, n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = n;
        for (std::size_t r = k; r < n; ++r)
            if (a.at(r, k) != 0) {
                pivot = r;
                break;
            }
        if (pivot == n) return std::nullopt;
        if (pivot != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a.at(k, j), a.at(pivot, j));
                std::swap(inv.at(k, j), inv.at(pivot, j));
            }
        uint32_t pi = cfg.inv(a.at(k, k));
        for (std::size_t j = 0; j < n; ++j) {
            a.at(k, j) = static_cast<uint8_t>(a.at(k, j) * pi % p);
            inv.at(k, j) = static_cast<uint8_t>(inv.at(k, j) * pi % p);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == k) continue;
            uint32_t f = a.at(r, k);
            if (f == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a.at(r, j) = static_cast<uint8_t>((a.at(r, j) + (p - f) * a.at(k, j)) % p);
                inv.at(r, j) =
                    static_cast<uint8_t>((inv.at(r, j) + (p - f) * inv.at(k, j)) % p);
            }
        }
    }
    return inv;
}

std::vector<LocalScalar> fp_apply(const FpMat& t, const std::vector<LocalScalar>& x,
                                  PrimeConfig cfg) {
    if (t.cols != x.size()) throw internal_error("fp_apply size mismatch");
    std::vector<LocalScalar> out(t.rows, LocalScalar::zero(cfg));
    for (std::size_t i = 0; i < t.rows; ++i) {
        for (std::size_t j = 0; j < t.cols; ++j) {
            uint8_t c = t.at(i, j);
            if (c == 0 || x[j].is_zero()) continue;
            out[i] += x[j].scaled(c);
        }
    }
    return out;
}

Mat fp_conjugate(const FpMat& t, const Mat& v, PrimeConfig cfg) {
    if (v.rows != t.cols || v.cols != t.cols) throw internal_error("fp_conjugate shape mismatch");
    const std::size_t n = t.rows;
    // rows pass: P = T V
    Mat p1 = Mat::zeros(cfg, n, v.cols);
    std::vector<LocalScalar> col(v.rows, LocalScalar::zero(cfg));
    for (std::size_t c = 0; c < v.cols; ++c) {
        for (std::size_t r = 0; r < v.rows; ++r) col[r] = v.at(r, c);
        std::vector<LocalScalar> y = fp_apply(t, col, cfg);
        for (std::size_t r = 0; r < n; ++r) p1.at(r, c) = y[r];
    }
    // cols pass: C = P T^t  (apply T to each row of P)
    Mat out = Mat::zeros(cfg, n, n);
    std::vector<LocalScalar> row(p1.cols, LocalScalar::zero(cfg));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < p1.cols; ++c) row[c] = p1.at(r, c);
        std::vector<LocalScalar> y = fp_apply(t, row, cfg);
        for (std::size_t c = 0; c < n; ++c) out.at(r, c) = y[c];
    }
    return out;
}

} // namespace hopforge
