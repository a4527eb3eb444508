#ifndef HOPFORGE_MATRIX_HPP
#define HOPFORGE_MATRIX_HPP

// Small dense exact linear algebra over K = F_p(t): row-pivoted LU,
// multi-right-hand-side solves and determinants, plus matrices over F_p for
// the cached basis-change maps.

#include <cstddef>
#include <optional>
#include <vector>

#include "hopforge/localfield.hpp"

namespace hopforge {

struct Mat {
    Mat() = default;
    Mat(std::size_t r, std::size_t c, const LocalScalar& fill)
        : rows(r), cols(c), a(r * c, fill) {}
    static Mat zeros(PrimeConfig cfg, std::size_t r, std::size_t c) {
        return Mat(r, c, LocalScalar::zero(cfg));
    }
    static Mat identity(PrimeConfig cfg, std::size_t n);

    LocalScalar& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    const LocalScalar& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    Mat transposed() const;
    friend Mat operator*(const Mat& x, const Mat& y);
    friend bool operator==(const Mat& x, const Mat& y) = default;

    std::size_t rows = 0, cols = 0;
    std::vector<LocalScalar> a;
};

/// Row-pivoted LU of a square matrix.  lu stores L (unit diagonal, below) and
/// U (on and above); perm maps factored row -> original row.
struct LUFactors {
    Mat lu;
    std::vector<std::size_t> perm;
    bool singular = false;
    std::size_t rank = 0;
    uint32_t sign = 1; // permutation sign as an element of F_p
};

LUFactors lu_factorize(Mat m);
std::vector<LocalScalar> lu_solve(const LUFactors& f, const std::vector<LocalScalar>& rhs);
/// solve for every column of rhs at once
Mat lu_solve_mat(const LUFactors& f, const Mat& rhs);
LocalScalar lu_determinant(const LUFactors& f, PrimeConfig cfg);

// ---------------------------------------------------------------------------
// F_p matrices (cached coordinate changes, group automorphisms)

struct FpMat {
    FpMat() = default;
    FpMat(uint32_t p, std::size_t r, std::size_t c) : p(p), rows(r), cols(c), a(r * c, 0) {}
    static FpMat identity(uint32_t p, std::size_t n);

    uint8_t& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    uint8_t at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    friend bool operator==(const FpMat& x, const FpMat& y) = default;

    uint32_t p = 2;
    std::size_t rows = 0, cols = 0;
    std::vector<uint8_t> a;
};

FpMat fp_mul(const FpMat& x, const FpMat& y);
/// nullopt when singular mod p
std::optional<FpMat> fp_inverse(const FpMat& m);

/// y = T x over K, with T an F_p matrix acting by constant scaling
std::vector<LocalScalar> fp_apply(const FpMat& t, const std::vector<LocalScalar>& x,
                                  PrimeConfig cfg);
/// T V T^t over K
Mat fp_conjugate(const FpMat& t, const Mat& v, PrimeConfig cfg);

} // namespace hopforge

#endif
