#include "apu/numerics/dense.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "apu/error.hpp"

namespace apu::numerics {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector DenseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != cols_) throw Error(Errc::InvalidArgument, "matrix/vector size mismatch");
    Vector y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw Error(Errc::InvalidArgument, "LU needs a square matrix");
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});

    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            if (!std::isfinite(lu_(r, c))) throw Error(Errc::SingularMatrix, "non-finite entry");
            scale = std::max(scale, std::abs(lu_(r, c)));
        }
    const double tiny = scale * 1e-15 * static_cast<double>(n == 0 ? 1 : n);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(lu_(r, k)) > best) {
                best = std::abs(lu_(r, k));
                piv = r;
            }
        }
        if (best <= tiny || best == 0.0)
            throw Error(Errc::SingularMatrix, "zero pivot at index " + std::to_string(k));
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(piv, c));
            std::swap(perm_[k], perm_[piv]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = lu_(r, k) * inv;
            lu_(r, k) = f;
            if (f == 0.0) continue;
            for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
        }
    }
}

void LuFactorization::solve_in_place(std::span<double> rhs) const {
    const std::size_t n = lu_.rows();
    if (rhs.size() != n) throw Error(Errc::InvalidArgument, "rhs size mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rhs[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
        double acc = y[i];
        for (std::size_t c = 0; c < i; ++c) acc -= lu_(i, c) * y[c];
        y[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t c = ii + 1; c < n; ++c) acc -= lu_(ii, c) * y[c];
        y[ii] = acc / lu_(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) rhs[i] = y[i];
}

Vector LuFactorization::solve(std::span<const double> rhs) const {
    Vector x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
}

Vector solve_dense(const DenseMatrix& matrix, std::span<const double> rhs) {
    return LuFactorization(matrix).solve(rhs);
}

double norm_inf(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm_2(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace apu::numerics
