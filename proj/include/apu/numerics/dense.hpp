#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace apu::numerics {

using Vector = std::vector<double>;

/// Row-major square/rectangular matrix for the small systems in this project
/// (machine current solve, Newton and stepper Jacobians).
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] Vector multiply(std::span<const double> x) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// LU factorization with partial pivoting. Throws Error(SingularMatrix) when a
/// pivot vanishes relative to the matrix scale.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a);

    [[nodiscard]] Vector solve(std::span<const double> rhs) const;
    void solve_in_place(std::span<double> rhs) const;
    [[nodiscard]] std::size_t size() const noexcept { return lu_.rows(); }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

/// Solves matrix * x = rhs by partial-pivot elimination.
Vector solve_dense(const DenseMatrix& matrix, std::span<const double> rhs);

double norm_inf(std::span<const double> v) noexcept;
double norm_2(std::span<const double> v) noexcept;

}  // namespace apu::numerics
