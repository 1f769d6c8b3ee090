#pragma once

#include <cstddef>
#include <vector>

namespace xpinnlab::linalg {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sizes here are tiny (network layers, grids of
/// norms), so this favours clarity over blocking tricks.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Matrix transposed() const;

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double c);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

/// Largest singular value.  Power iteration on GᵀG from a seeded random
/// start, relative Rayleigh-quotient tolerance 1e-12, at most 10000
/// iterations; falls back to a cyclic Jacobi eigensolve of GᵀG when the
/// iteration stalls.  Deterministic for a given matrix.
double spectral_norm(const Matrix& g);

/// Sum over columns of the Euclidean norm of each column (matrix taken
/// exactly as stored).
double norm_2_1(const Matrix& g);

/// Max over rows of the sum of absolute entries in that row.
double norm_1_inf(const Matrix& g);

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, ascending.
/// Used as the spectral-norm fallback; exposed for reuse in diagnostics.
std::vector<double> symmetric_eigenvalues(const Matrix& s);

} // namespace xpinnlab::linalg
