#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace reflsolve {

using Vector = std::vector<double>;

/// Row-major dense matrix of doubles. Always at least 1x1.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> entries() const noexcept { return data_; }

  DenseMatrix transpose() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Singular values in descending order with matching right singular vectors
/// stored as the columns of `right_vectors`.
struct SvdResult {
  Vector singular_values;
  DenseMatrix right_vectors;

  double largest() const { return singular_values.front(); }
  double smallest() const { return singular_values.back(); }
  Vector right_vector(std::size_t k) const;
};

double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);
double squared_norm(std::span<const double> x);
double distance(std::span<const double> x, std::span<const double> y);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector add(std::span<const double> x, std::span<const double> y);
Vector subtract(std::span<const double> x, std::span<const double> y);
Vector scale(double alpha, std::span<const double> x);

double frobenius_norm(const DenseMatrix& a);
double squared_frobenius_norm(const DenseMatrix& a);

Vector matvec(const DenseMatrix& a, std::span<const double> x);
/// Aᵀ·x without forming the transpose.
Vector transpose_matvec(const DenseMatrix& a, std::span<const double> x);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// AᵀA
DenseMatrix gram(const DenseMatrix& a);

/// Gaussian elimination with partial pivoting. Throws SingularMatrixError when a
/// pivot falls below 1e-13 times the largest initial magnitude in its column.
Vector solve_direct(const DenseMatrix& a, std::span<const double> b);

/// One-sided (Hestenes) Jacobi SVD. Requires rows >= cols. Sweeps until every
/// column pair is orthogonal to 1e-12 relative, at most 60 sweeps; otherwise
/// throws ConvergenceError carrying the worst remaining ratio.
SvdResult singular_values(const DenseMatrix& a);

/// 1/σ_min for a square matrix. Throws SingularMatrixError when
/// σ_min <= 1e-13·σ_max.
double inverse_operator_norm(const DenseMatrix& a);
double inverse_operator_norm(const SvdResult& svd);

}  // namespace reflsolve
