#include "reflsolve/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "reflsolve/errors.hpp"

namespace reflsolve {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y, const char* op) {
  if (x.size() != y.size()) {
    throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()) + ")");
  }
}

constexpr double kSvdOrthogonalityTol = 1e-12;
constexpr int kSvdMaxSweeps = 60;
constexpr double kPivotTol = 1e-13;
constexpr double kInverseNormTol = 1e-13;

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) {
    throw DimensionError("DenseMatrix: rows and cols must be positive");
  }
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("DenseMatrix: entry count " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) {
    throw DimensionError("DenseMatrix: rows and cols must be positive");
  }
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector SvdResult::right_vector(std::size_t k) const {
  Vector v(right_vectors.rows());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = right_vectors(i, k);
  return v;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "dot");
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

double squared_norm(std::span<const double> x) { return dot(x, x); }

double norm(std::span<const double> x) {
  // Scaled accumulation so tiny or huge vectors do not under/overflow.
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : x) {
    const double s = v / scale;
    sum += s * s;
  }
  return scale * std::sqrt(sum);
}

double distance(std::span<const double> x, std::span<const double> y) {
  return norm(subtract(x, y));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_length(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector add(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "add");
  Vector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  return out;
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "subtract");
  Vector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  return out;
}

Vector scale(double alpha, std::span<const double> x) {
  Vector out(x.begin(), x.end());
  for (double& v : out) v *= alpha;
  return out;
}

double squared_frobenius_norm(const DenseMatrix& a) {
  const auto e = a.entries();
  return std::inner_product(e.begin(), e.end(), e.begin(), 0.0);
}

double frobenius_norm(const DenseMatrix& a) { return norm(a.entries()); }

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) {
    throw DimensionError("matvec: vector length " + std::to_string(x.size()) +
                         " does not match " + std::to_string(a.cols()) + " columns");
  }
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector transpose_matvec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) {
    throw DimensionError("transpose_matvec: vector length " + std::to_string(x.size()) +
                         " does not match " + std::to_string(a.rows()) + " rows");
  }
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) axpy(x[i], a.row(i), y);
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) axpy(a(i, k), b.row(k), c.row(i));
  return c;
}

DenseMatrix gram(const DenseMatrix& a) {
  const std::size_t n = a.cols();
  DenseMatrix g(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      if (row[i] == 0.0) continue;
      for (std::size_t j = i; j < n; ++j) g(i, j) += row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Vector solve_direct(const DenseMatrix& a, std::span<const double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("solve_direct: matrix must be square");
  if (b.size() != n) throw DimensionError("solve_direct: rhs length mismatch");

  DenseMatrix lu = a;
  Vector x(b.begin(), b.end());

  Vector column_scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      column_scale[j] = std::max(column_scale[j], std::abs(a(i, j)));

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot_row = k;
    double pivot_mag = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > pivot_mag) {
        pivot_mag = std::abs(lu(i, k));
        pivot_row = i;
      }
    }
    if (pivot_mag == 0.0 || pivot_mag < kPivotTol * column_scale[k]) {
      throw SingularMatrixError("solve_direct: pivot " + std::to_string(pivot_mag) +
                                " in column " + std::to_string(k) +
                                " is singular to working precision");
    }
    if (pivot_row != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(pivot_row).begin());
      std::swap(x[k], x[pivot_row]);
    }
    const double pivot = lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) / pivot;
      if (factor == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= factor * lu(k, j);
      x[i] -= factor * x[k];
    }
  }

  for (std::size_t k = n; k-- > 0;) {
    double sum = x[k];
    for (std::size_t j = k + 1; j < n; ++j) sum -= lu(k, j) * x[j];
    x[k] = sum / lu(k, k);
  }
  return x;
}

SvdResult singular_values(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw DimensionError("singular_values: requires rows >= cols");

  // Columns of A and V stored contiguously (rows of the transposes).
  DenseMatrix u = a.transpose();
  DenseMatrix v = DenseMatrix::identity(n);

  double worst = 0.0;
  bool converged = false;
  for (int sweep = 0; sweep < kSvdMaxSweeps && !converged; ++sweep) {
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto up = u.row(p);
        auto uq = u.row(q);
        const double alpha = squared_norm(up);
        const double beta = squared_norm(uq);
        const double gamma = dot(up, uq);
        const double scale = std::sqrt(alpha) * std::sqrt(beta);
        if (scale == 0.0) continue;
        const double ratio = std::abs(gamma) / scale;
        worst = std::max(worst, ratio);
        if (ratio <= kSvdOrthogonalityTol) continue;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double xp = up[i];
          const double xq = uq[i];
          up[i] = c * xp - s * xq;
          uq[i] = s * xp + c * xq;
        }
        auto vp = v.row(p);
        auto vq = v.row(q);
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = vp[i];
          const double xq = vq[i];
          vp[i] = c * xp - s * xq;
          vq[i] = s * xp + c * xq;
        }
      }
    }
    converged = worst <= kSvdOrthogonalityTol;
  }
  if (!converged) {
    throw ConvergenceError("singular_values: Jacobi sweeps did not converge, residual " +
                               std::to_string(worst),
                           worst);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm(u.row(j));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  SvdResult out{Vector(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.singular_values[k] = sigma[order[k]];
    const auto vk = v.row(order[k]);
    for (std::size_t i = 0; i < n; ++i) out.right_vectors(i, k) = vk[i];
  }
  return out;
}

double inverse_operator_norm(const SvdResult& svd) {
  const double smax = svd.largest();
  const double smin = svd.smallest();
  if (smax == 0.0 || smin <= kInverseNormTol * smax) {
    throw SingularMatrixError("inverse_operator_norm: smallest singular value " +
                              std::to_string(smin) + " is negligible");
  }
  return 1.0 / smin;
}

double inverse_operator_norm(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("inverse_operator_norm: matrix must be square");
  return inverse_operator_norm(singular_values(a));
}

}  // namespace reflsolve
