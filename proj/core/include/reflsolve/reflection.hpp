#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>

#include "reflsolve/linalg.hpp"
#include "reflsolve/rng.hpp"

namespace reflsolve {

/// Square system Ax = b. Every row must be nonzero; `known_solution`, when
/// present, must satisfy ‖A·x* − b‖ <= 1e-8·(1 + ‖b‖).
class LinearSystem {
 public:
  LinearSystem(DenseMatrix a, Vector b, std::optional<Vector> known_solution = std::nullopt);

  /// b = A·x*, with x* recorded as the known solution.
  static LinearSystem from_solution(DenseMatrix a, Vector solution);
  /// The homogeneous problem (A, 0), whose known solution is 0.
  static LinearSystem homogeneous(DenseMatrix a);

  const DenseMatrix& matrix() const noexcept { return a_; }
  const Vector& rhs() const noexcept { return b_; }
  const std::optional<Vector>& known_solution() const noexcept { return solution_; }
  std::size_t size() const noexcept { return a_.rows(); }

  /// ‖a_i‖², cached.
  double row_squared_norm(std::size_t i) const { return row_sq_norms_[i]; }
  std::span<const double> row_squared_norms() const noexcept { return row_sq_norms_; }

 private:
  DenseMatrix a_;
  Vector b_;
  std::optional<Vector> solution_;
  Vector row_sq_norms_;
};

/// Draws row i with probability ‖a_i‖²/‖A‖²_F by inverse-CDF binary search.
class RowSampler {
 public:
  explicit RowSampler(std::span<const double> row_squared_norms);
  explicit RowSampler(const LinearSystem& system) : RowSampler(system.row_squared_norms()) {}

  std::span<const double> cumulative() const noexcept { return cumulative_; }
  double probability(std::size_t i) const;
  std::size_t size() const noexcept { return cumulative_.size(); }

  std::size_t sample(RngStream& rng) const;

 private:
  Vector cumulative_;
};

inline std::size_t sample_row(const RowSampler& sampler, RngStream& rng) {
  return sampler.sample(rng);
}

/// Retained iterates of a reflection run: points[0] is the starting point,
/// then every `thinning`-th iterate.
struct ReflectionTrace {
  std::vector<Vector> points;
  std::size_t thinning = 1;
  std::uint64_t seed = 0;
};

/// x + 2·((b_i − ⟨x,a⟩)/‖a‖²)·a, the mirror image of x through ⟨a,·⟩ = b_i.
Vector reflect_step(std::span<const double> x, std::span<const double> a, double b_i);
/// x + ((b_i − ⟨x,a⟩)/‖a‖²)·a, the orthogonal projection onto ⟨a,·⟩ = b_i.
Vector kaczmarz_step(std::span<const double> x, std::span<const double> a, double b_i);
/// x + (λ/n)·Σ_i ((b_i − ⟨x,a_i⟩)/‖a_i‖²)·a_i.
Vector cimmino_step(std::span<const double> x, const LinearSystem& system, double lambda);

/// In-place variants used by the iteration loops. `a_sq_norm` is ‖a‖².
void reflect_in_place(std::span<double> x, std::span<const double> a, double b_i,
                      double a_sq_norm);
void project_in_place(std::span<double> x, std::span<const double> a, double b_i,
                      double a_sq_norm);

/// Performs `steps` random reflections starting at x1 and keeps x1 plus every
/// `thinning`-th iterate.
ReflectionTrace run_reflections(const LinearSystem& system, std::span<const double> x1,
                                std::size_t steps, std::size_t thinning, RngStream& rng);

/// Arithmetic mean of the retained points.
Vector average_estimate(const ReflectionTrace& trace);

/// Epoch length 4·⌈‖A‖²_F‖A⁻¹‖²⌉, after which one averaging epoch halves the
/// error bound.
std::size_t default_epoch_length(const DenseMatrix& a);

/// Runs `epochs` reflection epochs of `steps_per_epoch` steps, restarting each
/// from the average of the previous one. Returns the final average.
Vector restarted_solve(const LinearSystem& system, std::span<const double> x1,
                       std::size_t steps_per_epoch, std::size_t epochs, RngStream& rng);

struct KaczmarzResult {
  Vector solution;
  /// ‖x_k − x*‖² for k = 0..steps; empty without a known solution.
  Vector squared_errors;
};

KaczmarzResult randomized_kaczmarz_solve(const LinearSystem& system, std::span<const double> x1,
                                         std::size_t steps, RngStream& rng);

/// CSV with header "step,coord_0,...,coord_{n-1}"; `step` is the iterate index
/// (0 for the starting point, then multiples of the thinning stride).
void write_trace_csv(std::ostream& out, const ReflectionTrace& trace);

}  // namespace reflsolve
