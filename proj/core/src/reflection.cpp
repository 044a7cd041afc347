#include "reflsolve/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "reflsolve/errors.hpp"
#include "reflsolve/matrix_io.hpp"

namespace reflsolve {

namespace {

void require_row(std::span<const double> x, std::span<const double> a, double a_sq_norm) {
  if (x.size() != a.size()) throw DimensionError("row step: point and row lengths differ");
  if (!(a_sq_norm > 0.0)) throw ZeroRowError("row step: hyperplane normal has zero norm");
}

}  // namespace

LinearSystem::LinearSystem(DenseMatrix a, Vector b, std::optional<Vector> known_solution)
    : a_(std::move(a)), b_(std::move(b)), solution_(std::move(known_solution)) {
  if (a_.rows() != a_.cols()) throw DimensionError("LinearSystem: matrix must be square");
  if (b_.size() != a_.rows()) throw DimensionError("LinearSystem: rhs length mismatch");
  row_sq_norms_.resize(a_.rows());
  for (std::size_t i = 0; i < a_.rows(); ++i) {
    row_sq_norms_[i] = squared_norm(a_.row(i));
    if (!(row_sq_norms_[i] > 0.0)) {
      throw ZeroRowError("LinearSystem: row " + std::to_string(i) + " is zero");
    }
  }
  if (solution_) {
    if (solution_->size() != a_.cols()) {
      throw DimensionError("LinearSystem: known solution length mismatch");
    }
    const double residual = norm(subtract(matvec(a_, *solution_), b_));
    if (residual > 1e-8 * (1.0 + norm(b_))) {
      throw std::invalid_argument("LinearSystem: known solution has residual " +
                                  std::to_string(residual));
    }
  }
}

LinearSystem LinearSystem::from_solution(DenseMatrix a, Vector solution) {
  Vector b = matvec(a, solution);
  return LinearSystem(std::move(a), std::move(b), std::move(solution));
}

LinearSystem LinearSystem::homogeneous(DenseMatrix a) {
  const std::size_t n = a.cols();
  return LinearSystem(std::move(a), Vector(n, 0.0), Vector(n, 0.0));
}

RowSampler::RowSampler(std::span<const double> row_squared_norms) {
  if (row_squared_norms.empty()) throw DimensionError("RowSampler: no rows");
  cumulative_.resize(row_squared_norms.size());
  double total = 0.0;
  for (std::size_t i = 0; i < row_squared_norms.size(); ++i) {
    if (!(row_squared_norms[i] > 0.0)) {
      throw ZeroRowError("RowSampler: row " + std::to_string(i) + " has zero weight");
    }
    total += row_squared_norms[i];
    cumulative_[i] = total;
  }
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

double RowSampler::probability(std::size_t i) const {
  return i == 0 ? cumulative_[0] : cumulative_[i] - cumulative_[i - 1];
}

std::size_t RowSampler::sample(RngStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(idx, cumulative_.size() - 1);
}

void reflect_in_place(std::span<double> x, std::span<const double> a, double b_i,
                      double a_sq_norm) {
  require_row(x, a, a_sq_norm);
  const double coeff = 2.0 * (b_i - dot(x, a)) / a_sq_norm;
  axpy(coeff, a, x);
}

void project_in_place(std::span<double> x, std::span<const double> a, double b_i,
                      double a_sq_norm) {
  require_row(x, a, a_sq_norm);
  const double coeff = (b_i - dot(x, a)) / a_sq_norm;
  axpy(coeff, a, x);
}

Vector reflect_step(std::span<const double> x, std::span<const double> a, double b_i) {
  Vector out(x.begin(), x.end());
  reflect_in_place(out, a, b_i, squared_norm(a));
  return out;
}

Vector kaczmarz_step(std::span<const double> x, std::span<const double> a, double b_i) {
  Vector out(x.begin(), x.end());
  project_in_place(out, a, b_i, squared_norm(a));
  return out;
}

Vector cimmino_step(std::span<const double> x, const LinearSystem& system, double lambda) {
  const std::size_t n = system.size();
  if (x.size() != n) throw DimensionError("cimmino_step: point length mismatch");
  const DenseMatrix& a = system.matrix();
  Vector update(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double coeff = (system.rhs()[i] - dot(x, a.row(i))) / system.row_squared_norm(i);
    axpy(coeff, a.row(i), update);
  }
  Vector out(x.begin(), x.end());
  axpy(lambda / static_cast<double>(n), update, out);
  return out;
}

ReflectionTrace run_reflections(const LinearSystem& system, std::span<const double> x1,
                                std::size_t steps, std::size_t thinning, RngStream& rng) {
  if (steps < 1) throw ConfigError("run_reflections: steps must be >= 1");
  if (thinning < 1) throw ConfigError("run_reflections: thinning must be >= 1");
  if (x1.size() != system.size()) throw DimensionError("run_reflections: x1 length mismatch");

  const RowSampler sampler(system);
  const DenseMatrix& a = system.matrix();

  ReflectionTrace trace;
  trace.thinning = thinning;
  trace.seed = rng.seed();
  trace.points.reserve(steps / thinning + 1);
  trace.points.emplace_back(x1.begin(), x1.end());

  Vector x(x1.begin(), x1.end());
  for (std::size_t k = 1; k <= steps; ++k) {
    const std::size_t i = sampler.sample(rng);
    reflect_in_place(x, a.row(i), system.rhs()[i], system.row_squared_norm(i));
    if (k % thinning == 0) trace.points.push_back(x);
  }
  return trace;
}

Vector average_estimate(const ReflectionTrace& trace) {
  if (trace.points.empty()) throw std::invalid_argument("average_estimate: empty trace");
  Vector mean(trace.points.front().size(), 0.0);
  for (const Vector& p : trace.points) axpy(1.0, p, mean);
  for (double& v : mean) v /= static_cast<double>(trace.points.size());
  return mean;
}

std::size_t default_epoch_length(const DenseMatrix& a) {
  const double kappa = squared_frobenius_norm(a) * std::pow(inverse_operator_norm(a), 2);
  return 4 * static_cast<std::size_t>(std::ceil(kappa));
}

Vector restarted_solve(const LinearSystem& system, std::span<const double> x1,
                       std::size_t steps_per_epoch, std::size_t epochs, RngStream& rng) {
  if (epochs < 1) throw ConfigError("restarted_solve: epochs must be >= 1");
  if (steps_per_epoch < 1) throw ConfigError("restarted_solve: steps_per_epoch must be >= 1");
  if (x1.size() != system.size()) throw DimensionError("restarted_solve: x1 length mismatch");
  const RowSampler sampler(system);
  const DenseMatrix& a = system.matrix();
  const double count = static_cast<double>(steps_per_epoch + 1);

  // Same summation order as average_estimate over a full trace, without
  // storing the iterates.
  Vector x(x1.begin(), x1.end());
  Vector sum(x.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    std::fill(sum.begin(), sum.end(), 0.0);
    axpy(1.0, x, sum);
    for (std::size_t k = 0; k < steps_per_epoch; ++k) {
      const std::size_t i = sampler.sample(rng);
      reflect_in_place(x, a.row(i), system.rhs()[i], system.row_squared_norm(i));
      axpy(1.0, x, sum);
    }
    for (double& v : sum) v /= count;
    x = sum;
  }
  return x;
}

KaczmarzResult randomized_kaczmarz_solve(const LinearSystem& system, std::span<const double> x1,
                                         std::size_t steps, RngStream& rng) {
  if (steps < 1) throw ConfigError("randomized_kaczmarz_solve: steps must be >= 1");
  if (x1.size() != system.size()) {
    throw DimensionError("randomized_kaczmarz_solve: x1 length mismatch");
  }
  const RowSampler sampler(system);
  const DenseMatrix& a = system.matrix();
  const auto& solution = system.known_solution();

  KaczmarzResult result{Vector(x1.begin(), x1.end()), {}};
  Vector& x = result.solution;
  if (solution) {
    result.squared_errors.reserve(steps + 1);
    result.squared_errors.push_back(squared_norm(subtract(x, *solution)));
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t i = sampler.sample(rng);
    project_in_place(x, a.row(i), system.rhs()[i], system.row_squared_norm(i));
    if (solution) result.squared_errors.push_back(squared_norm(subtract(x, *solution)));
  }
  return result;
}

void write_trace_csv(std::ostream& out, const ReflectionTrace& trace) {
  const std::size_t n = trace.points.empty() ? 0 : trace.points.front().size();
  out << "step";
  for (std::size_t j = 0; j < n; ++j) out << ",coord_" << j;
  out << '\n';
  for (std::size_t k = 0; k < trace.points.size(); ++k) {
    out << k * trace.thinning;
    for (double v : trace.points[k]) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace reflsolve
