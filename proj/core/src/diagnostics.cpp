#include "reflsolve/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "reflsolve/errors.hpp"
#include "reflsolve/parallel.hpp"
#include "reflsolve/stats.hpp"

namespace reflsolve {

namespace {

constexpr double kIdentityTol = 1e-12;

void require_trials(std::size_t trials, const char* who) {
  if (trials < 100) throw ConfigError(std::string(who) + ": at least 100 trials required");
}

// Mean of the first m iterates x_1..x_m of one random reflection run.
Vector mean_of_first_iterates(const LinearSystem& system, std::span<const double> x1,
                              std::size_t m, RngStream& rng) {
  if (m <= 1) return Vector(x1.begin(), x1.end());
  return average_estimate(run_reflections(system, x1, m - 1, 1, rng));
}

}  // namespace

Vector ExpectationOperator::apply_power(std::span<const double> x, std::size_t k) const {
  Vector y(x.begin(), x.end());
  for (std::size_t i = 0; i < k; ++i) y = matvec(m, y);
  return y;
}

Vector enumerated_expected_reflection(const DenseMatrix& a, std::span<const double> x) {
  const double fro_sq = squared_frobenius_norm(a);
  Vector expected(x.size(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    const double row_sq = squared_norm(row);
    if (!(row_sq > 0.0)) throw ZeroRowError("enumerated_expected_reflection: zero row");
    Vector reflected(x.begin(), x.end());
    reflect_in_place(reflected, row, 0.0, row_sq);
    axpy(row_sq / fro_sq, reflected, expected);
  }
  return expected;
}

ExpectationOperator expectation_operator(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("expectation_operator: matrix must be square");
  const std::size_t n = a.cols();
  const double fro_sq = squared_frobenius_norm(a);
  DenseMatrix m = gram(a);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) *= -2.0 / fro_sq;
    m(i, i) += 1.0;
  }

  ExpectationOperator op{std::move(m), fro_sq, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1.0;
    const double r = distance(enumerated_expected_reflection(a, e), op.apply(e));
    op.identity_residual = std::max(op.identity_residual, r);
  }
  if (op.identity_residual > kIdentityTol) {
    throw std::logic_error("expectation_operator: enumerated expectation differs from M by " +
                           std::to_string(op.identity_residual));
  }
  return op;
}

double decorrelation_rate(const DenseMatrix& a) {
  const double inv = inverse_operator_norm(a);
  return 1.0 - 2.0 / (squared_frobenius_norm(a) * inv * inv);
}

std::vector<ModeComparison> singular_mode_decay_check(const DenseMatrix& a,
                                                      std::span<const double> x, std::size_t k) {
  const SvdResult svd = singular_values(a);
  if (svd.smallest() <= 1e-13 * svd.largest()) {
    throw SingularMatrixError("singular_mode_decay_check: matrix is not invertible");
  }
  const ExpectationOperator op = expectation_operator(a);
  const Vector mkx = op.apply_power(x, k);

  std::vector<ModeComparison> modes;
  modes.reserve(svd.singular_values.size());
  for (std::size_t l = 0; l < svd.singular_values.size(); ++l) {
    const Vector v = svd.right_vector(l);
    const double sigma = svd.singular_values[l];
    const double factor = 1.0 - 2.0 * sigma * sigma / op.squared_frobenius;
    modes.push_back(ModeComparison{
        .mode = l,
        .singular_value = sigma,
        .operator_projection = dot(mkx, v),
        .predicted_projection = std::pow(factor, static_cast<double>(k)) * dot(x, v),
    });
  }
  return modes;
}

double max_relative_mode_error(std::span<const ModeComparison> modes, std::span<const double> x) {
  const double scale = norm(x);
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& m : modes) {
    worst = std::max(worst, std::abs(m.operator_projection - m.predicted_projection));
  }
  return worst / scale;
}

double rayleigh_identity_check(const DenseMatrix& a, std::span<const double> x) {
  const ExpectationOperator op = expectation_operator(a);
  const double lhs = dot(op.apply(x), x);
  const double rhs = squared_norm(x) - 2.0 / op.squared_frobenius * squared_norm(matvec(a, x));
  return std::abs(lhs - rhs);
}

SpectrumCheck spectrum_check(const DenseMatrix& a) {
  const SvdResult svd = singular_values(a);
  const ExpectationOperator op = expectation_operator(a);
  const double fro_sq = op.squared_frobenius;

  double lo = 1.0;
  double hi = -1.0;
  for (std::size_t l = 0; l < svd.singular_values.size(); ++l) {
    const Vector v = svd.right_vector(l);
    const double lambda = dot(op.apply(v), v);
    lo = std::min(lo, lambda);
    hi = std::max(hi, lambda);
  }
  const double s1 = svd.largest();
  const double sn = svd.smallest();

  SpectrumCheck out{};
  out.min_eigenvalue = lo;
  out.max_eigenvalue = hi;
  out.operator_norm = singular_values(op.m).largest();
  out.norm_bound = 1.0 - 2.0 * sn * sn / fro_sq;
  out.reduction_lhs = 2.0 * s1 * s1 / fro_sq - 1.0;
  out.eigenvalues_in_unit_interval = lo >= -1.0 - kIdentityTol && hi <= 1.0 + kIdentityTol;
  out.norm_within_bound = out.operator_norm <= out.norm_bound + 1e-10;
  out.reduction_holds = out.reduction_lhs <= out.norm_bound + kIdentityTol;
  return out;
}

SmallModeCheck small_mode_rayleigh_check(const DenseMatrix& a, double epsilon, RngStream& rng) {
  const SvdResult svd = singular_values(a);
  const double fro_sq = squared_frobenius_norm(a);
  const std::size_t n = svd.singular_values.size();

  Vector x(a.cols(), 0.0);
  std::size_t used = 0;
  for (std::size_t l = 0; l < n; ++l) {
    const double s = svd.singular_values[l];
    if (s * s > epsilon * fro_sq) continue;
    axpy(rng.normal(), svd.right_vector(l), x);
    ++used;
  }
  if (used == 0) {
    throw std::invalid_argument("small_mode_rayleigh_check: no singular value below threshold");
  }
  x = scale(1.0 / norm(x), x);
  const ExpectationOperator op = expectation_operator(a);
  return SmallModeCheck{used, dot(op.apply(x), x), 1.0 - 2.0 * epsilon};
}

void to_json(nlohmann::json& j, const BoundCheck& check) {
  j = nlohmann::json{{"empirical_mean", check.empirical_mean},
                     {"standard_error", check.standard_error},
                     {"bound_value", check.bound_value},
                     {"trials", check.trials},
                     {"pass", check.passed()}};
}

bool DecorrelationCheck::agrees_with_exact() const {
  // Samples are identical when every row acts the same way on x; allow
  // rounding in that zero-variance case.
  const double slack = 1e-12 * std::max(1.0, std::abs(exact_value));
  return std::abs(signed_mean - exact_value) <= 4.0 * bound.standard_error + slack;
}

void to_json(nlohmann::json& j, const DecorrelationCheck& check) {
  j = check.bound;
  j["signed_mean"] = check.signed_mean;
  j["exact_value"] = check.exact_value;
  j["agrees_with_exact"] = check.agrees_with_exact();
  j["pass"] = check.passed();
}

DecorrelationCheck decorrelation_bound_check(const DenseMatrix& a, std::span<const double> x,
                                             std::size_t k, std::size_t trials, RngStream& rng) {
  require_trials(trials, "decorrelation_bound_check");
  const LinearSystem homogeneous = LinearSystem::homogeneous(a);
  const RowSampler sampler(homogeneous);
  const std::uint64_t master = rng.next_u64();

  const Vector samples = parallel_map(trials, [&](std::size_t t) {
    RngStream trial_rng = RngStream::derive(master, t);
    Vector y(x.begin(), x.end());
    for (std::size_t step = 0; step < k; ++step) {
      const std::size_t i = sampler.sample(trial_rng);
      reflect_in_place(y, a.row(i), 0.0, homogeneous.row_squared_norm(i));
    }
    return dot(x, y);
  });
  const SampleSummary summary = summarize(samples);

  const ExpectationOperator op = expectation_operator(a);
  const double q = decorrelation_rate(a);

  DecorrelationCheck out{};
  out.bound = BoundCheck{
      .empirical_mean = std::abs(summary.mean),
      .standard_error = summary.standard_error,
      .bound_value = std::pow(q, static_cast<double>(k)) * squared_norm(x),
      .trials = trials,
  };
  out.signed_mean = summary.mean;
  out.exact_value = dot(x, op.apply_power(x, k));
  return out;
}

double averaging_bound(const DenseMatrix& a, std::size_t m, double initial_distance) {
  const double kappa = frobenius_norm(a) * inverse_operator_norm(a);
  return (1.0 + kappa) / std::sqrt(static_cast<double>(m)) * initial_distance;
}

BoundCheck averaging_bound_check(const LinearSystem& system, std::span<const double> x1,
                                std::size_t m, std::size_t trials, RngStream& rng) {
  require_trials(trials, "averaging_bound_check");
  if (m < 1) throw ConfigError("averaging_bound_check: m must be >= 1");
  const auto& solution = system.known_solution();
  if (!solution) throw ConfigError("averaging_bound_check: system needs a known solution");

  const std::uint64_t master = rng.next_u64();
  const Vector errors = parallel_map(trials, [&](std::size_t t) {
    RngStream trial_rng = RngStream::derive(master, t);
    return distance(*solution, mean_of_first_iterates(system, x1, m, trial_rng));
  });
  const SampleSummary summary = summarize(errors);
  return BoundCheck{
      .empirical_mean = summary.mean,
      .standard_error = summary.standard_error,
      .bound_value = averaging_bound(system.matrix(), m, distance(*solution, x1)),
      .trials = trials,
  };
}

}  // namespace reflsolve
