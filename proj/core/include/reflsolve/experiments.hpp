#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reflsolve/linalg.hpp"
#include "reflsolve/reflection.hpp"
#include "reflsolve/rng.hpp"
#include "reflsolve/stats.hpp"

namespace reflsolve {

enum class ReportFormat { csv, json };

/// How the sphere experiment places the system and its starting point.
enum class StartRule {
  /// b ~ N(0, I), x* = A⁻¹b, and every run starts at the origin.
  origin,
  /// x* ~ N(0, I), b = Ax*, and x1 = x* + u with u uniform on the unit sphere.
  unit_random,
};

struct ExperimentConfig {
  std::size_t n = 50;
  std::size_t num_matrices = 100;
  std::size_t steps = 5000;
  std::size_t thinning = 25;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::string output_path;  ///< empty means stdout
  ReportFormat format = ReportFormat::json;
  StartRule start = StartRule::origin;
  /// Worker threads for independent units; 0 picks hardware concurrency.
  /// Results do not depend on this value.
  std::size_t workers = 0;

  /// Throws ConfigError when a count is zero or n < 2.
  void validate() const;
  /// Additionally requires steps/thinning >= n + 1 retained points.
  void validate_for_sphere() const;
};

/// I.i.d. N(0,1) entries, then every row scaled to unit norm (a row that comes
/// out exactly zero is redrawn). ‖A‖²_F = n.
DenseMatrix gen_gaussian_row_normalized(std::size_t n, RngStream& rng);

// ---------------------------------------------------------------------------
// Sphere conditioning

struct SphereConditioningRecord {
  std::size_t matrix_index = 0;
  double inv_frob_cond_a = 0.0;  ///< 1/(‖A⁻¹‖‖A‖_F)
  double inv_frob_cond_b = 0.0;  ///< 1/(‖B⁻¹‖‖B‖_F)
  double cond_a = 0.0;           ///< σ_max/σ_min of A
  double cond_b = 0.0;           ///< σ_max/σ_min of B
  /// ‖center_via_thales − x*‖ / ‖x1 − x*‖
  double center_error = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string initial_point_rule;
  std::vector<SphereConditioningRecord> records;
  std::size_t skipped = 0;
  SampleSummary inv_frob_cond_a;
  SampleSummary inv_frob_cond_b;
  SampleSummary cond_a;
  SampleSummary cond_b;
  SampleSummary center_error;
};

/// Per matrix: draw the system and start per `config.start`, run `steps`
/// reflections, keep every `thinning`-th iterate after the start, and condition
/// the Thales matrix of those points. Degenerate clouds are skipped and counted.
ExperimentReport experiment_sphere_conditioning(const ExperimentConfig& config);

/// One matrix of the sphere experiment; exposed for inspection and tests.
SphereConditioningRecord sphere_conditioning_unit(const ExperimentConfig& config,
                                                  std::size_t matrix_index);

// ---------------------------------------------------------------------------
// Averaging rate

struct AveragingRateRow {
  std::size_t m = 0;
  SampleSummary error;  ///< ‖x* − mean of first m iterates‖
  double bound = 0.0;   ///< (1 + ‖A‖_F‖A⁻¹‖)/√m · ‖x* − x_1‖
  bool passed() const { return error.mean <= bound + 3.0 * error.standard_error; }
};

struct AveragingRateTable {
  ExperimentConfig config;
  double frobenius_norm = 0.0;
  double inverse_norm = 0.0;
  double initial_distance = 0.0;
  std::vector<AveragingRateRow> rows;
};

/// 1, 10, 100, ... up to and including the largest power of ten <= max_m.
std::vector<std::size_t> geometric_grid(std::size_t max_m);

/// Each trial runs one trajectory of max(grid) − 1 reflections from x1 and
/// reads every grid point off the running prefix mean.
AveragingRateTable averaging_rate_curve(const LinearSystem& system, std::span<const double> x1,
                                        std::span<const std::size_t> grid, std::size_t trials,
                                        std::uint64_t seed, std::size_t workers = 0);

/// Row-normalized Gaussian n x n system with x* ~ N(0, I) and x1 at unit
/// distance; grid up to config.steps.
AveragingRateTable experiment_averaging_rate(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Method comparison

struct MethodResult {
  std::string method;
  std::size_t row_touches = 0;
  SampleSummary error;
  SampleSummary squared_error;
};

struct MethodComparison {
  ExperimentConfig config;
  std::size_t budget = 0;  ///< requested budget rounded down to a multiple of n
  std::size_t epoch_length = 0;
  double initial_distance = 0.0;
  /// (1 − 1/(‖A‖²_F‖A⁻¹‖²))^budget · ‖x1 − x*‖²
  double kaczmarz_bound = 0.0;
  std::vector<MethodResult> methods;

  const MethodResult& find(const std::string& name) const;
  bool kaczmarz_within_bound() const;
};

/// Restarted reflection averaging, randomized Kaczmarz and Cimmino (λ = 1, 2)
/// under the same number of row inner products. One Cimmino sweep costs n.
MethodComparison compare_methods(const LinearSystem& system, std::span<const double> x1,
                                 std::size_t budget, std::size_t trials, std::uint64_t seed,
                                 std::size_t workers = 0);

/// config.steps is the row-touch budget.
MethodComparison experiment_method_comparison(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Serialization

void to_json(nlohmann::json& j, const ExperimentConfig& config);
void to_json(nlohmann::json& j, const ExperimentReport& report);
void to_json(nlohmann::json& j, const AveragingRateTable& table);
void to_json(nlohmann::json& j, const MethodComparison& table);

void write_csv(std::ostream& out, const ExperimentReport& report);
void write_csv(std::ostream& out, const AveragingRateTable& table);
void write_csv(std::ostream& out, const MethodComparison& table);

/// JSON (indented) or CSV, by `format`.
template <typename Report>
void emit_report(const Report& report, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::json) {
    out << nlohmann::json(report).dump(2) << '\n';
  } else {
    write_csv(out, report);
  }
}

}  // namespace reflsolve
