#include "reflsolve/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "reflsolve/diagnostics.hpp"
#include "reflsolve/errors.hpp"
#include "reflsolve/matrix_io.hpp"
#include "reflsolve/parallel.hpp"
#include "reflsolve/sphere.hpp"

namespace reflsolve {

namespace {

const char* start_rule_text(StartRule rule) {
  return rule == StartRule::origin
             ? "b ~ N(0, I), x* = A^-1 b, x1 = 0 for every matrix"
             : "x* ~ N(0, I), b = A x*, x1 = x* + u with u uniform on the unit sphere";
}

const char* start_rule_name(StartRule rule) {
  return rule == StartRule::origin ? "origin" : "unit";
}

nlohmann::json summary_json(const SampleSummary& s) {
  return {{"mean", s.mean}, {"stderr", s.standard_error}, {"count", s.count}};
}

const char* format_name(ReportFormat f) { return f == ReportFormat::csv ? "csv" : "json"; }

// x* ~ N(0, I) and x1 at unit distance from it.
struct Problem {
  LinearSystem system;
  Vector x1;
};

Problem draw_problem(DenseMatrix a, RngStream& rng) {
  const std::size_t n = a.cols();
  Vector solution = rng.normal_vector(n);
  Vector x1 = add(solution, rng.unit_vector(n));
  return Problem{LinearSystem::from_solution(std::move(a), std::move(solution)), std::move(x1)};
}

Problem draw_problem(DenseMatrix a, RngStream& rng, StartRule rule) {
  if (rule == StartRule::unit_random) return draw_problem(std::move(a), rng);
  const std::size_t n = a.cols();
  Vector b = rng.normal_vector(n);
  Vector solution = solve_direct(a, b);
  return Problem{LinearSystem(std::move(a), std::move(b), std::move(solution)), Vector(n, 0.0)};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("n must be >= 2");
  if (num_matrices < 1) throw ConfigError("matrices must be >= 1");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (thinning < 1) throw ConfigError("thinning must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
}

void ExperimentConfig::validate_for_sphere() const {
  validate();
  if (steps / thinning < n + 1) {
    throw ConfigError("steps/thin must leave at least n+1 = " + std::to_string(n + 1) +
                      " retained points, got " + std::to_string(steps / thinning));
  }
}

DenseMatrix gen_gaussian_row_normalized(std::size_t n, RngStream& rng) {
  if (n < 2) throw ConfigError("gen_gaussian_row_normalized: n must be >= 2");
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = a.row(i);
    double len = 0.0;
    while (len == 0.0) {
      for (double& v : row) v = rng.normal();
      len = norm(row);
    }
    for (double& v : row) v /= len;
  }
  return a;
}

// ---------------------------------------------------------------------------

SphereConditioningRecord sphere_conditioning_unit(const ExperimentConfig& config,
                                                  std::size_t matrix_index) {
  RngStream rng = RngStream::derive(config.seed, matrix_index);
  DenseMatrix a = gen_gaussian_row_normalized(config.n, rng);
  const SvdResult svd_a = singular_values(a);
  Problem problem = draw_problem(std::move(a), rng, config.start);
  const Vector& solution = *problem.system.known_solution();

  const ReflectionTrace trace =
      run_reflections(problem.system, problem.x1, config.steps, config.thinning, rng);
  const PointCloud cloud(std::vector<Vector>(trace.points.begin() + 1, trace.points.end()));
  const ThalesSystem thales = build_thales_system(cloud);
  const ConditioningReport cond_b = conditioning_report(thales.b);
  const Vector center = center_via_thales(cloud);

  const double fro_a = frobenius_norm(problem.system.matrix());
  return SphereConditioningRecord{
      .matrix_index = matrix_index,
      .inv_frob_cond_a = svd_a.smallest() / fro_a,
      .inv_frob_cond_b = cond_b.inverse_frobenius_condition,
      .cond_a = svd_a.largest() / svd_a.smallest(),
      .cond_b = cond_b.condition_number,
      .center_error = distance(center, solution) / distance(problem.x1, solution),
  };
}

ExperimentReport experiment_sphere_conditioning(const ExperimentConfig& config) {
  config.validate_for_sphere();
  const auto units = parallel_map(
      config.num_matrices,
      [&](std::size_t i) -> std::optional<SphereConditioningRecord> {
        try {
          return sphere_conditioning_unit(config, i);
        } catch (const DegenerateCloudError&) {
          return std::nullopt;
        }
      },
      config.workers);

  ExperimentReport report;
  report.config = config;
  report.initial_point_rule = start_rule_text(config.start);
  for (const auto& u : units) {
    if (u) {
      report.records.push_back(*u);
    } else {
      ++report.skipped;
    }
  }

  auto column = [&](double SphereConditioningRecord::*field) {
    Vector v;
    v.reserve(report.records.size());
    for (const auto& r : report.records) v.push_back(r.*field);
    return summarize(v);
  };
  report.inv_frob_cond_a = column(&SphereConditioningRecord::inv_frob_cond_a);
  report.inv_frob_cond_b = column(&SphereConditioningRecord::inv_frob_cond_b);
  report.cond_a = column(&SphereConditioningRecord::cond_a);
  report.cond_b = column(&SphereConditioningRecord::cond_b);
  report.center_error = column(&SphereConditioningRecord::center_error);
  return report;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> geometric_grid(std::size_t max_m) {
  std::vector<std::size_t> grid;
  for (std::size_t m = 1; m <= max_m; m *= 10) {
    grid.push_back(m);
    if (m > max_m / 10) break;
  }
  return grid;
}

AveragingRateTable averaging_rate_curve(const LinearSystem& system, std::span<const double> x1,
                                        std::span<const std::size_t> grid, std::size_t trials,
                                        std::uint64_t seed, std::size_t workers) {
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()) || grid.front() < 1) {
    throw ConfigError("averaging_rate_curve: grid must be sorted and start at >= 1");
  }
  if (trials < 1) throw ConfigError("averaging_rate_curve: trials must be >= 1");
  const auto& solution = system.known_solution();
  if (!solution) throw ConfigError("averaging_rate_curve: system needs a known solution");

  const RowSampler sampler(system);
  const DenseMatrix& a = system.matrix();
  const std::size_t max_m = grid.back();

  // errors[t][g] = ‖x* − mean of first grid[g] iterates‖ for trial t
  const auto errors = parallel_map(
      trials,
      [&](std::size_t t) {
        RngStream rng = RngStream::derive(seed, t);
        Vector x(x1.begin(), x1.end());
        Vector sum = x;
        std::vector<double> out;
        out.reserve(grid.size());
        std::size_t g = 0;
        for (std::size_t m = 1;; ++m) {
          while (g < grid.size() && grid[g] == m) {
            out.push_back(distance(*solution, scale(1.0 / static_cast<double>(m), sum)));
            ++g;
          }
          if (m == max_m) break;
          const std::size_t i = sampler.sample(rng);
          reflect_in_place(x, a.row(i), system.rhs()[i], system.row_squared_norm(i));
          axpy(1.0, x, sum);
        }
        return out;
      },
      workers);

  AveragingRateTable table;
  table.frobenius_norm = frobenius_norm(a);
  table.inverse_norm = inverse_operator_norm(a);
  table.initial_distance = distance(*solution, x1);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    Vector column(trials);
    for (std::size_t t = 0; t < trials; ++t) column[t] = errors[t][g];
    table.rows.push_back(AveragingRateRow{
        .m = grid[g],
        .error = summarize(column),
        .bound = averaging_bound(a, grid[g], table.initial_distance),
    });
  }
  return table;
}

AveragingRateTable experiment_averaging_rate(const ExperimentConfig& config) {
  config.validate();
  RngStream rng = RngStream::derive(config.seed, 0);
  Problem problem = draw_problem(gen_gaussian_row_normalized(config.n, rng), rng);
  const auto grid = geometric_grid(config.steps);
  AveragingRateTable table = averaging_rate_curve(problem.system, problem.x1, grid, config.trials,
                                                  mix_seed(config.seed + 1), config.workers);
  table.config = config;
  return table;
}

// ---------------------------------------------------------------------------

const MethodResult& MethodComparison::find(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.method == name) return m;
  }
  throw std::out_of_range("MethodComparison: no method " + name);
}

bool MethodComparison::kaczmarz_within_bound() const {
  const auto& k = find("kaczmarz");
  return k.squared_error.mean <= kaczmarz_bound + 3.0 * k.squared_error.standard_error +
                                     1e-12 * kaczmarz_bound;
}

MethodComparison compare_methods(const LinearSystem& system, std::span<const double> x1,
                                 std::size_t budget, std::size_t trials, std::uint64_t seed,
                                 std::size_t workers) {
  if (trials < 1) throw ConfigError("compare_methods: trials must be >= 1");
  const auto& solution = system.known_solution();
  if (!solution) throw ConfigError("compare_methods: system needs a known solution");
  const std::size_t n = system.size();
  const DenseMatrix& a = system.matrix();

  MethodComparison out;
  out.budget = budget / n * n;
  out.epoch_length = default_epoch_length(a);
  out.initial_distance = distance(*solution, x1);
  const double inv = inverse_operator_norm(a);
  const double rate = 1.0 - 1.0 / (squared_frobenius_norm(a) * inv * inv);
  out.kaczmarz_bound =
      std::pow(rate, static_cast<double>(out.budget)) * out.initial_distance * out.initial_distance;

  struct TrialErrors {
    double reflection;
    double kaczmarz;
  };
  const auto per_trial = parallel_map(
      trials,
      [&](std::size_t t) {
        Vector x(x1.begin(), x1.end());
        RngStream reflect_rng = RngStream::derive(seed, 2 * t);
        for (std::size_t done = 0; done < out.budget;) {
          const std::size_t len = std::min(out.epoch_length, out.budget - done);
          x = restarted_solve(system, x, len, 1, reflect_rng);
          done += len;
        }
        Vector xk(x1.begin(), x1.end());
        if (out.budget > 0) {
          RngStream kaczmarz_rng = RngStream::derive(seed, 2 * t + 1);
          xk = randomized_kaczmarz_solve(system, x1, out.budget, kaczmarz_rng).solution;
        }
        return TrialErrors{distance(x, *solution), distance(xk, *solution)};
      },
      workers);

  auto collect = [&](std::string name, auto pick) {
    Vector err(trials);
    Vector sq(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      err[t] = pick(per_trial[t]);
      sq[t] = err[t] * err[t];
    }
    return MethodResult{std::move(name), out.budget, summarize(err), summarize(sq)};
  };
  out.methods.push_back(collect("reflection_restart", [](const TrialErrors& e) { return e.reflection; }));
  out.methods.push_back(collect("kaczmarz", [](const TrialErrors& e) { return e.kaczmarz; }));

  // Cimmino is deterministic, so every trial sees the same error.
  for (double lambda : {1.0, 2.0}) {
    Vector x(x1.begin(), x1.end());
    for (std::size_t sweep = 0; sweep < out.budget / n; ++sweep) x = cimmino_step(x, system, lambda);
    const double err = distance(x, *solution);
    const Vector errs(trials, err);
    const Vector sqs(trials, err * err);
    out.methods.push_back(MethodResult{lambda == 1.0 ? "cimmino_lambda1" : "cimmino_lambda2",
                                       out.budget / n * n, summarize(errs), summarize(sqs)});
  }
  return out;
}

MethodComparison experiment_method_comparison(const ExperimentConfig& config) {
  config.validate();
  RngStream rng = RngStream::derive(config.seed, 0);
  Problem problem = draw_problem(gen_gaussian_row_normalized(config.n, rng), rng);
  MethodComparison table = compare_methods(problem.system, problem.x1, config.steps, config.trials,
                                           mix_seed(config.seed + 1), config.workers);
  table.config = config;
  return table;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"n", c.n},         {"matrices", c.num_matrices}, {"steps", c.steps},
                     {"thin", c.thinning}, {"trials", c.trials},       {"seed", c.seed},
                     {"format", format_name(c.format)}, {"start", start_rule_name(c.start)}};
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"matrix", rec.matrix_index},
                       {"inv_frob_cond_a", rec.inv_frob_cond_a},
                       {"inv_frob_cond_b", rec.inv_frob_cond_b},
                       {"cond_a", rec.cond_a},
                       {"cond_b", rec.cond_b},
                       {"center_error", rec.center_error}});
  }
  j = nlohmann::json{
      {"experiment", "sphere-cond"},
      {"config", r.config},
      {"initial_point", r.initial_point_rule},
      {"records", std::move(records)},
      {"skipped", r.skipped},
      {"aggregate",
       {{"inv_frob_cond_a", summary_json(r.inv_frob_cond_a)},
        {"inv_frob_cond_b", summary_json(r.inv_frob_cond_b)},
        {"cond_a", summary_json(r.cond_a)},
        {"cond_b", summary_json(r.cond_b)},
        {"center_error", summary_json(r.center_error)}}},
  };
}

void to_json(nlohmann::json& j, const AveragingRateTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    rows.push_back({{"m", row.m},
                    {"mean_error", row.error.mean},
                    {"stderr", row.error.standard_error},
                    {"bound", row.bound},
                    {"pass", row.passed()}});
  }
  j = nlohmann::json{{"experiment", "avg-rate"},
                     {"config", t.config},
                     {"frobenius_norm", t.frobenius_norm},
                     {"inverse_norm", t.inverse_norm},
                     {"initial_distance", t.initial_distance},
                     {"rows", std::move(rows)}};
}

void to_json(nlohmann::json& j, const MethodComparison& t) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : t.methods) {
    methods.push_back({{"method", m.method},
                       {"row_touches", m.row_touches},
                       {"mean_error", m.error.mean},
                       {"stderr_error", m.error.standard_error},
                       {"mean_squared_error", m.squared_error.mean},
                       {"stderr_squared_error", m.squared_error.standard_error}});
  }
  j = nlohmann::json{{"experiment", "compare"},
                     {"config", t.config},
                     {"budget", t.budget},
                     {"epoch_length", t.epoch_length},
                     {"initial_distance", t.initial_distance},
                     {"kaczmarz_bound", t.kaczmarz_bound},
                     {"kaczmarz_within_bound", t.kaczmarz_within_bound()},
                     {"methods", std::move(methods)}};
}

void write_csv(std::ostream& out, const ExperimentReport& r) {
  out << "kind,matrix,inv_frob_cond_a,inv_frob_cond_b,cond_a,cond_b,center_error\n";
  for (const auto& rec : r.records) {
    out << "record," << rec.matrix_index << ',' << format_double(rec.inv_frob_cond_a) << ','
        << format_double(rec.inv_frob_cond_b) << ',' << format_double(rec.cond_a) << ','
        << format_double(rec.cond_b) << ',' << format_double(rec.center_error) << '\n';
  }
  out << "mean," << r.records.size() << ',' << format_double(r.inv_frob_cond_a.mean) << ','
      << format_double(r.inv_frob_cond_b.mean) << ',' << format_double(r.cond_a.mean) << ','
      << format_double(r.cond_b.mean) << ',' << format_double(r.center_error.mean) << '\n';
  out << "stderr," << r.records.size() << ',' << format_double(r.inv_frob_cond_a.standard_error)
      << ',' << format_double(r.inv_frob_cond_b.standard_error) << ','
      << format_double(r.cond_a.standard_error) << ',' << format_double(r.cond_b.standard_error)
      << ',' << format_double(r.center_error.standard_error) << '\n';
  out << "skipped," << r.skipped << ",,,,,\n";
}

void write_csv(std::ostream& out, const AveragingRateTable& t) {
  out << "m,mean_error,stderr,bound,pass\n";
  for (const auto& row : t.rows) {
    out << row.m << ',' << format_double(row.error.mean) << ','
        << format_double(row.error.standard_error) << ',' << format_double(row.bound) << ','
        << (row.passed() ? "true" : "false") << '\n';
  }
}

void write_csv(std::ostream& out, const MethodComparison& t) {
  out << "method,row_touches,mean_error,stderr_error,mean_squared_error,stderr_squared_error\n";
  for (const auto& m : t.methods) {
    out << m.method << ',' << m.row_touches << ',' << format_double(m.error.mean) << ','
        << format_double(m.error.standard_error) << ',' << format_double(m.squared_error.mean)
        << ',' << format_double(m.squared_error.standard_error) << '\n';
  }
  out << "kaczmarz_bound," << t.budget << ",,," << format_double(t.kaczmarz_bound) << ",\n";
}

}  // namespace reflsolve
