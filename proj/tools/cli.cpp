#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "reflsolve/diagnostics.hpp"
#include "reflsolve/errors.hpp"
#include "reflsolve/experiments.hpp"
#include "reflsolve/matrix_io.hpp"
#include "reflsolve/reflection.hpp"

namespace reflsolve::cli {

namespace {

struct SolveOptions {
  std::string matrix_file;
  std::string rhs_file;
  std::string trace_out;
  std::size_t steps = 0;  // 0: default epoch length
  std::size_t epochs = 1000;
  double tolerance = 1e-10;
};

struct DiagnoseOptions {
  std::size_t averaging_trials = 200;
};

const std::map<std::string, ReportFormat> kFormats{{"csv", ReportFormat::csv},
                                                   {"json", ReportFormat::json}};
const std::map<std::string, StartRule> kStartRules{{"origin", StartRule::origin},
                                                   {"unit", StartRule::unit_random}};

// Writes through --out when given, otherwise to the caller's stream.
void with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file " + path);
  write(file);
}

void add_common(CLI::App* cmd, ExperimentConfig& config) {
  cmd->add_option("--seed", config.seed, "Master seed")->capture_default_str();
  cmd->add_option("--out", config.output_path, "Report file (default: stdout)");
  cmd->add_option("--format", config.format, "Report format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
      ->default_str("json");
  cmd->add_option("--workers", config.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
}

int run_solve(const ExperimentConfig& config, const SolveOptions& opts, std::ostream& out) {
  DenseMatrix a = read_matrix_file(opts.matrix_file);
  Vector b = read_vector_file(opts.rhs_file);
  const LinearSystem system(std::move(a), std::move(b));
  const DenseMatrix& m = system.matrix();
  const std::size_t epoch_length = opts.steps ? opts.steps : default_epoch_length(m);

  RngStream rng(config.seed);
  Vector x(system.size(), 0.0);
  const double rhs_norm = norm(system.rhs());
  auto relative_residual = [&](const Vector& v) {
    const double r = norm(subtract(matvec(m, v), system.rhs()));
    return rhs_norm > 0.0 ? r / rhs_norm : r;
  };

  if (!opts.trace_out.empty()) {
    RngStream trace_rng(config.seed);
    const ReflectionTrace trace = run_reflections(system, x, epoch_length, config.thinning, trace_rng);
    with_output(opts.trace_out, out, [&](std::ostream& os) { write_trace_csv(os, trace); });
  }

  std::size_t epochs = 0;
  double residual = relative_residual(x);
  while (residual > opts.tolerance && epochs < opts.epochs) {
    x = restarted_solve(system, x, epoch_length, 1, rng);
    residual = relative_residual(x);
    ++epochs;
  }
  const bool converged = residual <= opts.tolerance;

  with_output(config.output_path, out, [&](std::ostream& os) {
    if (config.format == ReportFormat::json) {
      const nlohmann::json j{{"solution", x},
                             {"relative_residual", residual},
                             {"epochs", epochs},
                             {"steps_per_epoch", epoch_length},
                             {"converged", converged},
                             {"seed", config.seed}};
      os << j.dump(2) << '\n';
    } else {
      os << "index,value\n";
      for (std::size_t i = 0; i < x.size(); ++i) os << i << ',' << format_double(x[i]) << '\n';
    }
  });
  return converged ? kExitOk : kExitNumericalFailure;
}

int run_diagnose(const ExperimentConfig& config, const DiagnoseOptions& opts, std::ostream& out) {
  config.validate();
  RngStream rng = RngStream::derive(config.seed, 0);
  const DenseMatrix a = gen_gaussian_row_normalized(config.n, rng);
  std::vector<Vector> probes;
  for (int p = 0; p < 5; ++p) probes.push_back(rng.unit_vector(config.n));

  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, nlohmann::json detail) {
    detail["name"] = name;
    detail["pass"] = pass;
    checks.push_back(std::move(detail));
    all_pass = all_pass && pass;
  };

  {
    double worst = 0.0;
    for (const auto& x : probes) {
      worst = std::max(worst, distance(enumerated_expected_reflection(a, x),
                                       expectation_operator(a).apply(x)));
    }
    record("expectation_identity", worst <= 1e-12, {{"max_residual", worst}, {"tolerance", 1e-12}});
  }
  {
    const SpectrumCheck s = spectrum_check(a);
    record("spectrum", s.passed(),
           {{"min_eigenvalue", s.min_eigenvalue},
            {"max_eigenvalue", s.max_eigenvalue},
            {"operator_norm", s.operator_norm},
            {"norm_bound", s.norm_bound},
            {"reduction_lhs", s.reduction_lhs}});
  }
  for (std::size_t k : {1, 5, 20}) {
    double worst = 0.0;
    for (const auto& x : probes) {
      worst = std::max(worst, max_relative_mode_error(singular_mode_decay_check(a, x, k), x));
    }
    record("singular_mode_decay_k" + std::to_string(k), worst <= 1e-9,
           {{"max_relative_error", worst}, {"tolerance", 1e-9}});
  }
  {
    double worst = 0.0;
    for (const auto& x : probes) worst = std::max(worst, rayleigh_identity_check(a, x));
    record("rayleigh_identity", worst <= 1e-10, {{"max_residual", worst}, {"tolerance", 1e-10}});
  }
  {
    const double eps = 1.0 / static_cast<double>(config.n);
    const SmallModeCheck s = small_mode_rayleigh_check(a, eps, rng);
    record("small_mode_rayleigh", s.passed(),
           {{"epsilon", eps},
            {"modes_used", s.modes_used},
            {"rayleigh_value", s.rayleigh_value},
            {"lower_bound", s.lower_bound}});
  }
  const Vector& x = probes.front();
  for (std::size_t k : {1, 3, 10}) {
    const DecorrelationCheck c = with_reseed_retry(mix_seed(config.seed + k), [&](std::uint64_t s) {
      RngStream r(s);
      return decorrelation_bound_check(a, x, k, config.trials, r);
    });
    nlohmann::json detail = c;
    detail["k"] = k;
    record("decorrelation_k" + std::to_string(k), c.passed(), std::move(detail));
  }
  {
    const LinearSystem system = LinearSystem::from_solution(a, rng.normal_vector(config.n));
    const Vector x1 = add(*system.known_solution(), rng.unit_vector(config.n));
    for (std::size_t m : {1, 10, 100, 1000}) {
      const BoundCheck c = with_reseed_retry(mix_seed(config.seed + 100 + m), [&](std::uint64_t s) {
        RngStream r(s);
        return averaging_bound_check(system, x1, m, opts.averaging_trials, r);
      });
      nlohmann::json detail = c;
      detail["m"] = m;
      record("averaging_bound_m" + std::to_string(m), c.passed(), std::move(detail));
    }
  }

  with_output(config.output_path, out, [&](std::ostream& os) {
    if (config.format == ReportFormat::json) {
      const nlohmann::json j{{"experiment", "diagnose"},
                             {"n", config.n},
                             {"seed", config.seed},
                             {"checks", checks},
                             {"all_pass", all_pass}};
      os << j.dump(2) << '\n';
    } else {
      os << "check,pass\n";
      for (const auto& c : checks) {
        os << c["name"].get<std::string>() << ',' << (c["pass"].get<bool>() ? "true" : "false")
           << '\n';
      }
    }
  });
  return all_pass ? kExitOk : kExitNumericalFailure;
}

template <typename Report>
void write_report(const Report& report, const ExperimentConfig& config, std::ostream& out) {
  with_output(config.output_path, out,
              [&](std::ostream& os) { emit_report(report, config.format, os); });
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized hyperplane-reflection solver and experiments", "reflsolve"};
  app.require_subcommand(1);

  ExperimentConfig solve_cfg{.n = 0, .thinning = 1};
  SolveOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "Solve Ax=b by restarted reflection averaging");
  solve->add_option("--matrix-file", solve_opts.matrix_file, "Matrix A (text format)")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--rhs-file", solve_opts.rhs_file, "Right-hand side b (text format)")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--steps", solve_opts.steps,
                    "Reflections per epoch (default 4*ceil(||A||_F^2 ||A^-1||^2))");
  solve->add_option("--epochs", solve_opts.epochs, "Maximum restart epochs")->capture_default_str();
  solve->add_option("--tol", solve_opts.tolerance, "Relative residual target")->capture_default_str();
  solve->add_option("--trace-out", solve_opts.trace_out, "Write the first epoch's trace as CSV");
  solve->add_option("--thin", solve_cfg.thinning, "Trace thinning stride")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_common(solve, solve_cfg);

  ExperimentConfig sphere_cfg;
  auto* sphere = app.add_subcommand("sphere-cond", "Conditioning of A versus the Thales matrix B");
  sphere->add_option("--n", sphere_cfg.n, "Dimension")->capture_default_str();
  sphere->add_option("--matrices", sphere_cfg.num_matrices, "Number of random matrices")
      ->capture_default_str();
  sphere->add_option("--steps", sphere_cfg.steps, "Reflections per matrix")->capture_default_str();
  sphere->add_option("--thin", sphere_cfg.thinning, "Keep every k-th iterate")->capture_default_str();
  sphere->add_option("--start", sphere_cfg.start, "Start rule: origin or unit")
      ->transform(CLI::CheckedTransformer(kStartRules, CLI::ignore_case))
      ->default_str("origin");
  add_common(sphere, sphere_cfg);

  ExperimentConfig rate_cfg{.n = 20, .steps = 10000, .trials = 200};
  auto* rate = app.add_subcommand("avg-rate", "Averaging error versus m against the 1/sqrt(m) bound");
  rate->add_option("--n", rate_cfg.n, "Dimension")->capture_default_str();
  rate->add_option("--steps", rate_cfg.steps, "Largest m in the 1,10,100,... grid")->capture_default_str();
  rate->add_option("--trials", rate_cfg.trials, "Trials per m")->capture_default_str();
  add_common(rate, rate_cfg);

  ExperimentConfig compare_cfg{.n = 30, .steps = 100000, .trials = 50};
  auto* compare = app.add_subcommand("compare", "Equal row-touch comparison against Kaczmarz and Cimmino");
  compare->add_option("--n", compare_cfg.n, "Dimension")->capture_default_str();
  compare->add_option("--steps", compare_cfg.steps, "Row-touch budget")->capture_default_str();
  compare->add_option("--trials", compare_cfg.trials, "Trials")->capture_default_str();
  add_common(compare, compare_cfg);

  ExperimentConfig diag_cfg{.n = 10, .trials = 10000};
  DiagnoseOptions diag_opts;
  auto* diagnose = app.add_subcommand("diagnose", "Exact identities and Monte Carlo bound checks");
  diagnose->add_option("--n", diag_cfg.n, "Dimension")->capture_default_str();
  diagnose->add_option("--trials", diag_cfg.trials, "Monte Carlo trials for decorrelation checks")
      ->capture_default_str();
  add_common(diagnose, diag_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfigError;
  }

  try {
    if (*solve) return run_solve(solve_cfg, solve_opts, out);
    if (*sphere) {
      write_report(experiment_sphere_conditioning(sphere_cfg), sphere_cfg, out);
    } else if (*rate) {
      write_report(experiment_averaging_rate(rate_cfg), rate_cfg, out);
    } else if (*compare) {
      write_report(experiment_method_comparison(compare_cfg), compare_cfg, out);
    } else if (*diagnose) {
      if (diag_cfg.trials < 100) throw ConfigError("diagnose: --trials must be >= 100");
      return run_diagnose(diag_cfg, diag_opts, out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DimensionError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ZeroRowError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
}

}  // namespace reflsolve::cli
