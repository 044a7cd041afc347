// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Every oracle here is computed independently of the code path it checks
// where that is possible (enumeration, explicit sphere centers, Gram–Schmidt
// rotations, elementwise formulas).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "reflsolve/diagnostics.hpp"
#include "reflsolve/experiments.hpp"
#include "reflsolve/reflection.hpp"
#include "reflsolve/sphere.hpp"
#include "reflsolve/stats.hpp"
#include "test_support.hpp"

#ifdef REFLSOLVE_HAVE_CLI
#include "cli.hpp"
#endif

using namespace reflsolve;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

struct Suite {
  int failures = 0;

  void run(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = limit_seconds <= 0.0 || secs < limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::string timing = fmt("%.2fs", secs);
    if (limit_seconds > 0.0) timing += fmt(" (limit %gs)", limit_seconds);
    std::printf("[%s] %2d %-28s %s; runtime %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
};

struct Problem {
  LinearSystem system;
  Vector x1;
};

// Row-normalized Gaussian A, x* ~ N(0, I), x1 = x* + unit vector.
Problem ensemble_problem(std::size_t n, RngStream& rng) {
  DenseMatrix a = gen_gaussian_row_normalized(n, rng);
  Vector xs = rng.normal_vector(n);
  Vector x1 = add(xs, rng.unit_vector(n));
  return {LinearSystem::from_solution(std::move(a), std::move(xs)), std::move(x1)};
}

Outcome isometry() {
  RngStream rng(101);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Problem p = ensemble_problem(50, rng);
    const Vector& xs = *p.system.known_solution();
    const double r0 = distance(p.x1, xs);
    const ReflectionTrace trace = run_reflections(p.system, p.x1, 10000, 1, rng);
    for (const Vector& x : trace.points) worst = std::max(worst, std::abs(distance(x, xs) - r0) / r0);
  }
  return {worst <= 1e-8, fmt("max relative drift %.3e (tol 1e-8), 20 systems x 1e4 steps", worst)};
}

Outcome expectation_identity() {
  RngStream rng(202);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 3 + static_cast<std::size_t>(t);
    const DenseMatrix a = testing::random_matrix(n, n, rng);
    const double fro2 = squared_frobenius_norm(a);
    for (int probe = 0; probe < 5; ++probe) {
      const Vector x = rng.normal_vector(n);
      // (Id − 2AᵀA/F²)x written out elementwise.
      Vector mx = x;
      const Vector ax = testing::row_major_apply(a, x);
      for (std::size_t j = 0; j < n; ++j) {
        double atax = 0.0;
        for (std::size_t i = 0; i < n; ++i) atax += a(i, j) * ax[i];
        mx[j] -= 2.0 * atax / fro2;
      }
      const Vector enumerated = enumerated_expected_reflection(a, x);
      worst = std::max(worst, testing::max_abs_diff(enumerated, mx) / norm(x));
    }
    worst = std::max(worst, expectation_operator(a).identity_residual);
  }
  return {worst <= 1e-12, fmt("max relative residual %.3e (tol 1e-12), 20 matrices x 5 probes", worst)};
}

Outcome mode_decay() {
  RngStream rng(303);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix a = testing::random_matrix(10, 10, rng);
    const Vector x = rng.normal_vector(10);
    for (std::size_t k : {1, 5, 20}) {
      worst = std::max(worst, max_relative_mode_error(singular_mode_decay_check(a, x, k), x));
    }
  }
  return {worst <= 1e-9, fmt("max relative mode error %.3e (tol 1e-9), k in {1,5,20}", worst)};
}

Outcome decorrelation() {
  RngStream rng(404);
  bool ok = true;
  int retries = 0;
  double worst_z = 0.0;
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix a = gen_gaussian_row_normalized(10, rng);
    const Vector x = rng.unit_vector(10);
    for (std::size_t k : {1, 3, 10}) {
      const std::uint64_t seed = rng.next_u64();
      bool first = true;
      const DecorrelationCheck c = with_reseed_retry(seed, [&](std::uint64_t s) {
        if (!first) ++retries;
        first = false;
        RngStream r(s);
        return decorrelation_bound_check(a, x, k, 10000, r);
      });
      ok = ok && c.passed();
      if (c.bound.standard_error > 0.0) {
        worst_z = std::max(worst_z, std::abs(c.signed_mean - c.exact_value) / c.bound.standard_error);
      }
    }
  }
  return {ok, fmt("30 checks, worst |MC - exact|/stderr %.2f (tol 4), reseeded retries %d", worst_z,
                  retries)};
}

Outcome averaging_bound_criterion() {
  RngStream rng(505);
  const Problem p = ensemble_problem(20, rng);
  bool ok = true;
  std::string detail;
  for (std::size_t m : {1, 10, 100, 1000}) {
    const std::uint64_t seed = rng.next_u64();
    const BoundCheck c = with_reseed_retry(seed, [&](std::uint64_t s) {
      RngStream r(s);
      return averaging_bound_check(p.system, p.x1, m, 200, r);
    });
    ok = ok && c.passed();
    detail += fmt("%sm=%zu %.3g<=%.3g", detail.empty() ? "" : ", ", m, c.empirical_mean, c.bound_value);
  }
  return {ok, detail};
}

Outcome sphere_conditioning() {
  ExperimentConfig c;
  c.n = 50;
  c.num_matrices = 100;
  c.steps = 5000;
  c.thinning = 25;
  c.seed = 7;
  const ExperimentReport r = experiment_sphere_conditioning(c);
  const double a = r.inv_frob_cond_a.mean;
  const double b = r.inv_frob_cond_b.mean;
  const bool ok = a >= 0.0014 && a <= 0.0024 && b >= 0.0034 && b <= 0.0056 && r.skipped == 0;
  return {ok, fmt("A: %.5f in [0.0014,0.0024], B: %.5f in [0.0034,0.0056], skipped %zu", a, b,
                  r.skipped)};
}

Outcome sphere_exactness() {
  RngStream rng(707);
  const std::size_t n = 50;
  const Vector center = scale(2.0, rng.normal_vector(n));
  const PointCloud cloud(testing::sphere_cloud(center, 1.3, 200, rng));
  const Vector found = center_via_thales(cloud);
  const double err = testing::max_abs_diff(found, center);

  const DenseMatrix q = testing::random_orthogonal(n, rng);
  const Vector shift = scale(5.0, rng.normal_vector(n));
  std::vector<Vector> moved;
  for (const Vector& p : cloud.points()) moved.push_back(add(testing::row_major_apply(q, p), shift));
  const Vector moved_center = center_via_thales(PointCloud(moved));
  const double equi = testing::max_abs_diff(moved_center, add(testing::row_major_apply(q, found), shift));
  return {err <= 1e-8 && equi <= 1e-9,
          fmt("center error %.3e (tol 1e-8), rigid-motion mismatch %.3e (tol 1e-9)", err, equi)};
}

Outcome kaczmarz_rate() {
  RngStream rng(808);
  bool ok = true;
  std::string detail;
  for (int mtx = 0; mtx < 5; ++mtx) {
    const Problem p = ensemble_problem(30, rng);
    const DenseMatrix& a = p.system.matrix();
    const double inv = inverse_operator_norm(a);
    const double rate = 1.0 - 1.0 / (squared_frobenius_norm(a) * inv * inv);
    const double e0 = squared_norm(subtract(p.x1, *p.system.known_solution()));
    std::vector<Vector> at(3);
    const std::size_t ks[] = {10, 100, 1000};
    const std::uint64_t master = rng.next_u64();
    for (std::size_t t = 0; t < 500; ++t) {
      RngStream r = RngStream::derive(master, t);
      const KaczmarzResult res = randomized_kaczmarz_solve(p.system, p.x1, 1000, r);
      for (std::size_t g = 0; g < 3; ++g) at[g].push_back(res.squared_errors[ks[g]]);
    }
    for (std::size_t g = 0; g < 3; ++g) {
      const SampleSummary s = summarize(at[g]);
      const double bound = std::pow(rate, static_cast<double>(ks[g])) * e0;
      ok = ok && s.mean <= bound + 3.0 * s.standard_error;
      if (mtx == 0) {
        detail += fmt("%sk=%zu %.3g<=%.3g", detail.empty() ? "" : ", ", ks[g], s.mean, bound);
      }
    }
  }
  return {ok, "5 matrices x 500 trials; first: " + detail};
}

Outcome svd_substrate() {
  RngStream rng(909);
  double worst_fro = 0.0, worst_eig = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t cols = 1 + static_cast<std::size_t>(rng.uniform() * 60);
    const std::size_t rows = cols + static_cast<std::size_t>(rng.uniform() * (61 - cols));
    const DenseMatrix a = testing::random_matrix(rows, cols, rng);
    const SvdResult s = singular_values(a);
    double sum = 0.0;
    for (double v : s.singular_values) sum += v * v;
    double fro2 = 0.0;
    for (double v : a.entries()) fro2 += v * v;
    worst_fro = std::max(worst_fro, std::abs(sum - fro2) / fro2);

    const double s1sq = s.largest() * s.largest();
    for (std::size_t k = 0; k < cols; ++k) {
      const Vector v = s.right_vector(k);
      const Vector av = testing::row_major_apply(a, v);
      Vector atav(cols, 0.0);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) atav[j] += a(i, j) * av[i];
      const double sk2 = s.singular_values[k] * s.singular_values[k];
      for (std::size_t j = 0; j < cols; ++j) worst_eig = std::max(worst_eig, std::abs(atav[j] - sk2 * v[j]) / s1sq);
    }
  }
  return {worst_fro <= 1e-10 && worst_eig <= 1e-8,
          fmt("Frobenius mismatch %.3e (tol 1e-10), eigen-residual %.3e*s1^2 (tol 1e-8)", worst_fro,
              worst_eig)};
}

#ifdef REFLSOLVE_HAVE_CLI
Outcome determinism() {
  auto run_once = [] {
    const char* argv[] = {"reflsolve", "sphere-cond", "--seed", "7"};
    std::ostringstream out, err;
    const int code = cli::cli_main(4, argv, out, err);
    return std::make_pair(code, out.str());
  };
  const auto first = run_once();
  const auto second = run_once();
  const bool ok = first.first == 0 && second.first == 0 && !first.second.empty() &&
                  first.second == second.second;
  return {ok, fmt("two `sphere-cond --seed 7` reports, %zu bytes each, identical: %s",
                  first.second.size(), first.second == second.second ? "yes" : "no")};
}
#endif

}  // namespace

int main() {
  Suite suite;
  suite.run(1, "isometry", 5, isometry);
  suite.run(2, "expectation-identity", 1, expectation_identity);
  suite.run(3, "singular-mode-decay", 5, mode_decay);
  suite.run(4, "decorrelation-bound", 30, decorrelation);
  suite.run(5, "averaging-bound", 60, averaging_bound_criterion);
  suite.run(6, "sphere-conditioning", 120, sphere_conditioning);
  suite.run(7, "sphere-center-exactness", 1, sphere_exactness);
  suite.run(8, "kaczmarz-rate", 60, kaczmarz_rate);
  suite.run(9, "svd-substrate", 10, svd_substrate);
#ifdef REFLSOLVE_HAVE_CLI
  suite.run(10, "determinism", 0, determinism);
#else
  std::printf("[FAIL] 10 determinism                  CLI not built\n");
  ++suite.failures;
#endif
  std::printf("%d of 10 criteria failed\n", suite.failures);
  return suite.failures == 0 ? 0 : 1;
}
