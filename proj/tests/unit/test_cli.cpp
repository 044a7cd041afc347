#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace reflsolve::cli;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "reflsolve");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path dir = fs::path(REFLSOLVE_TEST_TMPDIR);
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << contents;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("solve with the identity returns the right-hand side") {
  const auto a = temp_file("identity.txt", "3 3\n1 0 0\n0 1 0\n0 0 1\n");
  const auto b = temp_file("rhs.txt", "1 3\n1.5 -2 4\n");
  const RunResult r = run({"solve", "--matrix-file", a.string(), "--rhs-file", b.string()});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("converged") == true);
  const std::vector<double> x = j.at("solution");
  REQUIRE(x.size() == 3);
  CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(x[1] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(x[2] == doctest::Approx(4.0).epsilon(1e-9));

  SUBCASE("csv output") {
    const RunResult c =
        run({"solve", "--matrix-file", a.string(), "--rhs-file", b.string(), "--format", "csv"});
    CHECK(c.code == kExitOk);
    CHECK(c.out.rfind("index,value\n0,", 0) == 0);
  }
  SUBCASE("trace output") {
    const fs::path trace = fs::path(REFLSOLVE_TEST_TMPDIR) / "trace.csv";
    const RunResult t = run({"solve", "--matrix-file", a.string(), "--rhs-file", b.string(),
                             "--trace-out", trace.string(), "--thin", "2"});
    CHECK(t.code == kExitOk);
    CHECK(slurp(trace).rfind("step,coord_0,coord_1,coord_2\n0,0,0,0\n", 0) == 0);
  }
}

TEST_CASE("solve on a small general system") {
  const auto a = temp_file("general.txt", "3 3\n4 1 0\n1 3 1\n0 1 2\n");
  const auto b = temp_file("general_rhs.txt", "3 1\n1\n2\n3\n");
  const RunResult r = run({"solve", "--matrix-file", a.string(), "--rhs-file", b.string(), "--seed", "5"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("relative_residual").get<double>() <= 1e-10);
}

TEST_CASE("solve error paths") {
  const auto singular = temp_file("singular.txt", "2 2\n1 2\n2 4\n");
  const auto rhs2 = temp_file("rhs2.txt", "1 2\n1 1\n");
  const auto malformed = temp_file("bad.txt", "2 2\n1 x\n0 1\n");
  const auto zero_row = temp_file("zero_row.txt", "2 2\n0 0\n0 1\n");

  CHECK(run({"solve", "--matrix-file", singular.string(), "--rhs-file", rhs2.string()}).code ==
        kExitNumericalFailure);
  CHECK(run({"solve", "--matrix-file", malformed.string(), "--rhs-file", rhs2.string()}).code ==
        kExitConfigError);
  CHECK(run({"solve", "--matrix-file", zero_row.string(), "--rhs-file", rhs2.string()}).code ==
        kExitConfigError);
  CHECK(run({"solve", "--matrix-file", "/nonexistent/a.txt", "--rhs-file", rhs2.string()}).code ==
        kExitConfigError);
  const auto rhs3 = temp_file("rhs3.txt", "1 3\n1 1 1\n");
  CHECK(run({"solve", "--matrix-file", singular.string(), "--rhs-file", rhs3.string()}).code ==
        kExitConfigError);
}

TEST_CASE("argument errors exit with the configuration code") {
  CHECK(run({}).code == kExitConfigError);
  CHECK(run({"sphere-cond", "--bogus"}).code == kExitConfigError);
  CHECK(run({"sphere-cond", "--format", "xml"}).code == kExitConfigError);
  CHECK(run({"sphere-cond", "--n", "10", "--steps", "20"}).code == kExitConfigError);
  CHECK(run({"diagnose", "--trials", "10"}).code == kExitConfigError);
  const RunResult help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("sphere-cond") != std::string::npos);
}

TEST_CASE("sphere-cond is byte-identical across runs and worker counts") {
  const std::vector<std::string> base{"sphere-cond", "--n", "6", "--matrices", "4",
                                      "--steps", "140", "--thin", "5", "--seed", "7"};
  const RunResult first = run(base);
  const RunResult second = run(base);
  auto threaded_args = base;
  threaded_args.insert(threaded_args.end(), {"--workers", "3"});
  const RunResult threaded = run(threaded_args);
  REQUIRE(first.code == kExitOk);
  CHECK(first.out == second.out);
  CHECK(first.out == threaded.out);
  const auto j = nlohmann::json::parse(first.out);
  CHECK(j.at("records").size() == 4);

  SUBCASE("--out writes the same bytes to a file") {
    const fs::path path = fs::path(REFLSOLVE_TEST_TMPDIR) / "sphere.json";
    auto args = base;
    args.insert(args.end(), {"--out", path.string()});
    CHECK(run(args).code == kExitOk);
    CHECK(slurp(path) == first.out);
  }
  SUBCASE("csv") {
    auto args = base;
    args.insert(args.end(), {"--format", "csv"});
    const RunResult csv = run(args);
    CHECK(csv.code == kExitOk);
    CHECK(csv.out.rfind("kind,matrix,", 0) == 0);
  }
}

TEST_CASE("avg-rate and compare produce their tables") {
  const RunResult rate = run({"avg-rate", "--n", "5", "--steps", "100", "--trials", "20", "--seed", "2"});
  REQUIRE(rate.code == kExitOk);
  CHECK(nlohmann::json::parse(rate.out).at("rows").size() == 3);

  const RunResult cmp = run({"compare", "--n", "5", "--steps", "500", "--trials", "5", "--format", "csv"});
  REQUIRE(cmp.code == kExitOk);
  CHECK(cmp.out.find("\nkaczmarz,500,") != std::string::npos);
}

TEST_CASE("diagnose passes on a 10x10 ensemble matrix") {
  const RunResult r = run({"diagnose", "--n", "10", "--seed", "3", "--trials", "2000"});
  CHECK(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("all_pass") == true);
  CHECK(j.at("checks").size() >= 10);
}
