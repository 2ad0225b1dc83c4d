#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "ssfp/config.hpp"
#include "ssfp/csv.hpp"
#include "ssfp/errors.hpp"

using namespace ssfp;
namespace fs = std::filesystem;

namespace {

std::string fieldOf(const std::string& key, const std::string& value) {
  RunConfig cfg;
  try {
    applySetting(cfg, key, value);
    validate(cfg);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("ssfp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SSFP_CLI_PATH) + " " + args + " >" + (scratch() / "stdout.txt").string() +
                          " 2>" + (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config values and defaults") {
  RunConfig cfg;
  CHECK(cfg.samplesPerPeriod == 200);
  CHECK(cfg.roundTripTolerance == 1e-8);
  CHECK(cfg.seedDepth == 600);
  applyAssignment(cfg, "geom.N = 3");
  applyAssignment(cfg, "geom.alpha=13");
  applyAssignment(cfg, "seed.omega.kind=sinusoidal");
  applyAssignment(cfg, "seed.omega.amplitude=15");
  applyAssignment(cfg, "seed.omega.offset=1.001");
  applyAssignment(cfg, "windows.left=-40, -20");
  applyAssignment(cfg, "windows.middle=-3, 2");
  applyAssignment(cfg, "windows.right=5, 24");
  applyAssignment(cfg, "prefractal.generations=0-3,6");
  applyAssignment(cfg, "prefractal.preset=type2-power");
  CHECK(cfg.N == 3);
  CHECK(cfg.alpha == 13);
  CHECK((cfg.seed.omega.kind == OmegaSpec::Kind::sinusoidal));
  CHECK(cfg.windows.middle.lo == -3);
  CHECK(cfg.windows.middle.hi == 2);
  CHECK(cfg.generations == std::vector<int>{0, 1, 2, 3, 6});
  CHECK(cfg.prefractalW == 9);
  CHECK_NOTHROW(validate(cfg));
  const auto w = scanWindowOf(cfg);
  CHECK(0.001 * std::exp(-geometryOf(cfg).s * w.lo) == doctest::Approx(600).epsilon(1e-12));
}

TEST_CASE("config errors name the field") {
  CHECK(fieldOf("geom.N", "two") == "geom.N");
  CHECK(fieldOf("geom.N", "1") == "geom.N");
  CHECK(fieldOf("geom.N", "5") == "geom.alpha");
  CHECK(fieldOf("geom.alpha", "1.5") == "geom.alpha");
  CHECK(fieldOf("seed.c", "0") == "seed.c");
  CHECK(fieldOf("seed.omega.value", "0") == "seed.omega.value");
  CHECK(fieldOf("grid.samples_per_period", "1") == "grid.samples_per_period");
  CHECK(fieldOf("tolerance.round_trip", "-1") == "tolerance.round_trip");
  CHECK(fieldOf("windows.left", "3") == "windows.left");
  CHECK(fieldOf("run.threads", "0") == "run.threads");
  CHECK(fieldOf("prefractal.generations", "3-1") == "prefractal.generations");
  CHECK(fieldOf("no.such.key", "1") == "no.such.key");
  CHECK(fieldOf("grid.ln_phi_max", "nan") == "grid.ln_phi_max");

  RunConfig cfg;
  CHECK_THROWS_AS(applyAssignment(cfg, "geom.N"), ConfigError);
  applyAssignment(cfg, "windows.left=-10,-5");
  applyAssignment(cfg, "windows.middle=-6,0");
  applyAssignment(cfg, "windows.right=1,9");
  try {
    validate(cfg);
    FAIL("overlapping windows accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "windows.middle");
  }
}

TEST_CASE("config file") {
  const auto path = scratch() / "run.cfg";
  std::ofstream(path) << "# fig 2 style\ngeom.N = 3\ngeom.alpha = 13   # s = ln3/ln13\n\nseed.c = 0.01\n";
  RunConfig cfg;
  loadConfigFile(cfg, path.string());
  CHECK(cfg.N == 3);
  CHECK(cfg.seed.c == 0.01);

  std::ofstream(path) << "geom.N = 3\nthis line is wrong\n";
  try {
    loadConfigFile(cfg, path.string());
    FAIL("bad line accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field().find(":2") != std::string::npos);
  }
  CHECK_THROWS_AS(loadConfigFile(cfg, (scratch() / "missing.cfg").string()), IoError);
}

TEST_CASE("doubles round-trip through CSV text") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1, 1);
  std::string text = "a,b\n";
  std::vector<double> values;
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, 300 * u(rng));
    values.push_back(x);
    text += formatDouble(x) + "," + formatDouble(-x) + "\n";
  }
  const auto table = parseCsv(text);
  REQUIRE(table.rows.size() == values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    CHECK(std::strtod(table.rows[i][0].c_str(), nullptr) == values[i]);
    CHECK(std::strtod(table.rows[i][1].c_str(), nullptr) == -values[i]);
  }
  CHECK(formatDouble(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(formatDouble(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("scan CSV layout") {
  ChainPoint p;
  p.lnPhi = -1.5;
  p.params = {-0.25, 0.5, 0};
  p.lnRT = 0.1;
  p.branch = 1;
  p.cls = MatrixClass::elliptic;
  const auto table = parseCsv(scanCsv({p}));
  CHECK(table.header ==
        std::vector<std::string>{"ln_phi", "ln_T", "ln_R_over_T", "J", "F", "branch_index", "round_trip_error", "class_flag"});
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][0] == "-1.5");
  CHECK(table.rows[0][5] == "1");
  CHECK(table.rows[0][7] == "elliptic");
  CHECK_THROWS_AS(writeFile((scratch() / "no_dir" / "x.csv").string(), "x"), IoError);
}

TEST_CASE("command line: exit codes") {
  CHECK(run("--help") == 0);
  CHECK(run("") == 1);
  CHECK(run("scan --set geom.N=1") == 1);
  CHECK(slurp(scratch() / "stderr.txt").find("geom.") != std::string::npos);
  CHECK(run("scan --set no.such=1") == 1);
  CHECK(slurp(scratch() / "stderr.txt").find("no.such") != std::string::npos);
  CHECK(run("figure 9") == 1);
  CHECK(run("scan --config " + (scratch() / "absent.cfg").string()) == 3);

  std::ofstream(scratch() / "blocker") << "x";
  CHECK(run("prefractal --set prefractal.points=3 --out " + (scratch() / "blocker" / "sub").string()) == 3);

  // nothing can pass a zero-width round-trip test
  CHECK(run("scan --set grid.samples_per_period=8 --set tolerance.round_trip=1e-300 --out " +
            (scratch() / "broken").string()) == 2);
  CHECK(slurp(scratch() / "stderr.txt").find("chain break") != std::string::npos);
}

TEST_CASE("command line: repeated runs are byte-identical") {
  const std::string common = "--set grid.samples_per_period=40 --set geom.N=3 --set geom.alpha=13 --set seed.c=0.01";
  REQUIRE(run("scan " + common + " --out " + (scratch() / "s1").string()) == 0);
  REQUIRE(run("scan " + common + " --threads 2 --out " + (scratch() / "s2").string()) == 0);
  const auto a = slurp(scratch() / "s1" / "scan.csv");
  CHECK(a.size() > 1000);
  CHECK(a == slurp(scratch() / "s2" / "scan.csv"));
  const auto table = readCsv((scratch() / "s1" / "scan.csv").string());
  CHECK(table.header.size() == 8);

  const std::string pre = "prefractal --set prefractal.generations=0-4 --set prefractal.points=25";
  REQUIRE(run(pre + " --out " + (scratch() / "p1").string()) == 0);
  REQUIRE(run(pre + " --out " + (scratch() / "p2").string()) == 0);
  CHECK(slurp(scratch() / "p1" / "prefractal.csv") == slurp(scratch() / "p2" / "prefractal.csv"));

  REQUIRE(run("seed-check --set grid.samples_per_period=10") == 0);
  CHECK(slurp(scratch() / "stdout.txt").rfind("ln_phi,seed_residual\n", 0) == 0);
}

TEST_CASE("command line: figure outputs") {
  REQUIRE(run("figure 1 --set grid.samples_per_period=40 --out " + (scratch() / "fig").string()) == 0);
  for (const char* name : {"fig1_N2.csv", "fig1_N4.csv", "fig1_asymptotes.csv", "fig1_report.txt"})
    CHECK(fs::exists(scratch() / "fig" / name));
  fs::remove_all(scratch());
}
