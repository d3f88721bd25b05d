#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blowup6/cli.hpp"
#include "blowup6/errors.hpp"

using namespace blowup::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("blowup6_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int call(std::vector<std::string> args) {
  args.insert(args.begin(), "blowup6");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) row.push_back(f);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("config: defaults validate, unknown keys and coarse grids are rejected") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  const auto round = RunConfig::from_json(c.to_json());
  CHECK(round.to_json() == c.to_json());
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"verify", {{"samples", "many"}}}}), ConfigError);
  c.verify.gamma_nodes = 50;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  RunConfig d;
  d.evolve.data = "uapp:5";
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("verify: default passes, perturbed alpha fails the identity") {
  const auto out = scratch("verify");
  CHECK(call({"verify", "--out", out.string()}) == kOk);
  const auto rep = nlohmann::json::parse(slurp(out / "verify.json"));
  CHECK(rep["passed"] == true);
  CHECK(fs::exists(out / "manifest.json"));

  const auto bad = scratch("verify_bad");
  CHECK(call({"verify", "--alpha-scale", "1.1", "--out", bad.string()}) == kCheckFailed);
  const auto r2 = nlohmann::json::parse(slurp(bad / "verify.json"));
  bool alpha_failed = false;
  for (const auto& c : r2["checks"])
    if (c["name"] == "alpha_identity") alpha_failed = c["passed"] == false;
  CHECK(alpha_failed);
}

TEST_CASE("invalid config exits 2 before any output") {
  const auto dir = scratch("badcfg");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "c.json");
    cfg << R"({"schema_version": 1, "verify": {"gamma_nodes": 10}})";
  }
  const auto out = dir / "out";
  CHECK(call({"verify", "--config", (dir / "c.json").string(), "--out", out.string()}) == kInvalidConfig);
  CHECK_FALSE(fs::exists(out));
  CHECK(call({"nonsense"}) == kInvalidConfig);
}

TEST_CASE("evolve from u_app deep in the blowup: tau0 = 40") {
  // T - t = e^{-40} is below the resolution of t near T = 1; the run is driven by T - t.
  const auto out = scratch("evolve40");
  CHECK(call({"evolve", "--data", "uapp:40", "--R", "4", "--out", out.string()}) == kOk);
  const auto s = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(s["status"] == "completed");
  CHECK(s["worst_relative_deviation"].get<double>() < 0.1);
  CHECK(s["rate_fit"]["a"].get<double>() == doctest::Approx(1.25).epsilon(1e-3));
}

TEST_CASE("profile --tau 20: shape, monotone tau, byte-identical reruns") {
  const auto a = scratch("profile_a"), b = scratch("profile_b");
  CHECK(call({"profile", "--tau", "20", "--out", a.string()}) == kOk);
  CHECK(call({"profile", "--tau", "20", "--out", b.string()}) == kOk);
  const auto rows = read_csv(a / "profile.csv");
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"t", "tau", "x", "z", "y", "u_app", "theta", "Q_term", "T1_term", "chi1"});
  double prev = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double tau = std::stod(rows[i][1]);
    CHECK(tau >= prev);
    prev = tau;
  }
  CHECK(slurp(a / "profile.csv") == slurp(b / "profile.csv"));
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["outputs"][0] == "profile.csv");
  CHECK(m.contains("version"));
  CHECK(m.contains("wall_time_s"));
}

TEST_CASE("spectrum --R 10,20,40: three rows, mu1 < 0") {
  const auto out = scratch("spectrum");
  CHECK(call({"spectrum", "--R", "10,20,40", "--jobs", "3", "--out", out.string()}) == kOk);
  const auto rows = read_csv(out / "spectrum.csv");
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) < 0.0);
}

TEST_CASE("evolve --data constant:1.0 reports T_est near 1") {
  const auto out = scratch("evolve");
  CHECK(call({"evolve", "--data", "constant:1.0", "--out", out.string()}) == kOk);
  const auto s = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(s["status"] == "blown_up");
  CHECK(s["T_est"].get<double>() == doctest::Approx(1.0).epsilon(0.01));
  const auto rows = read_csv(out / "evolve.csv");
  CHECK(rows[0] == std::vector<std::string>{"step", "t", "dt", "u_center", "sup_abs", "min_u", "lambda_est"});
}

TEST_CASE("residual and energy tables") {
  const auto out = scratch("tables");
  CHECK(call({"residual", "--out", out.string()}) == kOk);
  CHECK(call({"energy", "--jobs", "2", "--out", out.string()}) == kOk);
  const auto r = read_csv(out / "residual.csv");
  CHECK(r[0] == std::vector<std::string>{"t", "tau", "x", "region", "residual", "normalized_residual"});
  const auto e = read_csv(out / "energy.csv");
  CHECK(e[0].size() == 9);
  CHECK(e.size() == 1 + 8);
}
