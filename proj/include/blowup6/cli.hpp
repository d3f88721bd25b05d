#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace blowup::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidConfig = 2, kNumericalFailure = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int schema_version = 1;
  double T = 1.0;
  int jobs = 1;
  double tol = 1e-6;
  unsigned seed = 20240601u;

  struct Verify {
    double alpha_scale = 1.0;
    int samples = 100;
    std::size_t gamma_nodes = 4000;
  } verify;

  struct Profile {
    std::vector<double> taus{15.0, 20.0, 25.0};
    std::size_t points = 121;
    double z_max = 6.0;
  } profile;

  struct Residual {
    std::vector<double> taus{15.0, 25.0, 35.0};
  } residual;

  struct Spectrum {
    std::vector<double> R{10.0, 20.0, 40.0};
    std::vector<double> M{20.0};
    double pm_rmax = 400.0;
    std::size_t fd_cells = 4000;
  } spectrum;

  struct Evolve {
    std::string data = "constant:1.0";
    double R = 10.0;
    double h0 = 0.05;
    double growth = 1.03;
    double t_end = 10.0;
    long max_steps = 2000000;
    double shrink = 2.0;              // u_app data: stop when T - t has shrunk by this factor
    double cells_per_lambda = 40.0;   // u_app data
  } evolve;

  struct Energy {
    std::vector<double> taus{15.0, 20.0, 25.0, 30.0, 35.0};
    std::vector<double> scaling_taus{50.0, 100.0, 200.0};
  } energy;

  /// Unknown keys and type mismatches raise ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  [[nodiscard]] nlohmann::json to_json() const;
  /// ConfigError naming the first offending field.
  void validate() const;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& field(double v);
  CsvWriter& field(long v);
  CsvWriter& field(const std::string& v);
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

/// Runs f(0..n-1) on up to `jobs` threads; the first exception is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_verify_suite(const RunConfig& config);

/// Outputs written by one command (paths relative to the output directory)
/// and its status.
struct CommandOutcome {
  int exit_code = kOk;
  std::vector<std::string> outputs;
  nlohmann::json summary;
};

CommandOutcome cmd_verify(const RunConfig& c, const std::filesystem::path& out);
CommandOutcome cmd_profile(const RunConfig& c, const std::filesystem::path& out);
CommandOutcome cmd_residual(const RunConfig& c, const std::filesystem::path& out);
CommandOutcome cmd_spectrum(const RunConfig& c, const std::filesystem::path& out);
CommandOutcome cmd_evolve(const RunConfig& c, const std::filesystem::path& out);
CommandOutcome cmd_energy(const RunConfig& c, const std::filesystem::path& out);

/// Full command line front end; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace blowup::cli
