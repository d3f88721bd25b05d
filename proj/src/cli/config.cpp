#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "blowup6/cli.hpp"

namespace blowup::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void require_taus(const std::vector<double>& taus, double lo, double hi, const std::string& where) {
  require(!taus.empty(), where + ": empty list");
  for (double t : taus)
    require(std::isfinite(t) && t >= lo && t <= hi,
            where + ": tau " + format_double(t) + " outside [" + format_double(lo) + ", " + format_double(hi) + "]");
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  check_keys(j, "config", {"schema_version", "T", "jobs", "tol", "seed", "verify", "profile", "residual", "spectrum",
                           "evolve", "energy"});
  read(j, "schema_version", c.schema_version, "config");
  if (c.schema_version != 1) throw ConfigError("config.schema_version: only version 1 is supported");
  read(j, "T", c.T, "config");
  read(j, "jobs", c.jobs, "config");
  read(j, "tol", c.tol, "config");
  read(j, "seed", c.seed, "config");
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    check_keys(v, "verify", {"alpha_scale", "samples", "gamma_nodes"});
    read(v, "alpha_scale", c.verify.alpha_scale, "verify");
    read(v, "samples", c.verify.samples, "verify");
    read(v, "gamma_nodes", c.verify.gamma_nodes, "verify");
  }
  if (j.contains("profile")) {
    const auto& v = j["profile"];
    check_keys(v, "profile", {"taus", "points", "z_max"});
    read(v, "taus", c.profile.taus, "profile");
    read(v, "points", c.profile.points, "profile");
    read(v, "z_max", c.profile.z_max, "profile");
  }
  if (j.contains("residual")) {
    const auto& v = j["residual"];
    check_keys(v, "residual", {"taus"});
    read(v, "taus", c.residual.taus, "residual");
  }
  if (j.contains("spectrum")) {
    const auto& v = j["spectrum"];
    check_keys(v, "spectrum", {"R", "M", "pm_rmax", "fd_cells"});
    read(v, "R", c.spectrum.R, "spectrum");
    read(v, "M", c.spectrum.M, "spectrum");
    read(v, "pm_rmax", c.spectrum.pm_rmax, "spectrum");
    read(v, "fd_cells", c.spectrum.fd_cells, "spectrum");
  }
  if (j.contains("evolve")) {
    const auto& v = j["evolve"];
    check_keys(v, "evolve", {"data", "R", "h0", "growth", "t_end", "max_steps", "shrink", "cells_per_lambda"});
    read(v, "data", c.evolve.data, "evolve");
    read(v, "R", c.evolve.R, "evolve");
    read(v, "h0", c.evolve.h0, "evolve");
    read(v, "growth", c.evolve.growth, "evolve");
    read(v, "t_end", c.evolve.t_end, "evolve");
    read(v, "max_steps", c.evolve.max_steps, "evolve");
    read(v, "shrink", c.evolve.shrink, "evolve");
    read(v, "cells_per_lambda", c.evolve.cells_per_lambda, "evolve");
  }
  if (j.contains("energy")) {
    const auto& v = j["energy"];
    check_keys(v, "energy", {"taus", "scaling_taus"});
    read(v, "taus", c.energy.taus, "energy");
    read(v, "scaling_taus", c.energy.scaling_taus, "energy");
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  return {
      {"schema_version", schema_version},
      {"T", T},
      {"jobs", jobs},
      {"tol", tol},
      {"seed", seed},
      {"verify", {{"alpha_scale", verify.alpha_scale}, {"samples", verify.samples}, {"gamma_nodes", verify.gamma_nodes}}},
      {"profile", {{"taus", profile.taus}, {"points", profile.points}, {"z_max", profile.z_max}}},
      {"residual", {{"taus", residual.taus}}},
      {"spectrum",
       {{"R", spectrum.R}, {"M", spectrum.M}, {"pm_rmax", spectrum.pm_rmax}, {"fd_cells", spectrum.fd_cells}}},
      {"evolve",
       {{"data", evolve.data},
        {"R", evolve.R},
        {"h0", evolve.h0},
        {"growth", evolve.growth},
        {"t_end", evolve.t_end},
        {"max_steps", evolve.max_steps},
        {"shrink", evolve.shrink},
        {"cells_per_lambda", evolve.cells_per_lambda}}},
      {"energy", {{"taus", energy.taus}, {"scaling_taus", energy.scaling_taus}}},
  };
}

void RunConfig::validate() const {
  require(std::isfinite(T) && T > 0.0, "T must be positive");
  require(jobs >= 1 && jobs <= 256, "jobs must be in [1, 256]");
  require(std::isfinite(tol) && tol > 0.0, "tol must be positive");

  require(std::isfinite(verify.alpha_scale) && verify.alpha_scale > 0.0, "verify.alpha_scale must be positive");
  require(verify.samples >= 1 && verify.samples <= 100000, "verify.samples must be in [1, 100000]");
  require(verify.gamma_nodes >= 500, "verify.gamma_nodes below the minimum of 500");

  require_taus(profile.taus, 10.0, 45.0, "profile.taus");
  require(profile.points >= 2 && profile.points <= 1000000, "profile.points must be in [2, 1e6]");
  require(std::isfinite(profile.z_max) && profile.z_max > 0.0 && profile.z_max <= 50.0,
          "profile.z_max must be in (0, 50]");

  require_taus(residual.taus, 10.0, 45.0, "residual.taus");

  require(!spectrum.R.empty(), "spectrum.R: empty list");
  for (double R : spectrum.R) require(std::isfinite(R) && R >= 5.0 && R <= 200.0, "spectrum.R must lie in [5, 200]");
  for (double M : spectrum.M)
    require(std::isfinite(M) && M > 0.0 && 10.0 * M <= spectrum.pm_rmax, "spectrum.M must lie in (0, pm_rmax/10]");
  require(spectrum.fd_cells >= 100, "spectrum.fd_cells below the minimum of 100");

  require(std::isfinite(evolve.R) && evolve.R > 0.0, "evolve.R must be positive");
  require(std::isfinite(evolve.h0) && evolve.h0 > 0.0 && evolve.h0 < evolve.R / 10.0,
          "evolve.h0 must be in (0, R/10)");
  require(std::isfinite(evolve.growth) && evolve.growth >= 1.0 && evolve.growth <= 1.5,
          "evolve.growth must be in [1, 1.5]");
  require(std::isfinite(evolve.t_end) && evolve.t_end > 0.0, "evolve.t_end must be positive");
  require(evolve.max_steps >= 1, "evolve.max_steps must be positive");
  require(std::isfinite(evolve.shrink) && evolve.shrink > 1.0, "evolve.shrink must exceed 1");
  require(std::isfinite(evolve.cells_per_lambda) && evolve.cells_per_lambda >= 4.0,
          "evolve.cells_per_lambda must be at least 4");
  {
    const auto& d = evolve.data;
    const auto colon = d.find(':');
    const std::string kind = d.substr(0, colon);
    double v = 0.0;
    bool ok = false;
    if (kind == "zero") {
      ok = colon == std::string::npos;
    } else if ((kind == "constant" || kind == "uapp") && colon != std::string::npos) {
      const std::string arg = d.substr(colon + 1);
      std::size_t used = 0;
      try {
        v = std::stod(arg, &used);
        ok = used == arg.size() && std::isfinite(v);
      } catch (const std::exception&) {
        ok = false;
      }
      if (ok && kind == "uapp") ok = v >= 10.0 && v <= 40.0;
    }
    require(ok, "evolve.data must be zero, constant:<A> or uapp:<tau0> with tau0 in [10, 40]; got '" + d + "'");
  }

  require_taus(energy.taus, 10.0, 45.0, "energy.taus");
  require_taus(energy.scaling_taus, 10.0, 1e6, "energy.scaling_taus");
}

}  // namespace blowup::cli
