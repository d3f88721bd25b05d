#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "blowup6/cli.hpp"
#include "blowup6/energy.hpp"
#include "blowup6/errors.hpp"
#include "blowup6/evolver.hpp"
#include "blowup6/kernels.hpp"
#include "blowup6/profile.hpp"
#include "blowup6/spectral_solver.hpp"

#ifndef BLOWUP6_VERSION
#define BLOWUP6_VERSION "unknown"
#endif

namespace blowup::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

json rate_fit_json(const RateFit& f) {
  return {{"T_est", num(f.T_est)},   {"a", num(f.a)},           {"b", num(f.b)},
          {"c", num(f.c)},           {"a_stderr", num(f.a_stderr)}, {"b_stderr", num(f.b_stderr)},
          {"residual", num(f.residual)}, {"decades", num(f.decades)}, {"b_fixed", f.b_fixed},
          {"reliable", f.reliable}};
}

}  // namespace

CommandOutcome cmd_verify(const RunConfig& c, const fs::path& out) {
  CommandOutcome res;
  const auto checks = run_verify_suite(c);
  bool all = true;
  json arr = json::array();
  for (const auto& k : checks) {
    all = all && k.passed;
    arr.push_back({{"name", k.name}, {"passed", k.passed}, {"value", num(k.value)}, {"tolerance", k.tolerance},
                   {"detail", k.detail}});
    std::cout << (k.passed ? "PASS " : "FAIL ") << k.name << "  value=" << format_double(k.value)
              << " tol=" << format_double(k.tolerance) << "  " << k.detail << '\n';
  }
  write_json(out / "verify.json", {{"passed", all}, {"checks", arr}});
  res.outputs = {"verify.json"};
  res.summary = {{"passed", all}, {"checks", checks.size()}};
  res.exit_code = all ? kOk : kCheckFailed;
  return res;
}

CommandOutcome cmd_profile(const RunConfig& c, const fs::path& out) {
  const auto profile = BlowupProfile::standard(c.T);
  CsvWriter csv(out / "profile.csv", {"t", "tau", "x", "z", "y", "u_app", "theta", "Q_term", "T1_term", "chi1"});
  for (double tau : sorted(c.profile.taus)) {
    const double s = std::exp(-tau);
    const auto rates = rates_from_remaining(s);
    std::vector<double> xs{0.0};
    const double x_lo = 1e-2 * rates.lambda0, x_hi = c.profile.z_max * std::sqrt(s);
    const std::size_t n = c.profile.points - 1;
    for (std::size_t i = 0; i < n; ++i)
      xs.push_back(n == 1 ? x_hi : x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / static_cast<double>(n - 1)));
    for (double x : xs) {
      const auto t = profile.terms(x, s);
      csv.field(c.T - s).field(tau).field(x).field(t.z).field(t.y).field(t.value()).field(t.theta);
      csv.field(t.Q_term).field(t.T1_term).field(t.chi1);
      csv.end_row();
    }
  }
  CommandOutcome res;
  res.outputs = {"profile.csv"};
  res.summary = {{"taus", sorted(c.profile.taus)}, {"points_per_tau", c.profile.points}};
  return res;
}

CommandOutcome cmd_residual(const RunConfig& c, const fs::path& out) {
  const auto profile = BlowupProfile::standard(c.T);
  ResidualSampleSpec spec;
  spec.taus = sorted(c.residual.taus);
  const auto field = pde_residual(profile, spec);
  CsvWriter csv(out / "residual.csv", {"t", "tau", "x", "region", "residual", "normalized_residual"});
  for (const auto& smp : field.samples) {
    csv.field(c.T - smp.s).field(smp.tau).field(smp.x).field(region_name(smp.region)).field(smp.residual);
    csv.field(smp.normalized).end_row();
  }
  CommandOutcome res;
  res.outputs = {"residual.csv"};
  res.summary = {{"max_inner_normalized", num(field.max_inner_normalized)},
                 {"max_selfsimilar_normalized", num(field.max_selfsimilar_normalized)},
                 {"max_fd_gap", num(field.max_fd_gap)},
                 {"fd_observed_order", num(field.fd_observed_order)}};
  return res;
}

CommandOutcome cmd_spectrum(const RunConfig& c, const fs::path& out) {
  const auto Rs = sorted(c.spectrum.R);
  const auto V = ground_state_potential();
  struct Row {
    EigenResult e1, e2;
    std::vector<double> fd;
  };
  std::vector<Row> rows(Rs.size());
  parallel_for(Rs.size(), c.jobs, [&](std::size_t i) {
    rows[i].e1 = solve_dirichlet_eigen(Rs[i], 1, V);
    rows[i].e2 = solve_dirichlet_eigen(Rs[i], 2, V);
    rows[i].fd = fd_dirichlet_eigenvalues(Rs[i], c.spectrum.fd_cells, V, 2);
  });
  CsvWriter csv(out / "spectrum.csv", {"R", "mu1", "mu1_residual", "mu1_zeros", "mu2", "mu2_residual", "mu2_zeros",
                                       "mu2_R4", "fd_mu1", "fd_mu2"});
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    const auto& r = rows[i];
    csv.field(Rs[i]).field(r.e1.mu).field(r.e1.residual).field(static_cast<long>(r.e1.zeros));
    csv.field(r.e2.mu).field(r.e2.residual).field(static_cast<long>(r.e2.zeros));
    csv.field(r.e2.mu * std::pow(Rs[i], 4)).field(r.fd[0]).field(r.fd[1]).end_row();
  }

  const auto Ms = sorted(c.spectrum.M);
  std::vector<PerturbedSolution> pms(Ms.size());
  parallel_for(Ms.size(), c.jobs, [&](std::size_t i) { pms[i] = solve_pM(Ms[i], c.spectrum.pm_rmax, V); });
  CsvWriter pcsv(out / "pm.csv", {"M", "r_max", "min_p", "max_p", "within_bounds"});
  for (const auto& p : pms) {
    double mx = 0.0;
    for (double v : p.pm.values()) mx = std::max(mx, v);
    pcsv.field(p.M).field(p.r_max).field(p.lower_bound).field(mx).field(std::string(p.within_bounds ? "1" : "0"));
    pcsv.end_row();
  }

  CommandOutcome res;
  res.outputs = {"spectrum.csv", "pm.csv"};
  json mu1 = json::array();
  bool all_negative = true;
  for (const auto& r : rows) {
    mu1.push_back(r.e1.mu);
    all_negative = all_negative && r.e1.mu < 0.0;
  }
  res.summary = {{"R", Rs}, {"mu1", mu1}, {"mu1_all_negative", all_negative}};
  if (Rs.size() >= 2) {
    const auto gap = gap_scaling_check(Rs, V);
    res.summary["mu2_R4_min"] = gap.min_scaled;
    res.summary["mu2_R4_band_ratio"] = gap.band_ratio;
  }
  return res;
}

CommandOutcome cmd_evolve(const RunConfig& c, const fs::path& out) {
  const auto& ev = c.evolve;
  std::shared_ptr<const BlowupProfile> profile;
  if (ev.data.rfind("uapp", 0) == 0) profile = std::make_shared<const BlowupProfile>(BlowupProfile::standard(c.T));
  const auto data = DataSpec::parse(ev.data, profile);

  CommandOutcome res;
  std::vector<HistorySample> history;
  json summary = {{"data", ev.data}, {"kernels", std::string(kernels::active_kernels().name)}};
  if (data.kind == DataSpec::Kind::Uapp) {
    TrackingOptions to;
    to.tau0 = data.tau0;
    to.shrink = ev.shrink;
    to.domain_radius = ev.R;
    to.cells_per_lambda = ev.cells_per_lambda;
    to.growth = ev.growth;
    to.max_steps = ev.max_steps;
    const auto rep = track_uapp(profile, to);
    if (rep.status == RunStatus::Unstable)
      throw NumericalError("evolve: Newton failed to converge at step " + std::to_string(rep.steps));
    history = rep.history;
    summary["scheme"] = "implicit_remainder";
    summary["status"] = status_name(rep.status);
    summary["steps"] = rep.steps;
    summary["nodes"] = rep.nodes;
    summary["worst_relative_deviation"] = rep.worst_deviation;
    summary["T_est"] = c.T;
    summary["rate_fit"] = rate_fit_json(rep.fit);
    summary["rate_fit_free"] = rate_fit_json(rep.fit_free);
  } else {
    EvolverOptions eo;
    eo.scheme = Scheme::Explicit;
    auto st = init(data, ev.R, {ev.h0, ev.growth, 20}, eo);
    evolve(st, ev.t_end, ev.max_steps);
    history.assign(st.history.begin(), st.history.end());
    summary["scheme"] = "explicit";
    summary["status"] = status_name(st.status);
    summary["steps"] = st.step_count;
    summary["nodes"] = st.grid.size();
    summary["final_t"] = st.t;
    summary["final_sup"] = history.empty() ? 0.0 : history.back().sup_abs;
    if (st.status == RunStatus::BlownUp) {
      const auto est = estimate_blowup_time(st.history);
      summary["T_est"] = est.T_est;
      summary["T_est_width"] = est.width;
      std::vector<RatePoint> pts;
      for (const auto& h : history)
        if (h.u_center > 0.0 && h.t < est.T_est) pts.push_back({h.t, extract_lambda(h.u_center)});
      if (pts.size() >= 4) {
        const std::size_t from = pts.size() / 2;
        summary["rate_fit"] = rate_fit_json(
            fit_type2_rate(std::span<const RatePoint>(pts).subspan(from), est.T_est, 0.0));
      }
    } else {
      summary["T_est"] = nullptr;
    }
  }
  CsvWriter csv(out / "evolve.csv", {"step", "t", "dt", "u_center", "sup_abs", "min_u", "lambda_est"});
  for (const auto& h : history) {
    csv.field(h.step).field(h.t).field(h.dt).field(h.u_center).field(h.sup_abs).field(h.min_u);
    csv.field(h.u_center > 0.0 ? 1.0 / std::sqrt(h.u_center) : std::nan("")).end_row();
  }
  write_json(out / "summary.json", summary);
  res.outputs = {"evolve.csv", "summary.json"};
  res.summary = summary;
  return res;
}

CommandOutcome cmd_energy(const RunConfig& c, const fs::path& out) {
  const auto profile = BlowupProfile::standard(c.T);
  std::vector<double> taus = c.energy.taus;
  taus.insert(taus.end(), c.energy.scaling_taus.begin(), c.energy.scaling_taus.end());
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  const auto uapp_taus = sorted(c.energy.taus);

  struct Row {
    std::optional<EnergyReport> e;
    ThetaIntegrals th;
  };
  std::vector<Row> rows(taus.size());
  parallel_for(taus.size(), c.jobs, [&](std::size_t i) {
    if (std::binary_search(uapp_taus.begin(), uapp_taus.end(), taus[i]))
      rows[i].e = local_energy_uapp(profile, taus[i]);
    rows[i].th = theta_scaling_integrals(profile.basis(), taus[i]);
  });

  CsvWriter csv(out / "energy.csv", {"tau", "t", "grad_term", "cubic_term", "e_loc", "I3", "Igrad",
                                     "I3_over_tau3logtau", "Igrad_over_tau2logtau"});
  const double nan = std::nan("");
  std::vector<double> e_series;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const auto& r = rows[i];
    csv.field(taus[i]).field(c.T - std::exp(-taus[i]));
    csv.field(r.e ? r.e->grad_term : nan).field(r.e ? r.e->cubic_term : nan).field(r.e ? r.e->e_loc : nan);
    csv.field(r.th.I3).field(r.th.Igrad).field(r.th.I3_ratio()).field(r.th.Igrad_ratio()).end_row();
    if (r.e) e_series.push_back(r.e->e_loc);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < e_series.size(); ++i) decreasing = decreasing && e_series[i] < e_series[i - 1];

  const auto eq1 = local_energy_Q(1.0);
  const auto eq_conc = local_energy_Q(1e-3);
  json summary = {{"e_loc_decreasing", decreasing},
                  {"e_loc_Q_lambda1", eq1.e_loc},
                  {"e_loc_Q_lambda1e-3", eq_conc.e_loc}};
  write_json(out / "energy.json", summary);
  CommandOutcome res;
  res.outputs = {"energy.csv", "energy.json"};
  res.summary = summary;
  return res;
}

namespace {

struct Overrides {
  std::string config_path;
  std::string out_dir = "out";
  int jobs = 0;
  std::vector<double> tau, R, M;
  std::string data;
  double tol = 0.0;
  double alpha_scale = 0.0;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON run configuration");
  sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  sub->add_option("--jobs", o.jobs, "worker threads for sweeps");
  sub->add_option("--tau", o.tau, "tau values (comma separated)")->delimiter(',');
  sub->add_option("--R", o.R, "radii (comma separated); evolve uses the first as domain radius")->delimiter(',');
  sub->add_option("--M", o.M, "cutoff radii for p_M (comma separated)")->delimiter(',');
  sub->add_option("--data", o.data, "evolve data: constant:<A>, zero, uapp:<tau0>");
  sub->add_option("--tol", o.tol, "tolerance for the verify suite");
}

void apply(const std::string& cmd, const Overrides& o, RunConfig& c) {
  if (o.jobs != 0) c.jobs = o.jobs;
  if (o.tol != 0.0) c.tol = o.tol;
  if (o.alpha_scale != 0.0) c.verify.alpha_scale = o.alpha_scale;
  if (!o.tau.empty()) {
    if (cmd == "profile") c.profile.taus = o.tau;
    if (cmd == "residual") c.residual.taus = o.tau;
    if (cmd == "energy") c.energy.taus = o.tau;
  }
  if (!o.R.empty()) {
    if (cmd == "spectrum") c.spectrum.R = o.R;
    if (cmd == "evolve") c.evolve.R = o.R.front();
  }
  if (!o.M.empty() && cmd == "spectrum") c.spectrum.M = o.M;
  if (!o.data.empty()) c.evolve.data = o.data;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Numerical laboratory for type II blowup of u_t = Laplace u + |u| u in six dimensions"};
  app.require_subcommand(1);
  Overrides o;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"verify", "run the identity suite and write verify.json"},
      {"profile", "tabulate u_app and its pieces"},
      {"residual", "tabulate the PDE residual of u_app"},
      {"spectrum", "ball eigenvalues and p_M"},
      {"evolve", "radial evolution from constant, zero or u_app data"},
      {"energy", "local energy of u_app and the Theta scaling integrals"},
  };
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    if (name == "verify") sub->add_option("--alpha-scale", o.alpha_scale, "multiply alpha (sensitivity control)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    if (!o.config_path.empty()) cfg = RunConfig::load(o.config_path);
    apply(cmd, o, cfg);
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }

  const fs::path out = o.out_dir;
  const fs::path staging = out / (".staging-" + cmd);
  const auto t0 = std::chrono::steady_clock::now();
  CommandOutcome res;
  int code = kOk;
  std::string error;
  try {
    fs::create_directories(out);
    fs::remove_all(staging);
    fs::create_directories(staging);
    if (cmd == "verify") res = cmd_verify(cfg, staging);
    else if (cmd == "profile") res = cmd_profile(cfg, staging);
    else if (cmd == "residual") res = cmd_residual(cfg, staging);
    else if (cmd == "spectrum") res = cmd_spectrum(cfg, staging);
    else if (cmd == "evolve") res = cmd_evolve(cfg, staging);
    else res = cmd_energy(cfg, staging);
    code = res.exit_code;
  } catch (const InvalidArgument& e) {
    code = kInvalidConfig;
    error = e.what();
  } catch (const ConfigError& e) {
    code = kInvalidConfig;
    error = e.what();
  } catch (const std::exception& e) {
    code = kNumericalFailure;
    error = e.what();
  }
  if (!error.empty()) {
    std::cerr << cmd << " failed: " << error << '\n';
    std::error_code ec;
    fs::remove_all(staging, ec);
    return code;
  }
  for (const auto& f : res.outputs) fs::rename(staging / f, out / f);
  fs::remove_all(staging);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest = {{"schema_version", 1},
                   {"subcommand", cmd},
                   {"version", BLOWUP6_VERSION},
                   {"config", cfg.to_json()},
                   {"outputs", res.outputs},
                   {"summary", res.summary},
                   {"exit_code", code},
                   {"wall_time_s", wall}};
  write_json(out / "manifest.json", manifest);
  return code;
}

}  // namespace blowup::cli
