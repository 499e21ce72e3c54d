#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "predprey/ctmc.hpp"
#include "predprey/io.hpp"
#include "predprey/model.hpp"
#include "predprey/montecarlo.hpp"
#include "predprey/ode.hpp"
#include "predprey/rng.hpp"
#include "predprey/sde.hpp"
#include "predprey/version.hpp"

namespace fs = std::filesystem;
using namespace predprey;

namespace {

using KvList = std::vector<std::pair<std::string, std::string>>;

std::string fd(double x) { return io::format_double(x); }

// Flags shared by every subcommand. --omega and --rho are mutually
// exclusive; whichever was given drives the parameter construction.
struct CommonOpts {
  double k = 3.0, m = 2.0, c = 0.8;
  double omega = 100.0;
  double rho = 0.1;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  int workers = 0;
  std::string config_file;
  CLI::Option* rho_opt = nullptr;

  ModelParams params() const {
    if (rho_opt != nullptr && rho_opt->count() > 0)
      return ModelParams::from_rho(k, m, c, rho);
    return ModelParams::from_omega(k, m, c, omega);
  }

  void append_to(KvList& kv) const {
    const ModelParams p = params();
    kv.emplace_back("k", fd(p.k));
    kv.emplace_back("m", fd(p.m));
    kv.emplace_back("c", fd(p.c));
    kv.emplace_back("omega", fd(p.omega));
    kv.emplace_back("rho", fd(p.rho));
    kv.emplace_back("seed", std::to_string(seed));
    kv.emplace_back("workers", std::to_string(workers));
    kv.emplace_back("out_dir", out_dir);
  }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--k", o.k, "carrying capacity")->capture_default_str();
  cmd->add_option("--m", o.m, "maximal predation/conversion rate")->capture_default_str();
  cmd->add_option("--c", o.c, "predator mortality rate")->capture_default_str();
  auto* omega_opt =
      cmd->add_option("--omega", o.omega, "system size, >= 1")->capture_default_str();
  o.rho_opt = cmd->add_option("--rho", o.rho, "noise amplitude omega^{-1/2} (excludes --omega)");
  omega_opt->excludes(o.rho_opt);
  o.rho_opt->excludes(omega_opt);
  cmd->add_option("--seed", o.seed, "master seed (64-bit)")->capture_default_str();
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--workers", o.workers, "worker threads, 0 = hardware")->capture_default_str();
  cmd->add_option("--config", o.config_file,
                  "flat `key = value` file, keys = flag names without dashes; flags override");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

// Turn `key = value` lines into --key/value token pairs. Keys match the
// subcommand's long flags with the leading dashes stripped.
std::vector<std::string> config_file_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputDomainError("cannot read config file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputDomainError(path + ":" + std::to_string(lineno) + ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw InputDomainError(path + ":" + std::to_string(lineno) + ": expected `key = value`");
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

// Splice config-file tokens in right after the subcommand name so that
// command-line flags, parsed later under a take-last policy, win.
std::vector<std::string> expand_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto sub = std::find_if(args.begin(), args.end(),
                          [](const std::string& a) { return a.empty() || a[0] != '-'; });
  if (sub == args.end()) return args;
  std::string config_path;
  for (auto it = std::next(sub); it != args.end(); ++it) {
    if (*it == "--config" && std::next(it) != args.end())
      config_path = *std::next(it);
    else if (it->rfind("--config=", 0) == 0)
      config_path = it->substr(9);
  }
  if (config_path.empty()) return args;
  const std::vector<std::string> injected = config_file_tokens(config_path);
  args.insert(std::next(sub), injected.begin(), injected.end());
  return args;
}

const std::map<std::string, sde::FactorizationKind> kind_names{
    {"event", sde::FactorizationKind::Event4D},
    {"cholesky", sde::FactorizationKind::Cholesky2D},
    {"diagonal", sde::FactorizationKind::Diagonal2D}};

struct OutputSet {
  fs::path dir;
  std::vector<std::string> names;

  explicit OutputSet(const std::string& d) : dir(d) { fs::create_directories(dir); }

  void write(const std::string& name, const std::string& content) {
    io::write_text_file((dir / name).string(), content);
    names.push_back(name);
  }

  template <class Fn>
  void write_stream(const std::string& name, Fn&& fn) {
    std::ostringstream os;
    fn(os);
    write(name, os.str());
  }
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void write_manifest(const OutputSet& out, const std::string& subcommand, KvList config,
                    std::uint64_t seed, double wall) {
  io::RunManifest man;
  man.subcommand = subcommand;
  man.resolved_config = std::move(config);
  man.master_seed = seed;
  man.version = version_string;
  man.wall_seconds = wall;
  man.outputs = out.names;
  io::write_text_file((out.dir / "manifest.json").string(), io::manifest_json(man));
}

std::vector<double> uniform_grid(double horizon, double step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw InputDomainError("grid step must be positive and finite");
  const auto n = std::int64_t(std::floor(horizon / step + 1e-9));
  std::vector<double> g;
  g.reserve(std::size_t(n) + 1);
  for (std::int64_t j = 0; j <= n; ++j) g.push_back(double(j) * step);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic predator-prey simulation toolkit"};
  app.set_version_flag("--version", version_string);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // ---- classify ------------------------------------------------------
  auto* classify = app.add_subcommand("classify", "equilibria, Hopf threshold, regime label");
  CommonOpts classify_opts;
  add_common(classify, classify_opts);
  classify->callback([&] {
    const RegimeReport report = classify_regime(classify_opts.params());
    std::fputs(io::regime_report_json(report).c_str(), stdout);
  });

  // ---- ode -----------------------------------------------------------
  auto* ode_cmd = app.add_subcommand("ode", "deterministic trajectory (adaptive RK 4(5))");
  CommonOpts ode_opts;
  add_common(ode_cmd, ode_opts);
  double ode_n0 = 0.8, ode_p0 = 0.6, ode_horizon = 100.0;
  double ode_rel = 1e-8, ode_abs = 1e-10, ode_grid_dt = 0.0;
  ode_cmd->add_option("--n0", ode_n0, "initial prey density")->capture_default_str();
  ode_cmd->add_option("--p0", ode_p0, "initial predator density")->capture_default_str();
  ode_cmd->add_option("--horizon", ode_horizon, "integration horizon")->capture_default_str();
  ode_cmd->add_option("--rel-tol", ode_rel, "relative tolerance")->capture_default_str();
  ode_cmd->add_option("--abs-tol", ode_abs, "absolute tolerance")->capture_default_str();
  ode_cmd->add_option("--grid-dt", ode_grid_dt, "output grid step (0 = solver steps)")
      ->capture_default_str();
  ode_cmd->callback([&] {
    Timer timer;
    const ModelParams p = ode_opts.params();
    std::optional<std::vector<double>> grid;
    if (ode_grid_dt > 0.0) grid = uniform_grid(ode_horizon, ode_grid_dt);
    const ode::OdeTrajectory traj =
        ode::integrate(p, {ode_n0, ode_p0}, ode_horizon, ode_rel, ode_abs, grid);
    OutputSet out(ode_opts.out_dir);
    out.write_stream("trajectory.csv", [&](std::ostream& os) { io::write_ode_csv(os, traj); });
    KvList kv;
    ode_opts.append_to(kv);
    kv.emplace_back("n0", fd(ode_n0));
    kv.emplace_back("p0", fd(ode_p0));
    kv.emplace_back("horizon", fd(ode_horizon));
    kv.emplace_back("rel_tol", fd(ode_rel));
    kv.emplace_back("abs_tol", fd(ode_abs));
    kv.emplace_back("grid_dt", fd(ode_grid_dt));
    write_manifest(out, "ode", std::move(kv), ode_opts.seed, timer.seconds());
    std::printf("final_state N=%.6g P=%.6g\n", traj.states.back().N, traj.states.back().P);
  });

  // ---- ssa -----------------------------------------------------------
  auto* ssa = app.add_subcommand("ssa", "exact jump-process path (Gillespie direct method)");
  CommonOpts ssa_opts;
  add_common(ssa, ssa_opts);
  double ssa_n0 = 0.8, ssa_p0 = 0.6, ssa_horizon = 10.0, ssa_grid_dt = 0.1;
  std::int64_t ssa_budget = ctmc::default_jump_budget;
  ssa->add_option("--n0", ssa_n0, "initial prey density (counts = round(omega*n0))")
      ->capture_default_str();
  ssa->add_option("--p0", ssa_p0, "initial predator density")->capture_default_str();
  ssa->add_option("--horizon", ssa_horizon, "simulation horizon")->capture_default_str();
  ssa->add_option("--grid-dt", ssa_grid_dt, "density output grid step")->capture_default_str();
  ssa->add_option("--max-jumps", ssa_budget, "per-path jump budget")->capture_default_str();
  ssa->callback([&] {
    Timer timer;
    const ModelParams p = ssa_opts.params();
    const ctmc::CountState x0{std::llround(p.omega * ssa_n0), std::llround(p.omega * ssa_p0)};
    RngStream stream = derive_stream(ssa_opts.seed, "ssa/path", 0);
    const ctmc::JumpPath path = ctmc::simulate(p, x0, ssa_horizon, stream, ssa_budget);
    const std::vector<double> grid = uniform_grid(ssa_horizon, ssa_grid_dt);
    const std::vector<DensityState> density = ctmc::density_path(path, grid);
    OutputSet out(ssa_opts.out_dir);
    out.write_stream("jumps.csv", [&](std::ostream& os) { io::write_jump_csv(os, path); });
    out.write_stream("density.csv",
                     [&](std::ostream& os) { io::write_density_csv(os, grid, density); });
    KvList kv;
    ssa_opts.append_to(kv);
    kv.emplace_back("n0", fd(ssa_n0));
    kv.emplace_back("p0", fd(ssa_p0));
    kv.emplace_back("horizon", fd(ssa_horizon));
    kv.emplace_back("grid_dt", fd(ssa_grid_dt));
    kv.emplace_back("max_jumps", std::to_string(ssa_budget));
    write_manifest(out, "ssa", std::move(kv), ssa_opts.seed, timer.seconds());
    const ctmc::CountState last = path.states.empty() ? path.x0 : path.states.back();
    std::printf("jumps=%zu final_n=%lld final_p=%lld\n", path.jump_times.size(),
                static_cast<long long>(last.n), static_cast<long long>(last.p));
  });

  // ---- sde -----------------------------------------------------------
  auto* sde_cmd = app.add_subcommand("sde", "single absorbed Euler-Maruyama path");
  CommonOpts sde_opts;
  add_common(sde_cmd, sde_opts);
  double sde_n0 = 0.8, sde_p0 = 0.6, sde_dt = 1e-2, sde_horizon = 100.0;
  sde::FactorizationKind sde_kind = sde::FactorizationKind::Cholesky2D;
  sde_cmd->add_option("--n0", sde_n0, "initial prey density")->capture_default_str();
  sde_cmd->add_option("--p0", sde_p0, "initial predator density")->capture_default_str();
  sde_cmd->add_option("--dt", sde_dt, "time step")->capture_default_str();
  sde_cmd->add_option("--horizon", sde_horizon, "simulation horizon")->capture_default_str();
  sde_cmd->add_option("--kind", sde_kind, "noise factorization: event|cholesky|diagonal")
      ->transform(CLI::CheckedTransformer(kind_names, CLI::ignore_case));
  sde_cmd->callback([&] {
    Timer timer;
    const ModelParams p = sde_opts.params();
    RngStream stream = derive_stream(
        sde_opts.seed, std::string("em/") + sde::factorization_name(sde_kind), 0);
    const sde::AbsorbedPath path =
        sde::simulate_absorbed(p, {sde_n0, sde_p0}, sde_dt, sde_horizon, sde_kind, stream);
    OutputSet out(sde_opts.out_dir);
    out.write_stream("path.csv", [&](std::ostream& os) { io::write_absorbed_csv(os, path); });
    out.write("summary.json", io::path_summary_json(path));
    KvList kv;
    sde_opts.append_to(kv);
    kv.emplace_back("n0", fd(sde_n0));
    kv.emplace_back("p0", fd(sde_p0));
    kv.emplace_back("dt", fd(sde_dt));
    kv.emplace_back("horizon", fd(sde_horizon));
    kv.emplace_back("kind", sde::factorization_name(sde_kind));
    write_manifest(out, "sde", std::move(kv), sde_opts.seed, timer.seconds());
    if (path.absorption_time)
      std::printf("absorbed t=%.6g axis=%s\n", *path.absorption_time,
                  sde::absorbed_axis_name(*path.absorbed_axis));
    else
      std::printf("survived horizon final N=%.6g P=%.6g\n", path.states.back().N,
                  path.states.back().P);
  });

  // ---- shared ensemble options helper --------------------------------
  struct EnsembleOpts {
    double n0 = 0.8, p0 = 0.6, dt = 1e-2, horizon = 100.0;
    std::int64_t paths = 2000, stride = 10;

    void add_to(CLI::App* cmd) {
      cmd->add_option("--n0", n0, "initial prey density")->capture_default_str();
      cmd->add_option("--p0", p0, "initial predator density")->capture_default_str();
      cmd->add_option("--dt", dt, "time step")->capture_default_str();
      cmd->add_option("--horizon", horizon, "simulation horizon")->capture_default_str();
      cmd->add_option("--paths", paths, "number of Monte Carlo paths")->capture_default_str();
      cmd->add_option("--stride", stride, "output grid stride in steps")->capture_default_str();
    }

    mc::EnsembleConfig config(const CommonOpts& common, sde::FactorizationKind kind) const {
      mc::EnsembleConfig cfg;
      cfg.params = common.params();
      cfg.z0 = {n0, p0};
      cfg.dt = dt;
      cfg.horizon = horizon;
      cfg.kind = kind;
      cfg.n_paths = paths;
      cfg.master_seed = common.seed;
      cfg.output_grid_stride = stride;
      return cfg;
    }

    void append_to(KvList& kv) const {
      kv.emplace_back("n0", fd(n0));
      kv.emplace_back("p0", fd(p0));
      kv.emplace_back("dt", fd(dt));
      kv.emplace_back("horizon", fd(horizon));
      kv.emplace_back("paths", std::to_string(paths));
      kv.emplace_back("stride", std::to_string(stride));
    }
  };

  // ---- survival ------------------------------------------------------
  auto* survival = app.add_subcommand("survival", "absorbed-EM ensemble survival curve");
  CommonOpts survival_opts;
  add_common(survival, survival_opts);
  EnsembleOpts survival_ens;
  survival_ens.add_to(survival);
  sde::FactorizationKind survival_kind = sde::FactorizationKind::Cholesky2D;
  survival->add_option("--kind", survival_kind, "noise factorization: event|cholesky|diagonal")
      ->transform(CLI::CheckedTransformer(kind_names, CLI::ignore_case));
  survival->callback([&] {
    Timer timer;
    const mc::EnsembleConfig cfg = survival_ens.config(survival_opts, survival_kind);
    const mc::EnsembleStats stats = mc::run_ensemble(cfg, survival_opts.workers);
    OutputSet out(survival_opts.out_dir);
    out.write_stream("survival.csv", [&](std::ostream& os) {
      io::write_survival_csv(os, stats.grid, stats.survival);
    });
    out.write("stats.json", io::ensemble_stats_json(stats, cfg));
    KvList kv;
    survival_opts.append_to(kv);
    survival_ens.append_to(kv);
    kv.emplace_back("kind", sde::factorization_name(survival_kind));
    write_manifest(out, "survival", std::move(kv), survival_opts.seed, timer.seconds());
    std::printf("survivor_fraction=%.6g\n", stats.survivor_fraction);
  });

  // ---- compare-fact --------------------------------------------------
  auto* cfact = app.add_subcommand("compare-fact",
                                   "event vs Cholesky factorization consistency");
  CommonOpts cfact_opts;
  add_common(cfact, cfact_opts);
  EnsembleOpts cfact_ens;
  cfact_ens.add_to(cfact);
  cfact->callback([&] {
    Timer timer;
    const mc::EnsembleConfig base =
        cfact_ens.config(cfact_opts, sde::FactorizationKind::Cholesky2D);
    const mc::FactorizationComparison cmp =
        mc::compare_factorizations(base, cfact_opts.workers);
    OutputSet out(cfact_opts.out_dir);
    out.write_stream("survival_event.csv", [&](std::ostream& os) {
      io::write_survival_csv(os, cmp.stats_event.grid, cmp.stats_event.survival);
    });
    out.write_stream("survival_cholesky.csv", [&](std::ostream& os) {
      io::write_survival_csv(os, cmp.stats_cholesky.grid, cmp.stats_cholesky.survival);
    });
    mc::EnsembleConfig cfg_event = base;
    cfg_event.kind = sde::FactorizationKind::Event4D;
    out.write("stats_event.json", io::ensemble_stats_json(cmp.stats_event, cfg_event));
    out.write("stats_cholesky.json", io::ensemble_stats_json(cmp.stats_cholesky, base));
    out.write("report.json", io::factorization_comparison_json(cmp));
    KvList kv;
    cfact_opts.append_to(kv);
    cfact_ens.append_to(kv);
    write_manifest(out, "compare-fact", std::move(kv), cfact_opts.seed, timer.seconds());
    std::printf("survivor_fraction event=%.6g cholesky=%.6g sup_diff=%.6g overlap=%.6g\n",
                cmp.stats_event.survivor_fraction, cmp.stats_cholesky.survivor_fraction,
                cmp.survival_sup_diff, cmp.terminal_hist_overlap);
  });

  // ---- compare-cov ---------------------------------------------------
  auto* ccov = app.add_subcommand("compare-cov", "full covariance vs diagonal surrogate");
  CommonOpts ccov_opts;
  add_common(ccov, ccov_opts);
  EnsembleOpts ccov_ens;
  ccov_ens.add_to(ccov);
  ccov->callback([&] {
    Timer timer;
    const mc::EnsembleConfig base =
        ccov_ens.config(ccov_opts, sde::FactorizationKind::Cholesky2D);
    const mc::CovarianceComparison cmp = mc::compare_covariance(base, ccov_opts.workers);
    OutputSet out(ccov_opts.out_dir);
    out.write_stream("survival_full.csv", [&](std::ostream& os) {
      io::write_survival_csv(os, cmp.stats_full.grid, cmp.stats_full.survival);
    });
    out.write_stream("survival_diag.csv", [&](std::ostream& os) {
      io::write_survival_csv(os, cmp.stats_diagonal.grid, cmp.stats_diagonal.survival);
    });
    mc::EnsembleConfig cfg_diag = base;
    cfg_diag.kind = sde::FactorizationKind::Diagonal2D;
    out.write("stats_full.json", io::ensemble_stats_json(cmp.stats_full, base));
    out.write("stats_diag.json", io::ensemble_stats_json(cmp.stats_diagonal, cfg_diag));
    out.write_stream("cloud_full.csv",
                     [&](std::ostream& os) { io::write_cloud_csv(os, cmp.terminal_cloud_full); });
    out.write_stream("cloud_diag.csv",
                     [&](std::ostream& os) { io::write_cloud_csv(os, cmp.terminal_cloud_diag); });
    out.write("report.json", io::covariance_comparison_json(cmp));
    KvList kv;
    ccov_opts.append_to(kv);
    ccov_ens.append_to(kv);
    write_manifest(out, "compare-cov", std::move(kv), ccov_opts.seed, timer.seconds());
    std::printf("survivor_fraction full=%.6g diagonal=%.6g\n", cmp.survivor_fraction_full,
                cmp.survivor_fraction_diagonal);
  });

  // ---- lln -----------------------------------------------------------
  auto* lln = app.add_subcommand("lln", "CTMC ensemble mean vs ODE across system sizes");
  CommonOpts lln_opts;
  add_common(lln, lln_opts);
  double lln_n0 = 0.8, lln_p0 = 0.6, lln_horizon = 10.0, lln_grid_dt = 0.1;
  std::int64_t lln_replicates = 500;
  std::vector<std::int64_t> lln_omegas{100, 1000, 10000};
  lln->add_option("--n0", lln_n0, "initial prey density")->capture_default_str();
  lln->add_option("--p0", lln_p0, "initial predator density")->capture_default_str();
  lln->add_option("--horizon", lln_horizon, "simulation horizon")->capture_default_str();
  lln->add_option("--grid-dt", lln_grid_dt, "comparison grid step")->capture_default_str();
  lln->add_option("--replicates", lln_replicates, "CTMC replicates per omega")
      ->capture_default_str();
  lln->add_option("--omegas", lln_omegas, "comma-separated system sizes")
      ->delimiter(',')
      ->capture_default_str();
  lln->callback([&] {
    Timer timer;
    const ModelParams p = lln_opts.params();
    const std::vector<double> grid = uniform_grid(lln_horizon, lln_grid_dt);
    const mc::LlnReport report =
        mc::lln_diagnostic(p, {lln_n0, lln_p0}, lln_omegas, lln_horizon, lln_replicates, grid,
                           lln_opts.seed, lln_opts.workers);
    OutputSet out(lln_opts.out_dir);
    out.write("lln.json", io::lln_report_json(report));
    KvList kv;
    lln_opts.append_to(kv);
    kv.emplace_back("n0", fd(lln_n0));
    kv.emplace_back("p0", fd(lln_p0));
    kv.emplace_back("horizon", fd(lln_horizon));
    kv.emplace_back("grid_dt", fd(lln_grid_dt));
    kv.emplace_back("replicates", std::to_string(lln_replicates));
    std::string omegas_str;
    for (std::size_t i = 0; i < lln_omegas.size(); ++i)
      omegas_str += (i ? "," : "") + std::to_string(lln_omegas[i]);
    kv.emplace_back("omegas", omegas_str);
    write_manifest(out, "lln", std::move(kv), lln_opts.seed, timer.seconds());
    std::string devs;
    for (std::size_t i = 0; i < report.sup_deviation.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s%.6g", i ? "," : "", report.sup_deviation[i]);
      devs += buf;
    }
    std::printf("sup_deviation=%s\n", devs.c_str());
  });

  // ---- extinction ----------------------------------------------------
  auto* ext = app.add_subcommand("extinction", "extinction statistics of the absorbed ensemble");
  CommonOpts ext_opts;
  add_common(ext, ext_opts);
  double ext_n0 = 0.8, ext_p0 = 0.6, ext_dt = 1e-2, ext_horizon = 500.0;
  std::int64_t ext_paths = 2000;
  ext->add_option("--n0", ext_n0, "initial prey density")->capture_default_str();
  ext->add_option("--p0", ext_p0, "initial predator density")->capture_default_str();
  ext->add_option("--dt", ext_dt, "time step")->capture_default_str();
  ext->add_option("--horizon", ext_horizon, "simulation horizon")->capture_default_str();
  ext->add_option("--paths", ext_paths, "number of Monte Carlo paths")->capture_default_str();
  ext->callback([&] {
    Timer timer;
    const ModelParams p = ext_opts.params();
    const mc::ExtinctionReport report = mc::extinction_probe(
        p, {ext_n0, ext_p0}, ext_dt, ext_horizon, ext_paths, ext_opts.seed, ext_opts.workers);
    OutputSet out(ext_opts.out_dir);
    out.write("report.json", io::extinction_report_json(report));
    KvList kv;
    ext_opts.append_to(kv);
    kv.emplace_back("n0", fd(ext_n0));
    kv.emplace_back("p0", fd(ext_p0));
    kv.emplace_back("dt", fd(ext_dt));
    kv.emplace_back("horizon", fd(ext_horizon));
    kv.emplace_back("paths", std::to_string(ext_paths));
    write_manifest(out, "extinction", std::move(kv), ext_opts.seed, timer.seconds());
    std::printf("extinct_fraction=%.6g predator_axis_fraction=%.6g\n", report.extinct_fraction,
                report.predator_axis_fraction);
  });

  // ---- moments -------------------------------------------------------
  auto* moments = app.add_subcommand("moments", "sup_t of the empirical mean |Z(t^tau)|^p");
  CommonOpts mom_opts;
  add_common(moments, mom_opts);
  EnsembleOpts mom_ens;
  mom_ens.add_to(moments);
  sde::FactorizationKind mom_kind = sde::FactorizationKind::Cholesky2D;
  int mom_p = 2;
  moments->add_option("--kind", mom_kind, "noise factorization: event|cholesky|diagonal")
      ->transform(CLI::CheckedTransformer(kind_names, CLI::ignore_case));
  moments->add_option("--p", mom_p, "moment exponent (2 or 4)")->capture_default_str();
  moments->callback([&] {
    Timer timer;
    const mc::EnsembleConfig cfg = mom_ens.config(mom_opts, mom_kind);
    const double sup = mc::moment_probe(cfg, mom_p, mom_opts.workers);
    OutputSet out(mom_opts.out_dir);
    out.write("report.json", io::moment_report_json(mom_p, sup));
    KvList kv;
    mom_opts.append_to(kv);
    mom_ens.append_to(kv);
    kv.emplace_back("kind", sde::factorization_name(mom_kind));
    kv.emplace_back("p", std::to_string(mom_p));
    write_manifest(out, "moments", std::move(kv), mom_opts.seed, timer.seconds());
    std::printf("sup_moment=%.6g\n", sup);
  });

  try {
    std::vector<std::string> args = expand_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InputDomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
