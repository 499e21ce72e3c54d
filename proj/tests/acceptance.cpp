// Acceptance gate: one line per criterion, nonzero exit if any fails.
// All tolerances are statistical or analytic bands fixed up front; the
// stochastic criteria pin master seeds so the gate is reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "predprey/ctmc.hpp"
#include "predprey/model.hpp"
#include "predprey/montecarlo.hpp"
#include "predprey/ode.hpp"
#include "predprey/rng.hpp"
#include "predprey/sde.hpp"

using namespace predprey;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %02d %-28s %s\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Shared random sample for criteria 1 and 2: 20 parameter sets x 50 interior
// states = 1000 (params, state) pairs.
struct CovSample {
  std::vector<std::pair<ModelParams, DensityState>> pairs;
};

CovSample make_cov_sample() {
  CovSample s;
  RngStream rng = derive_stream(1234, "acceptance/cov-sample", 0);
  for (int ps = 0; ps < 20; ++ps) {
    const ModelParams p = ModelParams::from_omega(0.5 + 5.0 * rng.uniform_open01(),
                                                  0.2 + 3.0 * rng.uniform_open01(),
                                                  0.1 + 2.0 * rng.uniform_open01(),
                                                  1.0 + 1000.0 * rng.uniform_open01());
    for (int st = 0; st < 50; ++st) {
      const double lo = std::log(1e-3), hi = std::log(10.0);
      s.pairs.emplace_back(p, DensityState{std::exp(lo + (hi - lo) * rng.uniform_open01()),
                                           std::exp(lo + (hi - lo) * rng.uniform_open01())});
    }
  }
  return s;
}

void criterion_1_2() {
  Timer timer;
  const CovSample sample = make_cov_sample();
  double err_ev = 0.0, err_chol = 0.0, err_det = 0.0;
  bool cross_negative = true, det_positive = true;
  for (const auto& [p, z] : sample.pairs) {
    const Cov2 sig = covariance(p, z);

    const EventFactor lev = event_factor(p, z);
    double e11 = 0.0, e12 = 0.0, e22 = 0.0;
    for (const Vec2& col : lev.col) {
      e11 += col[0] * col[0];
      e12 += col[0] * col[1];
      e22 += col[1] * col[1];
    }
    err_ev = std::max({err_ev, std::abs(e11 - sig.s11), std::abs(e12 - sig.s12),
                       std::abs(e22 - sig.s22)});

    const Chol2 l = cholesky_factor(p, z);
    err_chol = std::max({err_chol, std::abs(l.l11 * l.l11 - sig.s11),
                         std::abs(l.l11 * l.l21 - sig.s12),
                         std::abs(l.l21 * l.l21 + l.l22 * l.l22 - sig.s22)});

    cross_negative = cross_negative && sig.s12 < 0.0;
    const double det = sig.s11 * sig.s22 - sig.s12 * sig.s12;
    det_positive = det_positive && det > 0.0;
    const double pred = p.m * z.N * z.P / (1.0 + z.N);
    const double expansion =
        (z.N + z.N * z.N / p.k) * (p.c * z.P + pred) + pred * p.c * z.P;
    err_det = std::max(err_det, std::abs(det - expansion) / expansion);
  }
  const double sec = timer.seconds();

  report(1, "factorization-identity",
         err_ev <= 1e-12 && err_chol <= 1e-10 && sec < 1.0,
         fmt("max|L_ev L_ev^T - S| = %.3g (<= 1e-12), max|L_ch L_ch^T - S| = %.3g (<= 1e-10), "
             "%.3fs",
             err_ev, err_chol, sec));
  report(2, "covariance-structure", cross_negative && det_positive && err_det <= 1e-12,
         fmt("S12<0 %s, det>0 %s, det expansion rel err = %.3g (<= 1e-12)",
             cross_negative ? "all" : "VIOLATED", det_positive ? "all" : "VIOLATED", err_det));
}

void criterion_3() {
  const RegimeReport rep = classify_regime(ModelParams::from_omega(3.0, 2.0, 0.8, 100.0));
  const bool ok = rep.n_star && std::abs(*rep.n_star - 0.666667) <= 1e-6 &&
                  rep.p_star && std::abs(*rep.p_star - 0.648148) <= 1e-6 &&
                  rep.hopf_k && std::abs(*rep.hopf_k - 2.333333) <= 1e-6 &&
                  rep.jac_trace_k3 && std::abs(*rep.jac_trace_k3 - 8.89e-2) <= 1e-3 &&
                  rep.regime == Regime::LimitCycle;
  report(3, "equilibria-thresholds", ok,
         fmt("N*=%.6f P*=%.6f hopf_k=%.6f trJ(K3)=%.4g", rep.n_star.value_or(-1.0),
             rep.p_star.value_or(-1.0), rep.hopf_k.value_or(-1.0),
             rep.jac_trace_k3.value_or(0.0)));
}

void criterion_4() {
  Timer timer;
  const ModelParams p = ModelParams::from_omega(1.0, 0.8, 0.8, 100.0);
  const ode::OdeTrajectory traj = ode::integrate(p, {0.5, 0.5}, 200.0);
  const double sec = timer.seconds();
  const DensityState fin = traj.states.back();
  report(4, "subcritical-ode", std::abs(fin.N - 1.0) <= 1e-3 && fin.P <= 1e-6 && sec < 1.0,
         fmt("|N-1| = %.3g (<= 1e-3), P = %.3g (<= 1e-6), %.3fs", std::abs(fin.N - 1.0), fin.P,
             sec));
}

void criterion_5() {
  Timer timer;
  const ModelParams p = ModelParams::from_omega(3.0, 2.0, 0.8, 100.0);
  std::vector<double> grid;
  for (int i = 0; i <= 20000; ++i) grid.push_back(0.01 * i);
  const ode::OdeTrajectory traj = ode::integrate(p, {0.8, 0.6}, 200.0, 1e-8, 1e-10, grid);
  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (grid[i] < 100.0) continue;
    if (traj.states[i].N > traj.states[i - 1].N && traj.states[i].N > traj.states[i + 1].N)
      maxima.push_back(traj.states[i].N);
  }
  double drift = 0.0;
  for (std::size_t i = 1; i < maxima.size(); ++i)
    drift = std::max(drift, std::abs(maxima[i] - maxima[i - 1]) / maxima[i - 1]);
  const double sec = timer.seconds();
  report(5, "sustained-oscillation", maxima.size() >= 5 && drift < 0.05 && sec < 1.0,
         fmt("%zu prey maxima in [100,200] (>= 5), drift = %.3g (< 0.05), %.3fs",
             maxima.size(), drift, sec));
}

mc::EnsembleConfig paper_config() {
  mc::EnsembleConfig cfg;  // (3,2,0.8), rho=0.1, dt=1e-2, T=100, z0=(0.8,0.6), M=2000
  cfg.master_seed = 42;
  return cfg;
}

void criterion_6_7() {
  Timer t6;
  const mc::FactorizationComparison fact = mc::compare_factorizations(paper_config());
  const double s_ev = fact.stats_event.survivor_fraction;
  const double s_ch = fact.stats_cholesky.survivor_fraction;
  const double sec6 = t6.seconds();
  report(6, "survival-fractions",
         s_ev >= 0.205 && s_ev <= 0.285 && s_ch >= 0.205 && s_ch <= 0.285 &&
             std::abs(s_ev - s_ch) <= 0.03,
         fmt("event = %.4f, cholesky = %.4f (each in [0.205,0.285]), |diff| = %.4f (<= 0.03), "
             "%.1fs",
             s_ev, s_ch, std::abs(s_ev - s_ch), sec6));

  const mc::CovarianceComparison cov = mc::compare_covariance(paper_config());
  report(7, "covariance-role",
         cov.survivor_fraction_full >= 0.215 && cov.survivor_fraction_full <= 0.295 &&
             cov.survivor_fraction_diagonal >= 0.207 && cov.survivor_fraction_diagonal <= 0.287,
         fmt("full = %.4f (in [0.215,0.295]), diagonal = %.4f (in [0.207,0.287])",
             cov.survivor_fraction_full, cov.survivor_fraction_diagonal));
}

void criterion_9() {
  const ModelParams p = ModelParams::from_omega(3.0, 2.0, 0.8, 100.0);
  const mc::ExtinctionReport ext = mc::extinction_probe(p, {0.8, 0.6}, 1e-2, 100.0, 2000, 42);
  report(9, "positive-extinction-prob",
         ext.extinct_fraction > 0.5 && ext.extinct_fraction < 0.9,
         fmt("extinct fraction = %.4f (strictly in (0.5, 0.9))", ext.extinct_fraction));
}

void criterion_12() {
  bool finite = true;
  double sup2 = 0.0, sup4 = 0.0;
  try {
    sup2 = mc::moment_probe(paper_config(), 2);
    sup4 = mc::moment_probe(paper_config(), 4);
    finite = std::isfinite(sup2) && std::isfinite(sup4);
  } catch (const std::exception&) {
    finite = false;
  }
  report(12, "moment-boundedness", finite,
         fmt("sup mean|Z|^2 = %.4g, sup mean|Z|^4 = %.4g (both finite over 2000 paths)", sup2,
             sup4));
}

void criterion_8() {
  Timer timer;
  const ModelParams p = ModelParams::from_omega(1.0, 0.8, 0.8, 100.0);
  const mc::ExtinctionReport rep = mc::extinction_probe(p, {0.8, 0.6}, 1e-2, 500.0, 2000, 42);
  const double sec = timer.seconds();
  report(8, "subcritical-extinction",
         rep.extinct_fraction >= 0.99 && rep.predator_axis_fraction >= 0.95 && sec < 120.0,
         fmt("extinct = %.4f (>= 0.99), predator-axis share = %.4f (>= 0.95), %.1fs",
             rep.extinct_fraction, rep.predator_axis_fraction, sec));
}

void criterion_10() {
  Timer timer;
  const ModelParams p = ModelParams::from_omega(3.0, 2.0, 0.8, 100.0);
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  const mc::LlnReport rep =
      mc::lln_diagnostic(p, {0.8, 0.6}, {100, 1000, 10000}, 10.0, 500, grid, 42);
  const double sec = timer.seconds();
  const bool decreasing = rep.sup_deviation[1] < rep.sup_deviation[0] &&
                          rep.sup_deviation[2] < rep.sup_deviation[1];
  report(10, "lln-convergence",
         decreasing && rep.sup_deviation[2] <= 0.05 && sec < 300.0,
         fmt("sup deviations = %.4f > %.4f > %.4f (last <= 0.05), %.1fs", rep.sup_deviation[0],
             rep.sup_deviation[1], rep.sup_deviation[2], sec));
}

void criterion_11() {
  Timer timer;
  RngStream cfg_rng = derive_stream(77, "acceptance/axes-config", 0);
  std::int64_t total_jumps = 0;
  bool absorbing = true;
  std::uint64_t path_idx = 0;
  while (total_jumps < 100000) {
    const ModelParams p = ModelParams::from_omega(0.5 + 4.0 * cfg_rng.uniform_open01(),
                                                  0.2 + 3.0 * cfg_rng.uniform_open01(),
                                                  0.1 + 2.0 * cfg_rng.uniform_open01(),
                                                  1.0 + 200.0 * cfg_rng.uniform_open01());
    const ctmc::CountState x0{1 + std::int64_t(cfg_rng.uniform_open01() * 2.0 * p.omega),
                              1 + std::int64_t(cfg_rng.uniform_open01() * 2.0 * p.omega)};
    RngStream s = derive_stream(77, "acceptance/axes-path", path_idx++);
    const ctmc::JumpPath path = ctmc::simulate(p, x0, 50.0, s);
    total_jumps += std::int64_t(path.jump_times.size());
    bool prey_gone = false, pred_gone = false;
    for (const ctmc::CountState& x : path.states) {
      if (prey_gone && x.n != 0) absorbing = false;
      if (pred_gone && x.p != 0) absorbing = false;
      prey_gone = prey_gone || x.n == 0;
      pred_gone = pred_gone || x.p == 0;
    }
  }
  const double sec = timer.seconds();
  report(11, "absorbing-axes", absorbing && sec < 10.0,
         fmt("%lld jumps scanned, axis departures = %s, %.2fs",
             static_cast<long long>(total_jumps), absorbing ? "none" : "FOUND", sec));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<unreadable:" + p.string() + ">";
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_13() {
  const fs::path base =
      fs::temp_directory_path() / ("predprey_accept_" + std::to_string(::getpid()));
  const fs::path dir1 = base / "w1", dir8 = base / "w8";
  fs::create_directories(dir1);
  fs::create_directories(dir8);
  const std::string cmd = std::string(PREDPREY_CLI_PATH) + " survival --seed 42";
  const int rc1 = std::system((cmd + " --workers 1 --out-dir " + dir1.string() +
                               " > /dev/null").c_str());
  const int rc8 = std::system((cmd + " --workers 8 --out-dir " + dir8.string() +
                               " > /dev/null").c_str());
  const bool ran = rc1 == 0 && rc8 == 0;
  const bool csv_same = ran && slurp(dir1 / "survival.csv") == slurp(dir8 / "survival.csv");
  const bool json_same = ran && slurp(dir1 / "stats.json") == slurp(dir8 / "stats.json");
  std::error_code ec;
  fs::remove_all(base, ec);
  report(13, "determinism", ran && csv_same && json_same,
         fmt("seed 42, workers 1 vs 8: survival.csv %s, stats.json %s",
             csv_same ? "identical" : "DIFFER", json_same ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
  criterion_1_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  std::printf("%s: %d of 13 criteria failed\n", failures == 0 ? "OK" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
