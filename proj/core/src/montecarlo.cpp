#include "predprey/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "predprey/ctmc.hpp"
#include "predprey/rng.hpp"

namespace predprey::mc {

namespace {

constexpr std::int64_t batch_size = 256;
constexpr double inf = std::numeric_limits<double>::infinity();

// Compensated (Kahan) accumulator; keeps 2000-term sums exact enough that
// the fixed fold order is the only thing that matters for reproducibility.
struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

// Fixed-size batches; workers claim path indices within the batch from an
// atomic counter and write into disjoint slots, then the batch is folded
// sequentially in path order. Results are therefore independent of worker
// count and scheduling. A failing path aborts after its batch with the
// lowest failing index (again scheduling-independent).
template <class Slot, class Fill, class Fold>
void parallel_batches(std::int64_t m, int workers, std::uint64_t master_seed,
                      const std::string& tag, Fill&& fill, Fold&& fold) {
  const int w = int(std::min<std::int64_t>(resolve_workers(workers), batch_size));
  std::vector<Slot> slots(std::size_t(std::min(m, batch_size)));

  for (std::int64_t start = 0; start < m; start += batch_size) {
    const std::int64_t end = std::min(m, start + batch_size);
    std::atomic<std::int64_t> next{start};
    std::mutex err_mutex;
    std::int64_t err_index = -1;
    std::exception_ptr err;

    auto work = [&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= end) return;
        try {
          fill(i, slots[std::size_t(i - start)]);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(err_mutex);
          if (err_index < 0 || i < err_index) {
            err_index = i;
            err = std::current_exception();
          }
        }
      }
    };

    if (w <= 1 || end - start == 1) {
      work();
    } else {
      std::vector<std::thread> threads;
      threads.reserve(std::size_t(w) - 1);
      for (int t = 0; t < w - 1; ++t) threads.emplace_back(work);
      work();
      for (auto& th : threads) th.join();
    }

    if (err) {
      std::string inner = "unknown error";
      try {
        std::rethrow_exception(err);
      } catch (const std::exception& e) {
        inner = e.what();
      } catch (...) {
      }
      throw EnsembleError("path " + std::to_string(err_index) + " (master_seed=" +
                              std::to_string(master_seed) + ", tag=" + tag + "): " + inner,
                          err_index, master_seed);
    }
    for (std::int64_t i = start; i < end; ++i) fold(i, slots[std::size_t(i - start)]);
  }
}

std::string em_tag(sde::FactorizationKind kind) {
  return std::string("em/") + sde::factorization_name(kind);
}

void validate_config(const EnsembleConfig& c) {
  if (c.n_paths < 1) throw InputDomainError("n_paths must be >= 1");
  if (c.output_grid_stride < 1) throw InputDomainError("output_grid_stride must be >= 1");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw InputDomainError("dt must be positive");
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon))
    throw InputDomainError("horizon must be positive");
  if (c.dt > c.horizon) throw InputDomainError("dt must not exceed the horizon");
  if (!(c.z0.N > 0.0 && c.z0.P > 0.0)) throw InputDomainError("z0 must be strictly interior");
}

// Per-path record on the strided output grid.
struct EmSlot {
  std::vector<double> n, p;
  double tau = inf;
  int axis = -1;
};

std::vector<double> make_grid(std::int64_t n_steps, double dt, std::int64_t stride) {
  const std::int64_t len = n_steps / stride + 1;  // truncates to the last full stride
  std::vector<double> grid(std::size_t(len), 0.0);
  for (std::int64_t j = 0; j < len; ++j) grid[std::size_t(j)] = double(j * stride) * dt;
  return grid;
}

// Shared fill: simulate one absorbed path and record it on the grid.
struct EmFill {
  const EnsembleConfig& config;
  std::string tag;
  std::int64_t stride;
  std::size_t grid_len;

  void operator()(std::int64_t i, EmSlot& slot) const {
    slot.n.resize(grid_len);
    slot.p.resize(grid_len);
    RngStream stream = derive_stream(config.master_seed, tag, std::uint64_t(i));
    const sde::AbsorbedPath path = sde::simulate_absorbed(config.params, config.z0, config.dt,
                                                          config.horizon, config.kind, stream);
    for (std::size_t j = 0; j < grid_len; ++j) {
      const DensityState& st = path.states[j * std::size_t(stride)];
      slot.n[j] = st.N;
      slot.p[j] = st.P;
    }
    slot.tau = path.absorption_time.value_or(inf);
    slot.axis = path.absorbed_axis ? int(*path.absorbed_axis) : -1;
  }
};

Histogram make_histogram(const std::vector<double>& values, int bins) {
  Histogram h;
  if (values.empty()) return h;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (!(hi > lo)) {  // all values equal: widen so the counts still land
    lo -= 0.5;
    hi += 0.5;
  }
  h.bin_edges.resize(std::size_t(bins) + 1);
  for (int j = 0; j <= bins; ++j) h.bin_edges[std::size_t(j)] = lo + (hi - lo) * j / bins;
  h.bin_edges.back() = hi;
  h.counts.assign(std::size_t(bins), 0);
  for (double v : values) {
    int idx = int((v - lo) / (hi - lo) * bins);
    idx = std::clamp(idx, 0, bins - 1);
    ++h.counts[std::size_t(idx)];
  }
  return h;
}

// Overlap coefficient on common 30-bin edges spanning both samples.
double terminal_overlap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  double lo = std::min(*std::min_element(a.begin(), a.end()),
                       *std::min_element(b.begin(), b.end()));
  double hi = std::max(*std::max_element(a.begin(), a.end()),
                       *std::max_element(b.begin(), b.end()));
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> ca(terminal_hist_bins, 0.0), cb(terminal_hist_bins, 0.0);
  const auto bin_of = [&](double v) {
    return std::clamp(int((v - lo) / (hi - lo) * terminal_hist_bins), 0, terminal_hist_bins - 1);
  };
  for (double v : a) ca[std::size_t(bin_of(v))] += 1.0 / double(a.size());
  for (double v : b) cb[std::size_t(bin_of(v))] += 1.0 / double(b.size());
  double overlap = 0.0;
  for (int j = 0; j < terminal_hist_bins; ++j)
    overlap += std::min(ca[std::size_t(j)], cb[std::size_t(j)]);
  return overlap;
}

}  // namespace

EnsembleRun run_ensemble_detailed(const EnsembleConfig& config, int workers) {
  validate_config(config);
  const std::int64_t n_steps = sde::step_count(config.horizon, config.dt);
  const std::int64_t stride = std::min(config.output_grid_stride, n_steps);
  const std::vector<double> grid = make_grid(n_steps, config.dt, stride);
  const std::size_t g = grid.size();
  const std::string tag = em_tag(config.kind);

  std::vector<std::int64_t> alive(g, 0);
  std::vector<Kahan> acc_n(g), acc_p(g);
  EnsembleRun run;

  parallel_batches<EmSlot>(
      config.n_paths, workers, config.master_seed, tag,
      EmFill{config, tag, stride, g},
      [&](std::int64_t, const EmSlot& slot) {
        for (std::size_t j = 0; j < g; ++j) {
          if (slot.tau > grid[j]) ++alive[j];
          acc_n[j].add(slot.n[j]);
          acc_p[j].add(slot.p[j]);
        }
        if (slot.tau > grid.back())
          run.survivor_terminal.push_back({slot.n.back(), slot.p.back()});
      });

  EnsembleStats& stats = run.stats;
  stats.grid = grid;
  stats.survival.resize(g);
  stats.mean_N.resize(g);
  stats.mean_P.resize(g);
  const double m = double(config.n_paths);
  for (std::size_t j = 0; j < g; ++j) {
    stats.survival[j] = double(alive[j]) / m;
    stats.mean_N[j] = acc_n[j].sum / m;
    stats.mean_P[j] = acc_p[j].sum / m;
  }
  stats.survivor_fraction = stats.survival.back();
  stats.n_paths = config.n_paths;
  std::vector<double> terminal_n;
  terminal_n.reserve(run.survivor_terminal.size());
  for (const auto& z : run.survivor_terminal) terminal_n.push_back(z.N);
  stats.terminal_conditional_N = make_histogram(terminal_n, terminal_hist_bins);
  return run;
}

EnsembleStats run_ensemble(const EnsembleConfig& config, int workers) {
  return run_ensemble_detailed(config, workers).stats;
}

FactorizationComparison compare_factorizations(const EnsembleConfig& base, int workers) {
  EnsembleConfig cfg_event = base;
  cfg_event.kind = sde::FactorizationKind::Event4D;
  EnsembleConfig cfg_chol = base;
  cfg_chol.kind = sde::FactorizationKind::Cholesky2D;

  EnsembleRun ev = run_ensemble_detailed(cfg_event, workers);
  EnsembleRun ch = run_ensemble_detailed(cfg_chol, workers);

  FactorizationComparison cmp;
  cmp.survival_sup_diff = 0.0;
  for (std::size_t j = 0; j < ev.stats.survival.size(); ++j)
    cmp.survival_sup_diff =
        std::max(cmp.survival_sup_diff, std::fabs(ev.stats.survival[j] - ch.stats.survival[j]));
  std::vector<double> na, nb;
  for (const auto& z : ev.survivor_terminal) na.push_back(z.N);
  for (const auto& z : ch.survivor_terminal) nb.push_back(z.N);
  cmp.terminal_hist_overlap = terminal_overlap(na, nb);
  cmp.stats_event = std::move(ev.stats);
  cmp.stats_cholesky = std::move(ch.stats);
  return cmp;
}

CovarianceComparison compare_covariance(const EnsembleConfig& base, int workers) {
  EnsembleConfig cfg_full = base;
  cfg_full.kind = sde::FactorizationKind::Cholesky2D;
  EnsembleConfig cfg_diag = base;
  cfg_diag.kind = sde::FactorizationKind::Diagonal2D;

  EnsembleRun full = run_ensemble_detailed(cfg_full, workers);
  EnsembleRun diag = run_ensemble_detailed(cfg_diag, workers);

  CovarianceComparison cmp;
  cmp.survivor_fraction_full = full.stats.survivor_fraction;
  cmp.survivor_fraction_diagonal = diag.stats.survivor_fraction;
  cmp.terminal_cloud_full = std::move(full.survivor_terminal);
  cmp.terminal_cloud_diag = std::move(diag.survivor_terminal);
  cmp.stats_full = std::move(full.stats);
  cmp.stats_diagonal = std::move(diag.stats);
  return cmp;
}

LlnReport lln_diagnostic(const ModelParams& params, DensityState z0,
                         const std::vector<std::int64_t>& omegas, double horizon,
                         std::int64_t replicates, const std::vector<double>& grid,
                         std::uint64_t master_seed, int workers) {
  if (omegas.empty()) throw InputDomainError("omegas must be non-empty");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (omegas[i] < 1) throw InputDomainError("omegas must be >= 1");
    if (i > 0 && omegas[i] <= omegas[i - 1])
      throw InputDomainError("omegas must be strictly increasing");
  }
  if (replicates < 1) throw InputDomainError("replicates must be >= 1");
  if (grid.empty()) throw InputDomainError("grid must be non-empty");

  const ode::OdeTrajectory ref = ode::integrate(params, z0, horizon, 1e-8, 1e-10, grid);

  struct SsaSlot {
    std::vector<double> n, p;
  };

  LlnReport report;
  for (const std::int64_t omega : omegas) {
    const ModelParams po = ModelParams::from_omega(params.k, params.m, params.c, double(omega));
    const ctmc::CountState x0{std::llround(double(omega) * z0.N),
                              std::llround(double(omega) * z0.P)};
    const std::string tag = "ssa/lln/omega=" + std::to_string(omega);
    std::vector<Kahan> acc_n(grid.size()), acc_p(grid.size());

    parallel_batches<SsaSlot>(
        replicates, workers, master_seed, tag,
        [&](std::int64_t i, SsaSlot& slot) {
          slot.n.resize(grid.size());
          slot.p.resize(grid.size());
          RngStream stream = derive_stream(master_seed, tag, std::uint64_t(i));
          ctmc::simulate_on_grid(po, x0, horizon, grid, stream, slot.n, slot.p);
        },
        [&](std::int64_t, const SsaSlot& slot) {
          for (std::size_t j = 0; j < grid.size(); ++j) {
            acc_n[j].add(slot.n[j]);
            acc_p[j].add(slot.p[j]);
          }
        });

    double dev = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      dev = std::max(dev, std::fabs(acc_n[j].sum / double(replicates) - ref.states[j].N));
      dev = std::max(dev, std::fabs(acc_p[j].sum / double(replicates) - ref.states[j].P));
    }
    report.omegas.push_back(double(omega));
    report.sup_deviation.push_back(dev);
  }
  return report;
}

ExtinctionReport extinction_probe(const ModelParams& params, DensityState z0, double dt,
                                  double horizon, std::int64_t n_paths,
                                  std::uint64_t master_seed, int workers) {
  EnsembleConfig config;
  config.params = params;
  config.z0 = z0;
  config.dt = dt;
  config.horizon = horizon;
  config.kind = sde::FactorizationKind::Cholesky2D;
  config.n_paths = n_paths;
  config.master_seed = master_seed;
  config.output_grid_stride = sde::step_count(horizon, dt);  // only t=0 and the horizon
  validate_config(config);

  const std::int64_t n_steps = sde::step_count(config.horizon, config.dt);
  const std::string tag = em_tag(config.kind);

  std::int64_t extinct = 0, predator_axis = 0;
  Kahan tau_sum;
  parallel_batches<EmSlot>(
      config.n_paths, workers, config.master_seed, tag,
      EmFill{config, tag, n_steps, 2},
      [&](std::int64_t, const EmSlot& slot) {
        if (slot.tau < inf) {
          ++extinct;
          tau_sum.add(slot.tau);
          if (slot.axis == int(sde::AbsorbedAxis::PredatorZero)) ++predator_axis;
        }
      });

  ExtinctionReport report;
  report.extinct_fraction = double(extinct) / double(n_paths);
  report.predator_axis_fraction = extinct > 0 ? double(predator_axis) / double(extinct) : 0.0;
  if (extinct > 0) report.mean_absorption_time_conditional = tau_sum.sum / double(extinct);
  return report;
}

double moment_probe(const EnsembleConfig& config, int p_exponent, int workers) {
  if (p_exponent != 2 && p_exponent != 4)
    throw InputDomainError("p_exponent must be 2 or 4");
  validate_config(config);
  const std::int64_t n_steps = sde::step_count(config.horizon, config.dt);
  const std::int64_t stride = std::min(config.output_grid_stride, n_steps);
  const std::vector<double> grid = make_grid(n_steps, config.dt, stride);
  const std::size_t g = grid.size();
  const std::string tag = em_tag(config.kind);

  std::vector<Kahan> acc(g);
  parallel_batches<EmSlot>(
      config.n_paths, workers, config.master_seed, tag,
      EmFill{config, tag, stride, g},
      [&](std::int64_t, const EmSlot& slot) {
        for (std::size_t j = 0; j < g; ++j) {
          const double r2 = slot.n[j] * slot.n[j] + slot.p[j] * slot.p[j];
          acc[j].add(p_exponent == 2 ? r2 : r2 * r2);
        }
      });

  double sup = 0.0;
  for (std::size_t j = 0; j < g; ++j) sup = std::max(sup, acc[j].sum / double(config.n_paths));
  return sup;
}

}  // namespace predprey::mc
