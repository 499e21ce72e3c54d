#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "predprey/model.hpp"
#include "predprey/ode.hpp"
#include "predprey/sde.hpp"

namespace predprey::mc {

// Ensemble description. Worker count is deliberately not part of the config:
// results are a pure function of this struct, bit-identical for any worker
// count, so execution details live in the run manifest instead.
struct EnsembleConfig {
  ModelParams params = ModelParams::from_omega(3.0, 2.0, 0.8, 100.0);
  DensityState z0{0.8, 0.6};
  double dt = 1e-2;
  double horizon = 100.0;
  sde::FactorizationKind kind = sde::FactorizationKind::Cholesky2D;
  std::int64_t n_paths = 2000;
  std::uint64_t master_seed = 0;
  std::int64_t output_grid_stride = 10;
};

struct Histogram {
  std::vector<double> bin_edges;        // size counts.size() + 1 when nonempty
  std::vector<std::int64_t> counts;
};

inline constexpr int terminal_hist_bins = 30;

struct EnsembleStats {
  std::vector<double> grid;
  std::vector<double> survival;   // P(tau > t), nonincreasing, survival[0] = 1
  std::vector<double> mean_N;     // unconditional means, frozen states included
  std::vector<double> mean_P;
  Histogram terminal_conditional_N;  // N(horizon) over survivors
  double survivor_fraction = 0.0;    // survival at the last grid point
  std::int64_t n_paths = 0;
};

// Stats plus the survivor states at the final grid time (path order).
struct EnsembleRun {
  EnsembleStats stats;
  std::vector<DensityState> survivor_terminal;
};

// A path failed; identifies the path and its stream derivation.
class EnsembleError : public std::runtime_error {
 public:
  EnsembleError(const std::string& msg, std::int64_t path_index, std::uint64_t master_seed)
      : std::runtime_error(msg), path_index_(path_index), master_seed_(master_seed) {}

  std::int64_t path_index() const { return path_index_; }
  std::uint64_t master_seed() const { return master_seed_; }

 private:
  std::int64_t path_index_;
  std::uint64_t master_seed_;
};

// M independent absorbed-EM paths with per-path streams derived from
// (master_seed, factorization tag, path_index); aggregation is in fixed path
// order with compensated summation, so results do not depend on the worker
// count. workers = 0 picks hardware concurrency.
EnsembleStats run_ensemble(const EnsembleConfig& config, int workers = 0);
EnsembleRun run_ensemble_detailed(const EnsembleConfig& config, int workers = 0);

struct FactorizationComparison {
  EnsembleStats stats_event;
  EnsembleStats stats_cholesky;
  double survival_sup_diff = 0.0;
  double terminal_hist_overlap = 0.0;  // sum over common bins of min(normalized counts)
};

// Event4D vs Cholesky2D at the same config; the two runs use disjoint
// stream derivations (distinct experiment tags).
FactorizationComparison compare_factorizations(const EnsembleConfig& base, int workers = 0);

struct CovarianceComparison {
  EnsembleStats stats_full;      // Cholesky2D
  EnsembleStats stats_diagonal;  // Diagonal2D
  double survivor_fraction_full = 0.0;
  double survivor_fraction_diagonal = 0.0;
  std::vector<DensityState> terminal_cloud_full;
  std::vector<DensityState> terminal_cloud_diag;
};

// Full covariance vs diagonal surrogate at the same config.
CovarianceComparison compare_covariance(const EnsembleConfig& base, int workers = 0);

struct LlnReport {
  std::vector<double> omegas;
  std::vector<double> sup_deviation;  // sup-norm distance to the ODE, per omega
};

// For each omega: CTMC replicates from x0 = round(omega * z0), ensemble-mean
// density on the grid, sup-norm distance to the ODE solution on that grid.
LlnReport lln_diagnostic(const ModelParams& params, DensityState z0,
                         const std::vector<std::int64_t>& omegas, double horizon,
                         std::int64_t replicates, const std::vector<double>& grid,
                         std::uint64_t master_seed, int workers = 0);

struct ExtinctionReport {
  double extinct_fraction = 0.0;
  double predator_axis_fraction = 0.0;  // share of extinctions absorbed on {P=0}
  std::optional<double> mean_absorption_time_conditional;
};

// Absorbed-EM extinction statistics (Cholesky2D driver).
ExtinctionReport extinction_probe(const ModelParams& params, DensityState z0, double dt,
                                  double horizon, std::int64_t n_paths,
                                  std::uint64_t master_seed, int workers = 0);

// sup over the output grid of the empirical mean |Z(t ^ tau)|^p, p in {2,4}.
double moment_probe(const EnsembleConfig& config, int p_exponent, int workers = 0);

}  // namespace predprey::mc
