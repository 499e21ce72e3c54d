#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "predprey/ctmc.hpp"
#include "predprey/model.hpp"
#include "predprey/montecarlo.hpp"
#include "predprey/ode.hpp"
#include "predprey/sde.hpp"

namespace predprey::io {

// Shortest exact decimal form ("%.17g"): parsing it back recovers the bits.
std::string format_double(double x);

// CSV writers. Headers are fixed; all doubles use format_double.
void write_ode_csv(std::ostream& os, const ode::OdeTrajectory& traj);              // t,N,P
void write_density_csv(std::ostream& os, const std::vector<double>& grid,
                       const std::vector<DensityState>& states);                   // t,N,P
void write_jump_csv(std::ostream& os, const ctmc::JumpPath& path);                 // t,n,p,channel
void write_absorbed_csv(std::ostream& os, const sde::AbsorbedPath& path);          // t,N,P,absorbed
void write_survival_csv(std::ostream& os, const std::vector<double>& grid,
                        const std::vector<double>& survival);                      // t,survival
void write_cloud_csv(std::ostream& os, const std::vector<DensityState>& cloud);    // N,P

// JSON documents (serialized strings; deterministic key order).
std::string regime_report_json(const RegimeReport& report);
std::string ensemble_stats_json(const mc::EnsembleStats& stats, const mc::EnsembleConfig& config);
std::string path_summary_json(const sde::AbsorbedPath& path);
std::string lln_report_json(const mc::LlnReport& report);
std::string extinction_report_json(const mc::ExtinctionReport& report);
std::string factorization_comparison_json(const mc::FactorizationComparison& cmp);
std::string covariance_comparison_json(const mc::CovarianceComparison& cmp);
std::string moment_report_json(int p_exponent, double sup_moment);

// Replay metadata written alongside every file-producing command.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> resolved_config;  // ordered key/value
  std::uint64_t master_seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
};

std::string manifest_json(const RunManifest& manifest);

// Write a whole file, throwing std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace predprey::io
