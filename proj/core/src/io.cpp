#include "predprey/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "predprey/version.hpp"

namespace predprey::io {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_ode_csv(std::ostream& os, const ode::OdeTrajectory& traj) {
  os << "t,N,P\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    os << format_double(traj.times[i]) << ',' << format_double(traj.states[i].N) << ','
       << format_double(traj.states[i].P) << '\n';
}

void write_density_csv(std::ostream& os, const std::vector<double>& grid,
                       const std::vector<DensityState>& states) {
  os << "t,N,P\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << format_double(grid[i]) << ',' << format_double(states[i].N) << ','
       << format_double(states[i].P) << '\n';
}

void write_jump_csv(std::ostream& os, const ctmc::JumpPath& path) {
  os << "t,n,p,channel\n";
  for (std::size_t i = 0; i < path.jump_times.size(); ++i)
    os << format_double(path.jump_times[i]) << ',' << path.states[i].n << ',' << path.states[i].p
       << ',' << channel_letter(path.channels[i]) << '\n';
}

void write_absorbed_csv(std::ostream& os, const sde::AbsorbedPath& path) {
  os << "t,N,P,absorbed\n";
  const std::int64_t absorb_index =
      path.absorption_time ? std::llround(*path.absorption_time / path.dt)
                           : std::int64_t(path.states.size());
  for (std::size_t i = 0; i < path.states.size(); ++i)
    os << format_double(double(i) * path.dt) << ',' << format_double(path.states[i].N) << ','
       << format_double(path.states[i].P) << ',' << (std::int64_t(i) >= absorb_index ? 1 : 0)
       << '\n';
}

void write_survival_csv(std::ostream& os, const std::vector<double>& grid,
                        const std::vector<double>& survival) {
  os << "t,survival\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << format_double(grid[i]) << ',' << format_double(survival[i]) << '\n';
}

void write_cloud_csv(std::ostream& os, const std::vector<DensityState>& cloud) {
  os << "N,P\n";
  for (const auto& z : cloud) os << format_double(z.N) << ',' << format_double(z.P) << '\n';
}

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json histogram_json(const mc::Histogram& h) {
  return ordered_json{{"bin_edges", h.bin_edges}, {"counts", h.counts}};
}

ordered_json config_json(const mc::EnsembleConfig& c) {
  return ordered_json{{"k", c.params.k},
                      {"m", c.params.m},
                      {"c", c.params.c},
                      {"omega", c.params.omega},
                      {"rho", c.params.rho},
                      {"z0", {c.z0.N, c.z0.P}},
                      {"dt", c.dt},
                      {"horizon", c.horizon},
                      {"kind", sde::factorization_name(c.kind)},
                      {"n_paths", c.n_paths},
                      {"master_seed", c.master_seed},
                      {"output_grid_stride", c.output_grid_stride}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string regime_report_json(const RegimeReport& report) {
  return dump(ordered_json{{"regime", regime_name(report.regime)},
                           {"n_star", optional_number(report.n_star)},
                           {"p_star", optional_number(report.p_star)},
                           {"hopf_k", optional_number(report.hopf_k)},
                           {"jac_trace_k3", optional_number(report.jac_trace_k3)}});
}

std::string ensemble_stats_json(const mc::EnsembleStats& stats, const mc::EnsembleConfig& config) {
  return dump(ordered_json{{"config", config_json(config)},
                           {"version", version_string},
                           {"grid", stats.grid},
                           {"survival", stats.survival},
                           {"mean_N", stats.mean_N},
                           {"mean_P", stats.mean_P},
                           {"terminal_conditional_N", histogram_json(stats.terminal_conditional_N)},
                           {"survivor_fraction", stats.survivor_fraction},
                           {"n_paths", stats.n_paths}});
}

std::string path_summary_json(const sde::AbsorbedPath& path) {
  ordered_json j{{"absorption_time", optional_number(path.absorption_time)},
                 {"absorbed_axis", nullptr},
                 {"final_state", {path.states.back().N, path.states.back().P}}};
  if (path.absorbed_axis) j["absorbed_axis"] = sde::absorbed_axis_name(*path.absorbed_axis);
  return dump(j);
}

std::string lln_report_json(const mc::LlnReport& report) {
  return dump(ordered_json{{"omegas", report.omegas}, {"sup_deviation", report.sup_deviation}});
}

std::string extinction_report_json(const mc::ExtinctionReport& report) {
  return dump(ordered_json{
      {"extinct_fraction", report.extinct_fraction},
      {"predator_axis_fraction", report.predator_axis_fraction},
      {"mean_absorption_time_conditional",
       optional_number(report.mean_absorption_time_conditional)}});
}

std::string factorization_comparison_json(const mc::FactorizationComparison& cmp) {
  return dump(ordered_json{{"survivor_fraction_event", cmp.stats_event.survivor_fraction},
                           {"survivor_fraction_cholesky", cmp.stats_cholesky.survivor_fraction},
                           {"survival_sup_diff", cmp.survival_sup_diff},
                           {"terminal_hist_overlap", cmp.terminal_hist_overlap}});
}

std::string covariance_comparison_json(const mc::CovarianceComparison& cmp) {
  return dump(ordered_json{{"survivor_fraction_full", cmp.survivor_fraction_full},
                           {"survivor_fraction_diagonal", cmp.survivor_fraction_diagonal}});
}

std::string moment_report_json(int p_exponent, double sup_moment) {
  return dump(ordered_json{{"p", p_exponent}, {"sup_moment", sup_moment}});
}

std::string manifest_json(const RunManifest& manifest) {
  ordered_json config = ordered_json::object();
  for (const auto& [key, value] : manifest.resolved_config) config[key] = value;
  return dump(ordered_json{{"subcommand", manifest.subcommand},
                           {"config", config},
                           {"master_seed", manifest.master_seed},
                           {"version", manifest.version},
                           {"wall_seconds", manifest.wall_seconds},
                           {"outputs", manifest.outputs}});
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << content;
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace predprey::io
