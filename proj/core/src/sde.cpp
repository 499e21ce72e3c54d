#include "predprey/sde.hpp"

#include <cmath>
#include <string>

namespace predprey::sde {

namespace {

void require_step_args(double dt, double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputDomainError("dt must be positive and finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InputDomainError("horizon must be positive and finite");
  if (dt > horizon) throw InputDomainError("dt must not exceed the horizon");
}

}  // namespace

std::int64_t step_count(double horizon, double dt) {
  // Guard against horizon/dt landing a hair above an integer.
  const double q = horizon / dt;
  const auto n = std::int64_t(std::ceil(q - 1e-9));
  return n < 1 ? 1 : n;
}

const char* factorization_name(FactorizationKind kind) {
  switch (kind) {
    case FactorizationKind::Event4D: return "event4d";
    case FactorizationKind::Cholesky2D: return "cholesky2d";
    case FactorizationKind::Diagonal2D: return "diagonal2d";
  }
  return "?";
}

const char* absorbed_axis_name(AbsorbedAxis a) {
  switch (a) {
    case AbsorbedAxis::PreyZero: return "prey_zero";
    case AbsorbedAxis::PredatorZero: return "predator_zero";
    case AbsorbedAxis::Both: return "both";
  }
  return "?";
}

DensityState em_step(const ModelParams& params, const DensityState& z, double dt,
                     std::span<const double> noise, FactorizationKind kind) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputDomainError("dt must be positive and finite");
  if (std::ssize(noise) != noise_dim(kind))
    throw InputDomainError("noise vector length must equal the factorization's noise dimension");

  const Vec2 mu = drift(params, z);
  double g_n = 0.0, g_p = 0.0;
  switch (kind) {
    case FactorizationKind::Event4D: {
      const EventFactor f = event_factor(params, z);
      for (int e = 0; e < 4; ++e) {
        g_n += f.col[e][0] * noise[e];
        g_p += f.col[e][1] * noise[e];
      }
      break;
    }
    case FactorizationKind::Cholesky2D: {
      const Chol2 f = cholesky_factor(params, z);
      g_n = f.l11 * noise[0];
      g_p = f.l21 * noise[0] + f.l22 * noise[1];
      break;
    }
    case FactorizationKind::Diagonal2D: {
      const Diag2 f = diagonal_factor(params, z);
      g_n = f.d1 * noise[0];
      g_p = f.d2 * noise[1];
      break;
    }
  }
  return {z.N + mu[0] * dt + params.rho * g_n, z.P + mu[1] * dt + params.rho * g_p};
}

AbsorbedPath simulate_absorbed(const ModelParams& params, DensityState z0, double dt,
                               double horizon, FactorizationKind kind, RngStream& stream) {
  require_step_args(dt, horizon);
  if (!(z0.N > 0.0 && z0.P > 0.0) || !std::isfinite(z0.N) || !std::isfinite(z0.P))
    throw InputDomainError("z0 must be strictly interior");

  const std::int64_t n_steps = step_count(horizon, dt);
  const double sqrt_dt = std::sqrt(dt);
  const int dim = noise_dim(kind);

  AbsorbedPath path;
  path.dt = dt;
  path.states.reserve(std::size_t(n_steps) + 1);
  path.states.push_back(z0);

  DensityState z = z0;
  double noise[4];
  for (std::int64_t i = 1; i <= n_steps; ++i) {
    for (int j = 0; j < dim; ++j) noise[j] = stream.normal() * sqrt_dt;
    const DensityState znew = em_step(params, z, dt, {noise, std::size_t(dim)}, kind);

    if (!std::isfinite(znew.N) || !std::isfinite(znew.P))
      throw NumericalBlowupError(
          "non-finite state at step " + std::to_string(i) + " (t=" + std::to_string(i * dt) + ")",
          std::move(path));

    if (znew.N <= 0.0 || znew.P <= 0.0) {
      const DensityState clipped{std::max(znew.N, 0.0), std::max(znew.P, 0.0)};
      path.absorption_time = double(i) * dt;
      path.absorbed_axis = znew.N <= 0.0 && znew.P <= 0.0 ? AbsorbedAxis::Both
                           : znew.N <= 0.0               ? AbsorbedAxis::PreyZero
                                                         : AbsorbedAxis::PredatorZero;
      path.states.insert(path.states.end(), std::size_t(n_steps - i + 1), clipped);
      return path;
    }
    path.states.push_back(znew);
    z = znew;
  }
  return path;
}

namespace {

// Shared EM loop for the two one-dimensional boundary diffusions.
template <class DriftFn, class DiffFn>
AxisPath run_axis(double x0, double dt, double horizon, RngStream& stream, DriftFn&& mu,
                  DiffFn&& sigma, double rho) {
  require_step_args(dt, horizon);
  if (!std::isfinite(x0) || x0 < 0.0) throw InputDomainError("initial value must be >= 0");

  const std::int64_t n_steps = step_count(horizon, dt);
  const double sqrt_dt = std::sqrt(dt);

  AxisPath path;
  path.dt = dt;
  path.values.assign(std::size_t(n_steps) + 1, 0.0);
  path.values[0] = x0;
  if (x0 == 0.0) {
    path.absorption_time = 0.0;  // the origin is absorbing
    return path;
  }

  double x = x0;
  for (std::int64_t i = 1; i <= n_steps; ++i) {
    const double xnew = x + mu(x) * dt + rho * sigma(x) * stream.normal() * sqrt_dt;
    if (!std::isfinite(xnew))
      throw NumericalBlowupError("non-finite axis state at step " + std::to_string(i),
                                 AbsorbedPath{dt, {}, std::nullopt, std::nullopt});
    if (xnew <= 0.0) {
      path.absorption_time = double(i) * dt;
      // values[i..] stay 0 (clip and freeze)
      return path;
    }
    path.values[std::size_t(i)] = xnew;
    x = xnew;
  }
  return path;
}

}  // namespace

AxisPath simulate_axis_prey(const ModelParams& params, double n0, double dt, double horizon,
                            RngStream& stream) {
  return run_axis(
      n0, dt, horizon, stream, [&](double n) { return n - n * n / params.k; },
      [&](double n) { return guarded_sqrt(n + n * n / params.k); }, params.rho);
}

AxisPath simulate_axis_predator(const ModelParams& params, double p0, double dt, double horizon,
                                RngStream& stream) {
  return run_axis(
      p0, dt, horizon, stream, [&](double p) { return -params.c * p; },
      [&](double p) { return guarded_sqrt(params.c * p); }, params.rho);
}

}  // namespace predprey::sde
