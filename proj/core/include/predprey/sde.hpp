#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "predprey/model.hpp"
#include "predprey/rng.hpp"

namespace predprey::sde {

// Noise factorization driving the Euler-Maruyama scheme. Event4D and
// Cholesky2D factor the same covariance; Diagonal2D factors the
// decorrelated surrogate with matched marginal variances.
enum class FactorizationKind { Event4D, Cholesky2D, Diagonal2D };

inline constexpr int noise_dim(FactorizationKind kind) {
  return kind == FactorizationKind::Event4D ? 4 : 2;
}

const char* factorization_name(FactorizationKind kind);

// Number of EM steps, ceil(horizon/dt), robust to roundoff in the division.
std::int64_t step_count(double horizon, double dt);

enum class AbsorbedAxis { PreyZero, PredatorZero, Both };

const char* absorbed_axis_name(AbsorbedAxis a);

// Uniform-grid path; states[i] is the state at time i*dt. After the
// absorption index every state equals the clipped absorption state.
struct AbsorbedPath {
  double dt = 0.0;
  std::vector<DensityState> states;
  std::optional<double> absorption_time;  // integer multiple of dt
  std::optional<AbsorbedAxis> absorbed_axis;
};

// Non-finite state during EM integration; carries the finite prefix.
class NumericalBlowupError : public std::runtime_error {
 public:
  NumericalBlowupError(const std::string& msg, AbsorbedPath partial)
      : std::runtime_error(msg),
        partial_(std::make_shared<AbsorbedPath>(std::move(partial))) {}

  const AbsorbedPath& partial_path() const { return *partial_; }

 private:
  std::shared_ptr<const AbsorbedPath> partial_;
};

// One raw EM update z + mu(z) dt + rho L(z) noise, without boundary
// handling. noise holds the raw Gaussian increments ~ Normal(0, dt*I), one
// per noise dimension of the chosen factorization.
DensityState em_step(const ModelParams& params, const DensityState& z, double dt,
                     std::span<const double> noise, FactorizationKind kind);

// Absorbed EM on ceil(horizon/dt) steps from a strictly interior z0. At the
// first step where a coordinate is <= 0, the state is clipped componentwise
// to max(., 0), that step's time becomes the absorption time, the crossed
// axis is recorded (Both if both crossed), and the path is frozen at the
// clipped state. Factors are always evaluated at the (interior) pre-step
// state. Each step consumes exactly noise_dim(kind) normals from the stream
// until absorption.
AbsorbedPath simulate_absorbed(const ModelParams& params, DensityState z0, double dt,
                               double horizon, FactorizationKind kind, RngStream& stream);

// One-dimensional boundary-restricted paths with the same clip-and-freeze
// rule; a start at 0 is already absorbed (absorption_time = 0).
struct AxisPath {
  double dt = 0.0;
  std::vector<double> values;
  std::optional<double> absorption_time;
};

// dN = (N - N^2/k) dt + rho sqrt(N + N^2/k) dB  (logistic prey axis)
AxisPath simulate_axis_prey(const ModelParams& params, double n0, double dt, double horizon,
                            RngStream& stream);

// dP = -cP dt + rho sqrt(cP) dB  (CIR predator axis, zero mean level)
AxisPath simulate_axis_predator(const ModelParams& params, double p0, double dt, double horizon,
                                RngStream& stream);

}  // namespace predprey::sde
