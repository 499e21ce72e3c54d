#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "predprey/errors.hpp"

namespace predprey {

using Vec2 = std::array<double, 2>;
using Vec4 = std::array<double, 4>;
using Mat2 = std::array<Vec2, 2>;  // row-major 2x2

// Parameter vector shared by every engine. omega is the system size; rho is
// the demographic noise amplitude omega^{-1/2}. omega is the stored primary
// (rho derived from it); the rho constructor computes omega = rho^{-2}.
// rho = 0 encodes the deterministic omega -> infinity limit.
struct ModelParams {
  double k;      // carrying capacity (dimensionless density)
  double m;      // maximal predation/conversion rate
  double c;      // predator mortality rate
  double omega;  // system size, >= 1
  double rho;    // omega^{-1/2}

  static ModelParams from_omega(double k, double m, double c, double omega);
  static ModelParams from_rho(double k, double m, double c, double rho);
};

struct DensityState {
  double N = 0.0;  // prey density
  double P = 0.0;  // predator density
};

// Reaction channels: B prey birth, C prey competition death, D predator
// death, E predation + conversion.
enum class Channel : int { B = 0, C = 1, D = 2, E = 3 };

inline constexpr std::array<std::array<int, 2>, 4> channel_increments{{
    {{1, 0}},   // B
    {{-1, 0}},  // C
    {{0, -1}},  // D
    {{-1, 1}},  // E
}};

inline constexpr char channel_letter(Channel e) {
  constexpr std::array<char, 4> letters{'B', 'C', 'D', 'E'};
  return letters[static_cast<int>(e)];
}

enum class Regime { PredatorExtinction, StableCoexistence, LimitCycle };

const char* regime_name(Regime r);

// Equilibria and stability thresholds for a parameter set. n_star (and
// hopf_k, which exists with it) are present iff m > c; p_star and
// jac_trace_k3 additionally require n_star < k, i.e. an interior
// coexistence equilibrium K3 = (n_star, p_star).
struct RegimeReport {
  std::optional<double> n_star;
  std::optional<double> p_star;
  std::optional<double> hopf_k;
  std::optional<double> jac_trace_k3;
  Regime regime = Regime::PredatorExtinction;
};

// Symmetric 2x2 covariance.
struct Cov2 {
  double s11 = 0.0, s12 = 0.0, s22 = 0.0;
};

// Lower-triangular Cholesky factor.
struct Chol2 {
  double l11 = 0.0, l21 = 0.0, l22 = 0.0;
};

// Diagonal factor of the decorrelated surrogate.
struct Diag2 {
  double d1 = 0.0, d2 = 0.0;
};

// 2x4 event factor; column e is sqrt(lambda_e) * Delta_e.
struct EventFactor {
  std::array<Vec2, 4> col{};
};

// Square root with a cancellation guard: radicands in [-1e-14, 0) are
// rounded to 0, anything more negative is a genuine bug, not roundoff.
inline constexpr double radicand_floor = -1e-14;

inline double guarded_sqrt(double r) {
  if (r < 0.0) {
    if (r < radicand_floor) throw InternalError("negative radicand beyond cancellation floor");
    r = 0.0;
  }
  return std::sqrt(r);
}

// lambda_B = N, lambda_C = N^2/k, lambda_D = cP, lambda_E = mNP/(1+N).
Vec4 rates(const ModelParams& params, const DensityState& z);

// Closed-form vector field without domain validation. Defined for N > -1;
// the ODE integrator needs it on Runge-Kutta stages that can dip slightly
// below the axes.
inline Vec2 drift_unchecked(const ModelParams& params, double N, double P) {
  const double predation = params.m * N * P / (1.0 + N);
  return {N - N * N / params.k - predation, predation - params.c * P};
}

// mu(z) = sum_e Delta_e lambda_e(z); the Rosenzweig-MacArthur vector field.
Vec2 drift(const ModelParams& params, const DensityState& z);

// Sigma(z) = sum_e lambda_e(z) Delta_e Delta_e^T.
Cov2 covariance(const ModelParams& params, const DensityState& z);

EventFactor event_factor(const ModelParams& params, const DensityState& z);

// Unique lower-triangular square root of Sigma; requires an interior state
// (throws DegenerateCovarianceError on the axes).
Chol2 cholesky_factor(const ModelParams& params, const DensityState& z);

// diag(sqrt(Sigma11), sqrt(Sigma22)): matched marginal variances, zero
// cross-covariance.
Diag2 diagonal_factor(const ModelParams& params, const DensityState& z);

RegimeReport classify_regime(const ModelParams& params);

// Analytic Jacobian of the drift.
Mat2 jacobian(const ModelParams& params, const DensityState& z);

}  // namespace predprey
