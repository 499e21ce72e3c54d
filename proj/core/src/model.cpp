#include "predprey/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace predprey {

namespace {

void require_finite_nonneg(const DensityState& z) {
  if (!(std::isfinite(z.N) && std::isfinite(z.P)) || z.N < 0.0 || z.P < 0.0)
    throw InputDomainError("state must have finite nonnegative coordinates (got N=" +
                           std::to_string(z.N) + ", P=" + std::to_string(z.P) + ")");
}

void require_positive(const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InputDomainError(std::string(name) + " must be positive and finite (got " +
                           std::to_string(v) + ")");
}

}  // namespace

ModelParams ModelParams::from_omega(double k, double m, double c, double omega) {
  require_positive("k", k);
  require_positive("m", m);
  require_positive("c", c);
  if (std::isnan(omega) || !(omega >= 1.0))
    throw InputDomainError("omega must be >= 1 (got " + std::to_string(omega) + ")");
  return ModelParams{k, m, c, omega, 1.0 / std::sqrt(omega)};
}

ModelParams ModelParams::from_rho(double k, double m, double c, double rho) {
  if (!std::isfinite(rho) || rho < 0.0 || rho > 1.0)
    throw InputDomainError("rho must lie in [0, 1] (got " + std::to_string(rho) + ")");
  const double omega = rho == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (rho * rho);
  ModelParams p = from_omega(k, m, c, omega);
  p.rho = rho;  // keep the given value bit-exactly; omega = rho^{-2} by construction
  return p;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::PredatorExtinction: return "PredatorExtinction";
    case Regime::StableCoexistence: return "StableCoexistence";
    case Regime::LimitCycle: return "LimitCycle";
  }
  return "?";
}

Vec4 rates(const ModelParams& params, const DensityState& z) {
  require_finite_nonneg(z);
  return {z.N, z.N * z.N / params.k, params.c * z.P, params.m * z.N * z.P / (1.0 + z.N)};
}

Vec2 drift(const ModelParams& params, const DensityState& z) {
  require_finite_nonneg(z);
  return drift_unchecked(params, z.N, z.P);
}

Cov2 covariance(const ModelParams& params, const DensityState& z) {
  require_finite_nonneg(z);
  const double predation = params.m * z.N * z.P / (1.0 + z.N);
  return {z.N + z.N * z.N / params.k + predation,  // s11
          -predation,                              // s12
          params.c * z.P + predation};             // s22
}

EventFactor event_factor(const ModelParams& params, const DensityState& z) {
  const Vec4 lam = rates(params, z);
  EventFactor f;
  for (int e = 0; e < 4; ++e) {
    const double s = guarded_sqrt(lam[e]);
    f.col[e] = {s * channel_increments[e][0], s * channel_increments[e][1]};
  }
  return f;
}

Chol2 cholesky_factor(const ModelParams& params, const DensityState& z) {
  if (z.N == 0.0 || z.P == 0.0)
    throw DegenerateCovarianceError("covariance is singular on the axes; "
                                    "use the event factor or treat the state as absorbed");
  const Cov2 s = covariance(params, z);
  const double l11 = guarded_sqrt(s.s11);
  const double l21 = s.s12 / l11;
  const double l22 = guarded_sqrt(s.s22 - l21 * l21);
  return {l11, l21, l22};
}

Diag2 diagonal_factor(const ModelParams& params, const DensityState& z) {
  const Cov2 s = covariance(params, z);
  return {guarded_sqrt(s.s11), guarded_sqrt(s.s22)};
}

RegimeReport classify_regime(const ModelParams& params) {
  RegimeReport r;
  if (params.m <= params.c) {
    // Predator per-capita growth never exceeds mortality; no coexistence
    // equilibrium exists (N* treated as +infinity).
    r.regime = Regime::PredatorExtinction;
    return r;
  }
  const double n_star = params.c / (params.m - params.c);
  r.n_star = n_star;
  r.hopf_k = 1.0 + 2.0 * n_star;
  if (params.k <= n_star) {
    r.regime = Regime::PredatorExtinction;
    return r;
  }
  const double p_star = (1.0 + n_star) / params.m * (1.0 - n_star / params.k);
  r.p_star = p_star;
  const Mat2 j = jacobian(params, DensityState{n_star, p_star});
  r.jac_trace_k3 = j[0][0] + j[1][1];
  // k = 1 + 2 N* is inclusive on the stable side.
  r.regime = params.k <= *r.hopf_k ? Regime::StableCoexistence : Regime::LimitCycle;
  return r;
}

Mat2 jacobian(const ModelParams& params, const DensityState& z) {
  require_finite_nonneg(z);
  const double denom = 1.0 + z.N;
  const double sat = params.m * z.N / denom;            // d(predation)/dP
  const double dsat = params.m * z.P / (denom * denom); // d(predation)/dN
  return {{{1.0 - 2.0 * z.N / params.k - dsat, -sat},
           {dsat, sat - params.c}}};
}

}  // namespace predprey
