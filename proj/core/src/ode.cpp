#include "predprey/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace predprey::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0;
constexpr double a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0;
constexpr double a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0;
constexpr double b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// 5th-minus-4th order error weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0;
constexpr double e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output (order-4 continuous extension) coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// PI step controller, standard DOPRI5 settings.
constexpr double ctl_beta = 0.04;
constexpr double ctl_expo1 = 0.2 - ctl_beta * 0.75;
constexpr double ctl_safe = 0.9;
constexpr double ctl_facc1 = 5.0;   // max shrink h/5 per step
constexpr double ctl_facc2 = 0.1;   // max growth 10h per step

constexpr long long max_steps = 10'000'000;

Vec2 add2(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }

double hinit(const ModelParams& params, const Vec2& y, const Vec2& f0, double horizon,
             double rel_tol, double abs_tol) {
  double dnf = 0.0, dny = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double sk = abs_tol + rel_tol * std::fabs(y[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y[i] / sk) * (y[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, horizon);
  const Vec2 y1{y[0] + h * f0[0], y[1] + h * f0[1]};
  const Vec2 f1 = drift_unchecked(params, y1[0], y1[1]);
  double der2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double sk = abs_tol + rel_tol * std::fabs(y[i]);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::fabs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, horizon});
}

void repair_positivity(Vec2& y, double abs_tol) {
  for (int i = 0; i < 2; ++i)
    if (y[i] < 0.0 && y[i] > -abs_tol) y[i] = 0.0;
}

}  // namespace

OdeTrajectory integrate(const ModelParams& params, DensityState z0, double horizon,
                        double rel_tol, double abs_tol,
                        const std::optional<std::vector<double>>& output_grid) {
  if (!(std::isfinite(z0.N) && std::isfinite(z0.P)) || z0.N < 0.0 || z0.P < 0.0)
    throw InputDomainError("z0 must lie in the closed quadrant");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InputDomainError("horizon must be positive and finite");
  for (double tol : {rel_tol, abs_tol})
    if (!(tol > 0.0 && tol <= 1e-2))
      throw InputDomainError("tolerances must lie in (0, 1e-2]");
  if (output_grid) {
    const auto& g = *output_grid;
    if (g.empty()) throw InputDomainError("output grid must be non-empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i]) || g[i] < 0.0 || g[i] > horizon)
        throw InputDomainError("output grid must lie in [0, horizon]");
      if (i > 0 && g[i] <= g[i - 1])
        throw InputDomainError("output grid must be strictly increasing");
    }
  }

  OdeTrajectory out;
  out.rel_tol = rel_tol;
  out.abs_tol = abs_tol;
  const auto emit = [&](double t, const Vec2& y) {
    out.times.push_back(t);
    out.states.push_back({y[0], y[1]});
  };

  Vec2 y{z0.N, z0.P};
  double t = 0.0;
  std::size_t gi = 0;
  if (output_grid) {
    while (gi < output_grid->size() && (*output_grid)[gi] <= 0.0) emit((*output_grid)[gi], y), ++gi;
  } else {
    emit(0.0, y);
  }

  Vec2 k1 = drift_unchecked(params, y[0], y[1]);
  double h = hinit(params, y, k1, horizon, rel_tol, abs_tol);
  double facold = 1e-4;
  bool reject = false;
  long long nstep = 0;

  while (t < horizon) {
    if (++nstep > max_steps)
      throw StiffnessError("step budget exceeded at t=" + std::to_string(t));
    if (h < 1e-14 * horizon)
      throw StiffnessError("step size underflow at t=" + std::to_string(t));
    bool last = false;
    if (t + h >= horizon) {
      h = horizon - t;
      last = true;
    }

    Vec2 s;
    s = {y[0] + h * a21 * k1[0], y[1] + h * a21 * k1[1]};
    const Vec2 k2 = drift_unchecked(params, s[0], s[1]);
    s = {y[0] + h * (a31 * k1[0] + a32 * k2[0]), y[1] + h * (a31 * k1[1] + a32 * k2[1])};
    const Vec2 k3 = drift_unchecked(params, s[0], s[1]);
    s = {y[0] + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]),
         y[1] + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1])};
    const Vec2 k4 = drift_unchecked(params, s[0], s[1]);
    s = {y[0] + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
         y[1] + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1])};
    const Vec2 k5 = drift_unchecked(params, s[0], s[1]);
    s = {y[0] + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] + a65 * k5[0]),
         y[1] + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] + a65 * k5[1])};
    const Vec2 k6 = drift_unchecked(params, s[0], s[1]);
    const Vec2 ynew{y[0] + h * (b1 * k1[0] + b3 * k3[0] + b4 * k4[0] + b5 * k5[0] + b6 * k6[0]),
                    y[1] + h * (b1 * k1[1] + b3 * k3[1] + b4 * k4[1] + b5 * k5[1] + b6 * k6[1])};
    const Vec2 k7 = drift_unchecked(params, ynew[0], ynew[1]);

    double errsum = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = abs_tol + rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      errsum += (ei / sk) * (ei / sk);
    }
    const double err = std::sqrt(errsum / 2.0);

    if (!std::isfinite(ynew[0]) || !std::isfinite(ynew[1]) || !std::isfinite(err))
      throw DivergenceError("non-finite state at t=" + std::to_string(t));

    const double fac11 = std::pow(err, ctl_expo1);
    double hnew;
    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      double fac = fac11 / std::pow(facold, ctl_beta);
      fac = std::max(ctl_facc2, std::min(ctl_facc1, fac / ctl_safe));
      hnew = h / fac;

      const double tnew = last ? horizon : t + h;
      if (output_grid && gi < output_grid->size() && (*output_grid)[gi] <= tnew) {
        const Vec2 ydiff{ynew[0] - y[0], ynew[1] - y[1]};
        const Vec2 bspl{h * k1[0] - ydiff[0], h * k1[1] - ydiff[1]};
        const Vec2 rcont1 = y, rcont2 = ydiff, rcont3 = bspl;
        const Vec2 rcont4{ydiff[0] - h * k7[0] - bspl[0], ydiff[1] - h * k7[1] - bspl[1]};
        const Vec2 rcont5{
            h * (d1 * k1[0] + d3 * k3[0] + d4 * k4[0] + d5 * k5[0] + d6 * k6[0] + d7 * k7[0]),
            h * (d1 * k1[1] + d3 * k3[1] + d4 * k4[1] + d5 * k5[1] + d6 * k6[1] + d7 * k7[1])};
        while (gi < output_grid->size() && (*output_grid)[gi] <= tnew) {
          const double theta = std::clamp(((*output_grid)[gi] - t) / h, 0.0, 1.0);
          const double th1 = 1.0 - theta;
          Vec2 yi;
          for (int i = 0; i < 2; ++i)
            yi[i] = rcont1[i] +
                    theta * (rcont2[i] + th1 * (rcont3[i] + theta * (rcont4[i] + th1 * rcont5[i])));
          repair_positivity(yi, abs_tol);
          emit((*output_grid)[gi], yi);
          ++gi;
        }
      }

      t = tnew;
      y = ynew;
      repair_positivity(y, abs_tol);
      k1 = k7;
      if (!output_grid) emit(t, y);
      if (reject) hnew = std::min(hnew, h);
      reject = false;
      if (last) break;
    } else {
      hnew = h / std::min(ctl_facc1, fac11 / ctl_safe);
      reject = true;
    }
    h = std::min(hnew, horizon);
  }

  return out;
}

DissipativityReport dissipativity_check(const OdeTrajectory& traj, const ModelParams& params,
                                        double beta, double eps, double delta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InputDomainError("beta must lie in (0, 1]");
  if (!(eps > 0.0) || !(delta > 0.0)) throw InputDomainError("eps and delta must be positive");
  if (traj.states.empty()) throw InputDomainError("empty trajectory");

  const double bound_n = params.k + delta;
  const double cc = params.c;
  const double bound_s = params.k * (1.0 + cc) * (1.0 + cc) / (4.0 * cc) + eps;
  const double slack = 10.0 * traj.abs_tol;

  DissipativityReport report;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& z = traj.states[i];
    const double s = z.N + beta * z.P;
    if (!report.entered) {
      if (z.N <= bound_n && s <= bound_s) {
        report.entered = true;
        report.entry_time = traj.times[i];
      }
    } else if (z.N > bound_n + slack || s > bound_s + slack) {
      ++report.violations_after_entry;
    }
  }
  return report;
}

}  // namespace predprey::ode
