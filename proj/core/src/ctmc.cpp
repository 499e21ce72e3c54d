#include "predprey/ctmc.hpp"

#include <cmath>
#include <string>

namespace predprey::ctmc {

namespace {

void require_count_state(const CountState& x) {
  if (x.n < 0 || x.p < 0) throw InputDomainError("counts must be nonnegative");
}

// Direct-method core. visit(t, x, e) is called after every jump and returns
// false to stop early (budget control lives in the caller).
template <class Visitor>
void run_direct(const ModelParams& params, CountState x, double horizon, RngStream& stream,
                Visitor&& visit) {
  double t = 0.0;
  for (;;) {
    const Vec4 lam = scaled_intensities(params, x);
    const double total = lam[0] + lam[1] + lam[2] + lam[3];
    if (total == 0.0) return;  // fully absorbed at (0,0)

    t += -std::log(stream.uniform_openclosed01()) / total;
    if (t > horizon) return;

    const double target = stream.uniform_open01() * total;
    int e = 3;
    double cum = 0.0;
    for (int i = 0; i < 4; ++i) {
      cum += lam[i];
      if (cum > target) {  // first channel strictly exceeding u*total
        e = i;
        break;
      }
    }
    x.n += channel_increments[e][0];
    x.p += channel_increments[e][1];

    if (!visit(t, x, static_cast<Channel>(e))) return;
  }
}

}  // namespace

Vec4 scaled_intensities(const ModelParams& params, const CountState& x) {
  require_count_state(x);
  const double n = double(x.n), p = double(x.p), w = params.omega;
  // omega * lambda(x/omega), simplified so omega = +inf never appears alone:
  // (n, n^2/(k*omega), c*p, m*n*p/(omega + n)).
  return {n, n * n / (params.k * w), params.c * p, params.m * n * p / (w + n)};
}

JumpPath simulate(const ModelParams& params, CountState x0, double horizon, RngStream& stream,
                  std::int64_t max_jumps) {
  require_count_state(x0);
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InputDomainError("horizon must be positive and finite");
  if (max_jumps <= 0) throw InputDomainError("max_jumps must be positive");

  JumpPath path;
  path.omega = params.omega;
  path.x0 = x0;
  path.horizon = horizon;

  std::int64_t jumps = 0;
  bool exceeded = false;
  run_direct(params, x0, horizon, stream,
             [&](double t, const CountState& x, Channel e) {
               if (jumps == max_jumps) {
                 exceeded = true;
                 return false;
               }
               path.jump_times.push_back(t);
               path.states.push_back(x);
               path.channels.push_back(e);
               ++jumps;
               return true;
             });
  if (exceeded) {
    // Build the message before std::move(path): argument evaluation order is
    // unspecified and the moved-from path must not be read.
    std::string msg = "jump budget (" + std::to_string(max_jumps) + ") exceeded at t=" +
                      std::to_string(path.jump_times.back());
    throw BudgetExceededError(std::move(msg), std::move(path));
  }
  return path;
}

void simulate_on_grid(const ModelParams& params, CountState x0, double horizon,
                      std::span<const double> grid, RngStream& stream, std::span<double> out_n,
                      std::span<double> out_p, std::int64_t max_jumps) {
  require_count_state(x0);
  if (out_n.size() != grid.size() || out_p.size() != grid.size())
    throw InputDomainError("output spans must match the grid length");
  if (max_jumps <= 0) throw InputDomainError("max_jumps must be positive");

  const double w = params.omega;
  std::size_t gi = 0;
  CountState cur = x0;
  std::int64_t jumps = 0;
  bool exceeded = false;
  // Record the pre-jump state for every grid point strictly before the jump
  // time; a grid point equal to a jump time takes the post-jump value below.
  run_direct(params, x0, horizon, stream,
             [&](double t, const CountState& x, Channel) {
               if (jumps == max_jumps) {
                 exceeded = true;
                 return false;
               }
               while (gi < grid.size() && grid[gi] < t) {
                 out_n[gi] = double(cur.n) / w;
                 out_p[gi] = double(cur.p) / w;
                 ++gi;
               }
               cur = x;
               ++jumps;
               return true;
             });
  if (exceeded)
    throw BudgetExceededError("jump budget (" + std::to_string(max_jumps) +
                                  ") exceeded (streaming run; no path retained)",
                              JumpPath{{}, {}, {}, params.omega, x0, horizon});
  for (; gi < grid.size(); ++gi) {
    out_n[gi] = double(cur.n) / w;
    out_p[gi] = double(cur.p) / w;
  }
}

std::vector<DensityState> density_path(const JumpPath& path, const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0 || grid[i] > path.horizon)
      throw GridRangeError("grid point outside the simulated range [0, horizon]");
    if (i > 0 && grid[i] <= grid[i - 1]) throw GridRangeError("grid must be strictly increasing");
  }
  std::vector<DensityState> out;
  out.reserve(grid.size());
  const double w = path.omega;
  std::size_t j = 0;  // index of the next jump
  CountState cur = path.x0;
  for (double g : grid) {
    while (j < path.jump_times.size() && path.jump_times[j] <= g) cur = path.states[j++];
    out.push_back({double(cur.n) / w, double(cur.p) / w});
  }
  return out;
}

}  // namespace predprey::ctmc
