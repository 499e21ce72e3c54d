#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "predprey/model.hpp"
#include "predprey/rng.hpp"

namespace predprey::ctmc {

struct CountState {
  std::int64_t n = 0;  // prey count
  std::int64_t p = 0;  // predator count

  bool operator==(const CountState&) const = default;
};

// Exact jump path. states[i] is the post-jump state at jump_times[i];
// channels[i] is the channel that fired. The initial state and horizon are
// kept so paths can be replayed and evaluated on [0, horizon].
struct JumpPath {
  std::vector<double> jump_times;
  std::vector<CountState> states;
  std::vector<Channel> channels;
  double omega = 1.0;
  CountState x0{};
  double horizon = 0.0;
};

inline constexpr std::int64_t default_jump_budget = 1'000'000'000;

// Thrown when a path exceeds its jump budget; carries the partial path.
class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(const std::string& msg, JumpPath partial)
      : std::runtime_error(msg),
        partial_(std::make_shared<JumpPath>(std::move(partial))) {}

  const JumpPath& partial_path() const { return *partial_; }

 private:
  std::shared_ptr<const JumpPath> partial_;
};

// Lambda_e(x) = omega * lambda_e(x/omega); at omega = 1 these are the raw
// count intensities (n, n^2/k, c p, m n p / (omega + n) in general).
Vec4 scaled_intensities(const ModelParams& params, const CountState& x);

// Gillespie direct method: exponential waiting times with the total
// intensity, channel chosen as the first whose cumulative intensity strictly
// exceeds u * total. Stops at the horizon or when the total intensity is 0.
JumpPath simulate(const ModelParams& params, CountState x0, double horizon, RngStream& stream,
                  std::int64_t max_jumps = default_jump_budget);

// Memory-lean variant for large ensembles: runs the same sampler but records
// only the density x/omega at the grid times (cadlag evaluation), never
// materializing the jump path. Consumes the stream identically to simulate.
void simulate_on_grid(const ModelParams& params, CountState x0, double horizon,
                      std::span<const double> grid, RngStream& stream,
                      std::span<double> out_n, std::span<double> out_p,
                      std::int64_t max_jumps = default_jump_budget);

// Piecewise-constant (cadlag) density x/omega on a grid inside [0, horizon];
// a grid point at a jump time takes the post-jump value.
std::vector<DensityState> density_path(const JumpPath& path, const std::vector<double>& grid);

}  // namespace predprey::ctmc
