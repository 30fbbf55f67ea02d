#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "smg/belief.hpp"
#include "smg/game.hpp"

namespace smg {

using Rng = std::mt19937_64;

// Exact inverse-CDF draw from a holding-time law.
double sample_sojourn(const SojournLaw& law, Rng& rng);

// Engine handles the simulator drives; any policy (optimal engines, uniform
// baselines, test stubs) plugs in through these.
struct SimP1 {
  std::function<StageMixP1(int i)> decide;
  std::function<void(int i, int a)> observe;
};

struct SimP2 {
  std::function<StageMixP2(int i)> decide;
  std::function<void(int j)> observe;
};

using SimP1Factory = std::function<SimP1()>;
using SimP2Factory = std::function<SimP2()>;

struct TrajectoryRecord {
  int type = 0;
  std::vector<double> times;    // T_0 = 0, strictly increasing
  std::vector<int> states;
  std::vector<int> actions_p1;
  std::vector<int> actions_p2;
  double payoff = 0.0;
  int truncation_epoch = 0;
  double residual_bound = 0.0;  // e^{-alpha T} c* / alpha at truncation
};

struct Truncation {
  int epoch_cap = 10000;
  double residual = 1e-6;
};

// One play-through: type drawn from p0 (or forced), per epoch both engines
// mix, the kernel draws (next state, sojourn), and the stage reward
// accumulates as c * (e^{-alpha T_m} - e^{-alpha T_{m+1}}) / alpha.
TrajectoryRecord simulate_episode(const GameSpec& spec,
                                  const DiscountedAggregates& agg, SimP1& p1,
                                  SimP2& p2, const std::vector<double>& p0,
                                  int i0, Rng& rng, const Truncation& trunc,
                                  int forced_type = -1);

struct MonteCarloResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  double max_residual = 0.0;
  long episodes = 0;
};

// Independent per-episode substreams seeded from (seed, episode index);
// fresh engine instances per episode; aggregation in episode order.
MonteCarloResult monte_carlo_value(const GameSpec& spec,
                                   const DiscountedAggregates& agg,
                                   const SimP1Factory& p1f,
                                   const SimP2Factory& p2f,
                                   const std::vector<double>& p0, int i0,
                                   long episodes, std::uint64_t seed,
                                   const Truncation& trunc = {},
                                   int forced_type = -1);

}  // namespace smg
