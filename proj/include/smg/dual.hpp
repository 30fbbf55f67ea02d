#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "smg/player1.hpp"
#include "smg/value.hpp"

namespace smg {

struct SearchBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DualSearchConfig {
  int recover_grid = 33;      // points per axis when minimizing over z
  double recover_step = 1e-4; // coordinate-descent resolution in z
  int w_grid = 9;             // points per axis over the continuation box
  double w_step_frac = 1e-3;  // descent resolution as a fraction of c*
  long max_evals = 5000000;
  std::vector<std::vector<std::vector<double>>> warm_w;  // optional seeds
};

// Lazy evaluator of the dual value U*(z, i) = max_p { V*(p,i) - <p,z>/alpha }
// straight from the cut envelope, memoized on z quantized at 1e-9.
class DualValueOracle {
 public:
  DualValueOracle(const GameSpec& spec, const CutEnvelope& env);

  double conjugate_eval(const std::vector<double>& z, int i);

  const GameSpec& spec() const { return spec_; }
  const CutEnvelope& envelope() const { return env_; }

 private:
  const GameSpec& spec_;
  const CutEnvelope& env_;
  std::map<std::pair<int, std::vector<long long>>, double> memo_;
};

struct RecoveredValue {
  double value = 0.0;
  std::vector<double> z;
};

// min over z in [0, c*]^K of U*(z,i) + <p,z>/alpha: coordinate grid scan
// followed by coordinate descent. Inverts the conjugate back to V*(p,i).
RecoveredValue recover_value(DualValueOracle& oracle, const Belief& p, int i,
                             const DualSearchConfig& cfg = {});

// Continuation dual vectors, one per state: w[j][k] in [0, c*].
using WField = std::vector<std::vector<double>>;

// Payoff matrix of the dual stage game at (i, z, w), rows (k,a), cols b:
// c(k,i,a,b) m(i,a,b) - z(k)/alpha
//   + sum_j qhat(i,a,b,j) (U*(w(j), j) + w(j)(k)/alpha).
std::vector<std::vector<double>> gamma_matrix(int i,
                                              const std::vector<double>& z,
                                              const WField& w,
                                              DualValueOracle& oracle,
                                              const DiscountedAggregates& agg,
                                              const GameSpec& spec);

struct DualStageSolution {
  WField w;
  StageMixP2 nu;
  double val = 0.0;
  double tol = 0.0;  // search-resolution bound reported to callers
};

// min over w of the matrix-game value of gamma_matrix: exhaustive grid over
// the box, optional warm seeds, then coordinate descent. The inner saddle
// is exact; only the w search is approximate, with its resolution reported.
DualStageSolution dual_stage_solve(int i, const std::vector<double>& z,
                                   DualValueOracle& oracle,
                                   const DiscountedAggregates& agg,
                                   const GameSpec& spec,
                                   const DualSearchConfig& cfg = {});

// The arg-min z of recover_value at the start state: Player 2's initial
// dual state.
std::vector<double> p2_init(DualValueOracle& oracle, const Belief& p, int i0,
                            const DualSearchConfig& cfg = {});

struct DualDecisionCache {
  double quantum = 1e-9;
  std::map<std::pair<int, std::vector<long long>>, DualStageSolution> table;
  std::vector<long long> key(const std::vector<double>& z) const;
};

struct P2TraceRecord {
  int n = 0;
  int i = 0;
  std::vector<double> zeta;
  std::vector<double> nu;
  double val = 0.0;
  WField w;
};

// The uninformed player's policy engine, Markov in (state, dual vector):
// decide solves the dual stage game at (i, zeta), observe jumps the dual
// state to the continuation w*(j).
class P2Engine {
 public:
  P2Engine(const GameSpec& spec, const DiscountedAggregates& agg,
           DualValueOracle& oracle, std::vector<double> zeta0,
           std::shared_ptr<DualDecisionCache> cache = nullptr,
           DualSearchConfig cfg = {});

  StageMixP2 decide(int i);
  std::vector<double> observe(int j);

  const std::vector<double>& zeta() const { return zeta_; }
  int epoch() const { return n_; }
  double last_value() const { return last_.val; }
  const WField& last_w() const { return last_.w; }

  void enable_trace() { tracing_ = true; }
  const std::vector<P2TraceRecord>& trace() const { return trace_; }

 private:
  const GameSpec& spec_;
  const DiscountedAggregates& agg_;
  DualValueOracle& oracle_;
  std::shared_ptr<DualDecisionCache> cache_;
  DualSearchConfig cfg_;
  std::vector<double> zeta_;
  DualStageSolution last_;
  int n_ = 0;
  bool awaiting_observe_ = false;
  bool tracing_ = false;
  std::vector<P2TraceRecord> trace_;
};

// `z,state,value` rows of U* over a coordinate grid, z joined with ';'.
std::string conjugate_csv(DualValueOracle& oracle, int points_per_axis);

}  // namespace smg
