#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "smg/belief.hpp"
#include "smg/game.hpp"
#include "smg/lp.hpp"

namespace smg {

// Concave value function on the belief simplex, one per state, stored as a
// finite set of linear cuts: V(p, j) = min_g <g, p>. Affine pieces fold
// their intercept into the cut since <h*1, p> = h on the simplex.
struct CutEnvelope {
  std::vector<std::vector<std::vector<double>>> cuts;  // [state][cut][k]

  explicit CutEnvelope(int num_states = 0) : cuts(num_states) {}

  double eval(const std::vector<double>& p, int j) const;

  // min_g <g, v> for nonnegative v; positively homogeneous extension of
  // eval, the form the stage LP and the posterior-weighted terms use.
  double perspective(const std::vector<double>& v, int j) const;

  // Skips cuts equal to an existing one within 1e-12 componentwise.
  void add_cut(int j, const std::vector<double>& g);
};

// Drops cuts that are nowhere strictly below the rest of the envelope.
// Exact up to LP tolerance; values change by at most the drop slack.
CutEnvelope prune_envelope(const CutEnvelope& env, const LpTolerances& tol = {});

struct StageSaddle {
  double value = 0.0;
  JointMix phi_star;
  StageMixP1 mu_star;
  StageMixP2 nu_star;
  std::vector<double> cut;  // supergradient: <cut, q> >= T(q, i), tight at p
};

// One application of the Shapley operator at (p, i) against the previous
// envelope, solved as a single LP over the joint mix phi; duals of the mass
// rows give the cut, duals of the payoff rows give Player 2's mix.
StageSaddle stage_backup(const Belief& p, int i, const CutEnvelope& prev,
                         const DiscountedAggregates& agg, const GameSpec& spec,
                         const LpTolerances& tol = {});

struct IterationBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  int max_iterations = 10000;
  bool parallel = true;
  bool prune = false;
  LpTolerances lp;
};

struct SolveReport {
  CutEnvelope envelope;
  int mesh = 1;
  int iterations = 0;
  double beta = 0.0;
  double tail_bound = 0.0;
  double last_change = 0.0;
  // grid_values[n][i * grid_size + g]: audit trail for monotonicity.
  std::vector<std::vector<double>> grid_values;
  std::vector<Belief> grid;
};

// c* beta^{n+1} / alpha: bound on the reward mass beyond the n-th decision
// epoch, i.e. the tail after n+1 completed stages.
double error_budget(int n, const Assumption1Certificate& cert, double cstar,
                    double alpha);

// Value iteration from V = 0: each pass rebuilds every state's envelope
// from the backups at all grid points, stopping once the sup-norm change
// drops below stop_tol * (1 - beta) and the a-priori count N(stop_tol) is
// reached.
SolveReport value_iterate(const GameSpec& spec, const DiscountedAggregates& agg,
                          const Assumption1Certificate& cert, int mesh,
                          double stop_tol, const SolveOptions& opts = {});

std::string solution_to_json(const SolveReport& report,
                             const std::string& digest);
struct SolutionParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Returns the report and fills digest with the stored spec digest.
SolveReport solution_from_json(const std::string& text, std::string* digest);

// `belief,state,value` rows over the report's grid; belief coordinates are
// joined with ';' so the file stays three columns.
std::string value_csv(const SolveReport& report, const GameSpec& spec);

}  // namespace smg
