#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smg/belief.hpp"
#include "smg/game.hpp"
#include "smg/value.hpp"

namespace smg {

struct DepthExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EnumerationTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Histories are flat int tuples (i0, a0, b0, i1, a1, b1, ..., i_m).
// Policies carry an explicit depth; evaluation past it throws.
struct P1Policy {
  int depth = 0;
  std::function<std::vector<double>(int k, const std::vector<int>& h)> act;
};

struct P2Policy {
  int depth = 0;
  std::function<std::vector<double>(const std::vector<int>& h)> act;
};

// Exact expected discounted reward over decision epochs 0..n inclusive
// under the fixed policy pair, by the posterior-form recursion (identical
// to the joint expectation by construction, which is exactly what the
// linearity-in-p test checks).
double eval_finite_horizon(const Belief& p, int i, const P1Policy& pi,
                           const P2Policy& sigma, int n,
                           const DiscountedAggregates& agg,
                           const GameSpec& spec);

struct BruteLimits {
  long max_matrix_entries = 100000;
};

// V*_n(p, i) by enumerating both players' deterministic history-dependent
// policies and solving the resulting matrix game. Exact but tiny-scale.
double brute_value(const Belief& p, int i, int n, const GameSpec& spec,
                   const DiscountedAggregates& agg,
                   const BruteLimits& limits = {});

struct BrBracket {
  double value_lo = 0.0;
  double value_hi = 0.0;
};

struct BrBudget {
  double max_nodes = 1e6;  // (|A||B||S|)^N cap
};

// Player 2's policy as a Markov rule in (state, dual vector): returns the
// stage mix and the continuation dual field.
struct P2Responder {
  std::vector<double> zeta0;
  std::function<std::pair<std::vector<double>, std::vector<std::vector<double>>>(
      int i, const std::vector<double>& zeta)>
      decide;
};

// Best response of the informed player against a fixed Player 2 rule:
// per-type maximization over decision epochs 0..N, then the prior average.
// The bracket [lo, lo + error_budget(N)] contains the infinite-horizon sup.
BrBracket best_response_p1(const P2Responder& sigma, const Belief& p, int i,
                           int N, const GameSpec& spec,
                           const DiscountedAggregates& agg,
                           const Assumption1Certificate& cert,
                           const BrBudget& budget = {});

// Player 1's policy as a function of the public belief.
struct P1Responder {
  std::function<StageMixP1(const Belief& q, int i)> decide;
};

// Best response of the uninformed player: depth-N minimization over the
// history tree carrying unnormalized type weights p_k prod mu^(k)(a_m), so
// off-support branches never divide by zero. Bracket as above.
BrBracket best_response_p2(const P1Responder& pi, const Belief& p, int i,
                           int N, const GameSpec& spec,
                           const DiscountedAggregates& agg,
                           const Assumption1Certificate& cert,
                           const BrBudget& budget = {});

struct SingleTypeSolution {
  std::vector<double> value;                      // per state
  std::vector<std::vector<double>> p1_mix;        // per state, over A
  std::vector<std::vector<double>> p2_mix;        // per state, over B
  int iterations = 0;
};

// Complete-information discounted semi-Markov game for one fixed type:
// Shapley iteration on matrix games. The independent reference for vertex
// beliefs and |K| = 1 reductions.
SingleTypeSolution single_type_solve(const GameSpec& spec,
                                     const DiscountedAggregates& agg, int k,
                                     double tol, int max_iter = 100000);

// Finite-horizon variant: values of the game over epochs 0..n per state,
// starting the backward induction from 0.
std::vector<double> single_type_finite(const GameSpec& spec,
                                       const DiscountedAggregates& agg, int k,
                                       int n);

}  // namespace smg
