#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "smg/sojourn.hpp"

namespace smg {

struct Branch {
  int to;
  double prob;
  SojournLaw law;
};

// The full game tuple: hidden types, states, both action sets, the
// continuous-time discount rate, the type prior, reward rates and the
// factored semi-Markov kernel P(j|i,a,b) * F_{i,a,b,j}(t).
struct GameSpec {
  std::vector<std::string> types;
  std::vector<std::string> states;
  std::vector<std::string> actions_p1;
  std::vector<std::string> actions_p2;
  double alpha = 1.0;
  std::vector<double> initial_belief;            // over types
  std::vector<double> cost;                      // flattened (k,i,a,b)
  std::vector<std::vector<Branch>> transitions;  // indexed by iab_index

  int num_types() const { return static_cast<int>(types.size()); }
  int num_states() const { return static_cast<int>(states.size()); }
  int num_a1() const { return static_cast<int>(actions_p1.size()); }
  int num_a2() const { return static_cast<int>(actions_p2.size()); }

  int iab_index(int i, int a, int b) const {
    return (i * num_a1() + a) * num_a2() + b;
  }
  double cost_at(int k, int i, int a, int b) const {
    return cost[((k * num_states() + i) * num_a1() + a) * num_a2() + b];
  }
  double& cost_at(int k, int i, int a, int b) {
    return cost[((k * num_states() + i) * num_a1() + a) * num_a2() + b];
  }

  // c* = max over (k,i,a,b).
  double max_cost() const;

  // D(t | i,a,b) = sum_j prob(j) F_j(t).
  double sojourn_cdf(int i, int a, int b, double t) const;

  // Renormalizes branch probabilities and the initial belief exactly.
  // Valid inputs are already within 1e-12 of normalized; this protects
  // downstream LP feasibility from input round-off.
  void renormalize();
};

// Every invariant violation, each naming the offending field. Empty = valid.
std::vector<std::string> validate_spec(const GameSpec& spec);

// Per-(i,a,b): qhat(j) = prob(j) * E[e^{-alpha tau_j}] and the discounted
// stage weight m = (1 - sum_j qhat(j)) / alpha.
struct DiscountedAggregates {
  std::vector<std::vector<double>> qhat;  // [iab][j]
  std::vector<double> m;                  // [iab]
  double beta_bound = 0.0;                // max_iab sum_j qhat

  double qhat_at(const GameSpec& s, int i, int a, int b, int j) const {
    return qhat[s.iab_index(i, a, b)][j];
  }
  double m_at(const GameSpec& s, int i, int a, int b) const {
    return m[s.iab_index(i, a, b)];
  }
};

DiscountedAggregates discounted_aggregates(const GameSpec& spec);

// Witness that no state-action pair can jump before time delta with
// probability above 1 - epsilon; beta = 1 - epsilon (1 - e^{-alpha delta})
// is the per-stage discount bound all convergence budgets use.
struct Assumption1Certificate {
  double delta = 0.0;
  double epsilon = 0.0;
  double beta = 1.0;
  int worst_i = 0, worst_a = 0, worst_b = 0;
};

struct CertificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluates each candidate delta, discards those with epsilon(delta) <= 0,
// and returns the certificate minimizing beta. Throws CertificationFailed
// when no candidate survives.
Assumption1Certificate certify_assumption1(
    const GameSpec& spec, const std::vector<double>& delta_candidates);

// Log grid over [1e-3, 10] (60 points) plus halved atom times / delays.
std::vector<double> default_delta_candidates(const GameSpec& spec);

}  // namespace smg
