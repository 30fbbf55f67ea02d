#pragma once

#include <utility>
#include <vector>

namespace smg {

// Probability vector over the hidden types. off_support marks results of a
// Bayes update whose conditioning event had zero probability; the update is
// then the identity (or uniform, for chi) rather than undefined.
struct Belief {
  std::vector<double> p;
  bool off_support = false;
};

// Player 1's type-dependent stage mix: mu[k][a].
struct StageMixP1 {
  std::vector<std::vector<double>> mu;
};

// Player 2's stage mix over B.
struct StageMixP2 {
  std::vector<double> nu;
};

// Joint law over (type, action): phi[k][a]. Either a full probability over
// K x A or, inside the stage LP, a slice with row sums pinned to p.
struct JointMix {
  std::vector<std::vector<double>> phi;
};

// Bayes posterior after seeing action a under mix mu. Off-support actions
// leave the belief unchanged and set the flag.
Belief posterior_update(const Belief& p, const StageMixP1& mu, int a);

// Conditional type law of the column phi(., a). Zero-mass columns return
// the uniform belief with the flag set.
Belief chi(const JointMix& phi, int a);

JointMix joint_from(const Belief& p, const StageMixP1& mu);

// Marginal + conditional of phi; rows with zero mass get the uniform mix.
// Exact round trip of joint_from when every p_k > 0.
std::pair<Belief, StageMixP1> conditional_from(const JointMix& phi, int num_a);

// All points of the (dim-1)-simplex with coordinates that are multiples of
// 1/mesh, lexicographic, C(mesh + dim - 1, dim - 1) of them.
std::vector<Belief> simplex_grid(int dim, int mesh);

}  // namespace smg
