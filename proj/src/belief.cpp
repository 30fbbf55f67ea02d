#include "smg/belief.hpp"

#include <utility>

namespace smg {

Belief posterior_update(const Belief& p, const StageMixP1& mu, int a) {
  const std::size_t K = p.p.size();
  double denom = 0.0;
  for (std::size_t k = 0; k < K; ++k) denom += p.p[k] * mu.mu[k][a];
  if (denom <= 0.0) {
    Belief out = p;
    out.off_support = true;
    return out;
  }
  Belief out;
  out.p.resize(K);
  for (std::size_t k = 0; k < K; ++k) out.p[k] = p.p[k] * mu.mu[k][a] / denom;
  return out;
}

Belief chi(const JointMix& phi, int a) {
  const std::size_t K = phi.phi.size();
  double denom = 0.0;
  for (std::size_t k = 0; k < K; ++k) denom += phi.phi[k][a];
  Belief out;
  out.p.resize(K);
  if (denom <= 0.0) {
    for (std::size_t k = 0; k < K; ++k) out.p[k] = 1.0 / K;
    out.off_support = true;
    return out;
  }
  for (std::size_t k = 0; k < K; ++k) out.p[k] = phi.phi[k][a] / denom;
  return out;
}

JointMix joint_from(const Belief& p, const StageMixP1& mu) {
  const std::size_t K = p.p.size();
  JointMix out;
  out.phi.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    out.phi[k].resize(mu.mu[k].size());
    for (std::size_t a = 0; a < mu.mu[k].size(); ++a)
      out.phi[k][a] = p.p[k] * mu.mu[k][a];
  }
  return out;
}

std::pair<Belief, StageMixP1> conditional_from(const JointMix& phi, int num_a) {
  const std::size_t K = phi.phi.size();
  Belief p;
  p.p.resize(K);
  StageMixP1 mu;
  mu.mu.assign(K, std::vector<double>(num_a));
  for (std::size_t k = 0; k < K; ++k) {
    double mass = 0.0;
    for (int a = 0; a < num_a; ++a) mass += phi.phi[k][a];
    p.p[k] = mass;
    for (int a = 0; a < num_a; ++a)
      mu.mu[k][a] = mass > 0.0 ? phi.phi[k][a] / mass : 1.0 / num_a;
  }
  return {std::move(p), std::move(mu)};
}

namespace {

void grid_rec(int dim, int mesh, int remaining, std::vector<double>& coords,
              std::vector<Belief>& out) {
  const int pos = static_cast<int>(coords.size());
  if (pos == dim - 1) {
    coords.push_back(static_cast<double>(remaining) / mesh);
    out.push_back(Belief{coords, false});
    coords.pop_back();
    return;
  }
  for (int units = 0; units <= remaining; ++units) {
    coords.push_back(static_cast<double>(units) / mesh);
    grid_rec(dim, mesh, remaining - units, coords, out);
    coords.pop_back();
  }
}

}  // namespace

std::vector<Belief> simplex_grid(int dim, int mesh) {
  std::vector<Belief> out;
  std::vector<double> coords;
  grid_rec(dim, mesh, mesh, coords, out);
  return out;
}

}  // namespace smg
