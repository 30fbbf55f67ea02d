#include "smg/sim.hpp"

#include <cmath>

namespace smg {

namespace {

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

int sample_categorical(const std::vector<double>& weights, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    acc += weights[n];
    if (u < acc) return static_cast<int>(n);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

double sample_sojourn(const SojournLaw& law, Rng& rng) {
  struct Visitor {
    Rng& rng;
    double operator()(const Exponential& e) const {
      return -std::log(1.0 - uniform01(rng)) / e.rate;
    }
    double operator()(const Deterministic& d) const { return d.delay; }
    double operator()(const Uniform& u) const {
      return u.lo + uniform01(rng) * (u.hi - u.lo);
    }
    double operator()(const Discrete& d) const {
      const double u = uniform01(rng);
      double acc = 0.0;
      for (const auto& a : d.atoms) {
        acc += a.weight;
        if (u < acc) return a.t;
      }
      return d.atoms.back().t;
    }
  };
  return std::visit(Visitor{rng}, law);
}

TrajectoryRecord simulate_episode(const GameSpec& spec,
                                  const DiscountedAggregates& agg, SimP1& p1,
                                  SimP2& p2, const std::vector<double>& p0,
                                  int i0, Rng& rng, const Truncation& trunc,
                                  int forced_type) {
  (void)agg;
  const double alpha = spec.alpha;
  const double cstar = spec.max_cost();
  TrajectoryRecord rec;
  rec.type = forced_type >= 0 ? forced_type : sample_categorical(p0, rng);
  int i = i0;
  double T = 0.0;
  rec.times.push_back(0.0);
  rec.states.push_back(i);
  for (int m = 0; m < trunc.epoch_cap; ++m) {
    const double residual = std::exp(-alpha * T) * cstar / alpha;
    if (residual < trunc.residual) {
      rec.truncation_epoch = m;
      rec.residual_bound = residual;
      return rec;
    }
    const StageMixP1 mu = p1.decide(i);
    const StageMixP2 nu = p2.decide(i);
    const int a = sample_categorical(mu.mu[rec.type], rng);
    const int b = sample_categorical(nu.nu, rng);
    p1.observe(i, a);

    const auto& branches = spec.transitions[spec.iab_index(i, a, b)];
    std::vector<double> probs(branches.size());
    for (std::size_t n = 0; n < branches.size(); ++n) probs[n] = branches[n].prob;
    const int br = sample_categorical(probs, rng);
    const int j = branches[br].to;
    const double tau = sample_sojourn(branches[br].law, rng);
    p2.observe(j);

    const double T2 = T + tau;
    rec.payoff += spec.cost_at(rec.type, i, a, b) *
                  (std::exp(-alpha * T) - std::exp(-alpha * T2)) / alpha;
    rec.actions_p1.push_back(a);
    rec.actions_p2.push_back(b);
    rec.times.push_back(T2);
    rec.states.push_back(j);
    T = T2;
    i = j;
    rec.truncation_epoch = m + 1;
  }
  rec.residual_bound = std::exp(-alpha * T) * cstar / alpha;
  return rec;
}

MonteCarloResult monte_carlo_value(const GameSpec& spec,
                                   const DiscountedAggregates& agg,
                                   const SimP1Factory& p1f,
                                   const SimP2Factory& p2f,
                                   const std::vector<double>& p0, int i0,
                                   long episodes, std::uint64_t seed,
                                   const Truncation& trunc, int forced_type) {
  MonteCarloResult out;
  double sum = 0.0, sum_sq = 0.0;
  for (long e = 0; e < episodes; ++e) {
    std::seed_seq sseq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(e & 0x7fffffff),
                       static_cast<std::uint32_t>(e >> 31)};
    Rng rng(sseq);
    SimP1 p1 = p1f();
    SimP2 p2 = p2f();
    TrajectoryRecord rec = simulate_episode(spec, agg, p1, p2, p0, i0, rng,
                                            trunc, forced_type);
    sum += rec.payoff;
    sum_sq += rec.payoff * rec.payoff;
    out.max_residual = std::max(out.max_residual, rec.residual_bound);
  }
  out.episodes = episodes;
  out.mean = sum / episodes;
  const double var =
      std::max(0.0, (sum_sq - sum * sum / episodes) / (episodes - 1));
  out.stderr_ = std::sqrt(var / episodes);
  return out;
}

}  // namespace smg
