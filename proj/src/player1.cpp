#include "smg/player1.hpp"

#include <cmath>

namespace smg {

std::vector<long long> StagePolicyCache::key(
    const std::vector<double>& p) const {
  std::vector<long long> out(p.size());
  const double q = quantum > 0.0 ? quantum : 1e-15;
  for (std::size_t k = 0; k < p.size(); ++k)
    out[k] = static_cast<long long>(std::llround(p[k] / q));
  return out;
}

P1Engine::P1Engine(const GameSpec& spec, const DiscountedAggregates& agg,
                   const CutEnvelope& env, const Belief& p0,
                   std::shared_ptr<StagePolicyCache> cache)
    : spec_(spec), agg_(agg), env_(env), cache_(std::move(cache)), q_(p0) {}

StageMixP1 P1Engine::decide(int i) {
  if (awaiting_observe_)
    throw ProtocolMisuse("decide called twice without observe");
  if (cache_) {
    auto key = std::make_pair(i, cache_->key(q_.p));
    auto it = cache_->table.find(key);
    if (it != cache_->table.end()) {
      mu_ = it->second.first;
      last_value_ = it->second.second;
    } else {
      StageSaddle s = stage_backup(q_, i, env_, agg_, spec_);
      mu_ = s.mu_star;
      last_value_ = s.value;
      cache_->table.emplace(std::move(key),
                            std::make_pair(mu_, last_value_));
    }
  } else {
    StageSaddle s = stage_backup(q_, i, env_, agg_, spec_);
    mu_ = s.mu_star;
    last_value_ = s.value;
  }
  decided_state_ = i;
  awaiting_observe_ = true;
  if (tracing_) trace_.push_back({n_, i, q_.p, mu_.mu, -1});
  return mu_;
}

Belief P1Engine::observe(int i, int a) {
  if (!awaiting_observe_)
    throw ProtocolMisuse("observe called without a matching decide");
  if (i != decided_state_)
    throw ProtocolMisuse("observe state differs from the decided state");
  q_ = posterior_update(q_, mu_, a);
  awaiting_observe_ = false;
  if (tracing_ && !trace_.empty()) trace_.back().chosen_a = a;
  ++n_;
  return q_;
}

}  // namespace smg
