#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "smg/value.hpp"

namespace smg {

struct ProtocolMisuse : std::logic_error {
  using std::logic_error::logic_error;
};

// Shared memo of stage saddles keyed by (state, quantized belief). A zero
// quantum means exact keys. Sharing one cache across episode engines makes
// Monte Carlo runs cheap since belief trajectories revisit the same nodes.
struct StagePolicyCache {
  double quantum = 0.0;
  std::map<std::pair<int, std::vector<long long>>,
           std::pair<StageMixP1, double>>
      table;

  std::vector<long long> key(const std::vector<double>& p) const;
};

struct P1TraceRecord {
  int n = 0;
  int i = 0;
  std::vector<double> q;
  std::vector<std::vector<double>> mu;
  int chosen_a = -1;
};

// The informed player's policy: at each epoch, the stage saddle at the
// current belief gives the per-type mix, and the observed own action drives
// the Bayes update. Strict decide/observe alternation.
class P1Engine {
 public:
  P1Engine(const GameSpec& spec, const DiscountedAggregates& agg,
           const CutEnvelope& env, const Belief& p0,
           std::shared_ptr<StagePolicyCache> cache = nullptr);

  StageMixP1 decide(int i);
  Belief observe(int i, int a);

  const Belief& belief() const { return q_; }
  int epoch() const { return n_; }
  double last_value() const { return last_value_; }

  void enable_trace() { tracing_ = true; }
  const std::vector<P1TraceRecord>& trace() const { return trace_; }

 private:
  const GameSpec& spec_;
  const DiscountedAggregates& agg_;
  const CutEnvelope& env_;
  std::shared_ptr<StagePolicyCache> cache_;
  Belief q_;
  StageMixP1 mu_;
  double last_value_ = 0.0;
  int n_ = 0;
  int decided_state_ = -1;
  bool awaiting_observe_ = false;
  bool tracing_ = false;
  std::vector<P1TraceRecord> trace_;
};

}  // namespace smg
