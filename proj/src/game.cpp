#include "smg/game.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace smg {

double GameSpec::max_cost() const {
  double m = 0.0;
  for (double c : cost) m = std::max(m, c);
  return m;
}

double GameSpec::sojourn_cdf(int i, int a, int b, double t) const {
  const auto& branches = transitions[iab_index(i, a, b)];
  double d = 0.0;
  for (const auto& br : branches) d += br.prob * cdf_point(br.law, t);
  return d;
}

void GameSpec::renormalize() {
  for (auto& branches : transitions) {
    double total = 0.0;
    for (const auto& br : branches) total += br.prob;
    if (total > 0.0)
      for (auto& br : branches) br.prob /= total;
  }
  double total = 0.0;
  for (double p : initial_belief) total += p;
  if (total > 0.0)
    for (double& p : initial_belief) p /= total;
}

namespace {

std::string triple_name(const GameSpec& s, int i, int a, int b) {
  return "(" + s.states[i] + "," + s.actions_p1[a] + "," + s.actions_p2[b] + ")";
}

}  // namespace

std::vector<std::string> validate_spec(const GameSpec& spec) {
  std::vector<std::string> v;
  if (spec.types.empty()) v.push_back("types: must be nonempty");
  if (spec.states.empty()) v.push_back("states: must be nonempty");
  if (spec.actions_p1.empty()) v.push_back("actions_p1: must be nonempty");
  if (spec.actions_p2.empty()) v.push_back("actions_p2: must be nonempty");
  if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha))
    v.push_back("alpha: must be positive and finite");
  if (!v.empty()) return v;  // size errors make the index checks meaningless

  if (static_cast<int>(spec.initial_belief.size()) != spec.num_types()) {
    v.push_back("initial_belief: length must match types");
  } else {
    double sum = 0.0;
    for (int k = 0; k < spec.num_types(); ++k) {
      double p = spec.initial_belief[k];
      if (!(p >= 0.0) || !std::isfinite(p))
        v.push_back("initial_belief[" + spec.types[k] + "]: must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      v.push_back("initial_belief: must sum to 1 within 1e-12");
  }

  const std::size_t want_cost = static_cast<std::size_t>(spec.num_types()) *
                                spec.num_states() * spec.num_a1() * spec.num_a2();
  if (spec.cost.size() != want_cost) {
    v.push_back("cost: wrong number of entries");
  } else {
    for (int k = 0; k < spec.num_types(); ++k)
      for (int i = 0; i < spec.num_states(); ++i)
        for (int a = 0; a < spec.num_a1(); ++a)
          for (int b = 0; b < spec.num_a2(); ++b) {
            double c = spec.cost_at(k, i, a, b);
            if (!(c >= 0.0) || !std::isfinite(c))
              v.push_back("cost[" + spec.types[k] + "," +
                          triple_name(spec, i, a, b) +
                          "]: must be nonnegative and finite");
          }
  }

  const std::size_t want_trans = static_cast<std::size_t>(spec.num_states()) *
                                 spec.num_a1() * spec.num_a2();
  if (spec.transitions.size() != want_trans) {
    v.push_back("transitions: must cover every (state, a1, a2) triple");
    return v;
  }
  for (int i = 0; i < spec.num_states(); ++i)
    for (int a = 0; a < spec.num_a1(); ++a)
      for (int b = 0; b < spec.num_a2(); ++b) {
        const auto& branches = spec.transitions[spec.iab_index(i, a, b)];
        const std::string where = "transitions" + triple_name(spec, i, a, b);
        if (branches.empty()) {
          v.push_back(where + ": needs at least one branch");
          continue;
        }
        double total = 0.0;
        for (std::size_t n = 0; n < branches.size(); ++n) {
          const auto& br = branches[n];
          const std::string path = where + ".branches[" + std::to_string(n) + "]";
          if (br.to < 0 || br.to >= spec.num_states())
            v.push_back(path + ": target state out of range");
          if (!(br.prob >= 0.0) || !std::isfinite(br.prob))
            v.push_back(path + ": branch probability must be nonnegative");
          total += br.prob;
          validate_law(br.law, path + ".sojourn", &v);
        }
        if (std::abs(total - 1.0) > 1e-12)
          v.push_back(where + ": branch probabilities must sum to 1 within 1e-12");
      }
  return v;
}

DiscountedAggregates discounted_aggregates(const GameSpec& spec) {
  DiscountedAggregates agg;
  const int n_iab = spec.num_states() * spec.num_a1() * spec.num_a2();
  agg.qhat.assign(n_iab, std::vector<double>(spec.num_states(), 0.0));
  agg.m.assign(n_iab, 0.0);
  for (int iab = 0; iab < n_iab; ++iab) {
    double total = 0.0;
    for (const auto& br : spec.transitions[iab]) {
      double q = br.prob * laplace_point(br.law, spec.alpha);
      agg.qhat[iab][br.to] += q;
      total += q;
    }
    agg.m[iab] = (1.0 - total) / spec.alpha;
    agg.beta_bound = std::max(agg.beta_bound, total);
  }
  return agg;
}

std::vector<double> default_delta_candidates(const GameSpec& spec) {
  std::vector<double> out;
  const int n = 60;
  const double lo = std::log(1e-3), hi = std::log(10.0);
  for (int i = 0; i < n; ++i)
    out.push_back(std::exp(lo + (hi - lo) * i / (n - 1)));
  for (const auto& branches : spec.transitions)
    for (const auto& br : branches) {
      if (const auto* d = std::get_if<Deterministic>(&br.law)) {
        if (d->delay > 0.0) out.push_back(d->delay / 2.0);
      } else if (const auto* disc = std::get_if<Discrete>(&br.law)) {
        for (const auto& atom : disc->atoms)
          if (atom.t > 0.0) out.push_back(atom.t / 2.0);
      }
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Assumption1Certificate certify_assumption1(
    const GameSpec& spec, const std::vector<double>& delta_candidates) {
  if (delta_candidates.empty())
    throw CertificationFailed("empty candidate list");
  Assumption1Certificate best;
  bool found = false;
  for (double delta : delta_candidates) {
    double worst_d = -1.0;
    int wi = 0, wa = 0, wb = 0;
    for (int i = 0; i < spec.num_states(); ++i)
      for (int a = 0; a < spec.num_a1(); ++a)
        for (int b = 0; b < spec.num_a2(); ++b) {
          double d = spec.sojourn_cdf(i, a, b, delta);
          if (d > worst_d) {
            worst_d = d;
            wi = i; wa = a; wb = b;
          }
        }
    double eps = 1.0 - worst_d;
    if (eps <= 0.0) continue;
    double beta = 1.0 - eps * (1.0 - std::exp(-spec.alpha * delta));
    if (!found || beta < best.beta) {
      found = true;
      best.delta = delta;
      best.epsilon = eps;
      best.beta = beta;
      best.worst_i = wi; best.worst_a = wa; best.worst_b = wb;
    }
  }
  if (!found)
    throw CertificationFailed(
        "no candidate delta admits epsilon > 0; the game allows "
        "instantaneous transitions everywhere");
  return best;
}

}  // namespace smg
