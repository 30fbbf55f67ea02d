#include "smg/dual.hpp"

#include <cmath>
#include <sstream>

namespace smg {

namespace {

std::vector<long long> quantize(const std::vector<double>& z, double quantum) {
  std::vector<long long> out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k)
    out[k] = static_cast<long long>(std::llround(z[k] / quantum));
  return out;
}

}  // namespace

DualValueOracle::DualValueOracle(const GameSpec& spec, const CutEnvelope& env)
    : spec_(spec), env_(env) {}

double DualValueOracle::conjugate_eval(const std::vector<double>& z, int i) {
  auto key = std::make_pair(i, quantize(z, 1e-9));
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  // max_p min_g <g - z/alpha, p>: a matrix game with p as the row mix.
  const int K = spec_.num_types();
  std::vector<std::vector<double>> M(K);
  for (int k = 0; k < K; ++k) {
    M[k].reserve(env_.cuts[i].size());
    for (const auto& g : env_.cuts[i])
      M[k].push_back(g[k] - z[k] / spec_.alpha);
  }
  const double val = solve_matrix_game(M).value;
  memo_.emplace(std::move(key), val);
  return val;
}

RecoveredValue recover_value(DualValueOracle& oracle, const Belief& p, int i,
                             const DualSearchConfig& cfg) {
  const GameSpec& spec = oracle.spec();
  const int K = spec.num_types();
  const double cstar = spec.max_cost();
  auto objective = [&](const std::vector<double>& z) {
    double v = oracle.conjugate_eval(z, i);
    for (int k = 0; k < K; ++k) v += p.p[k] * z[k] / spec.alpha;
    return v;
  };

  RecoveredValue best;
  best.z.assign(K, 0.0);
  best.value = objective(best.z);
  if (cstar <= 0.0) return best;

  const int G = std::max(2, cfg.recover_grid);
  std::vector<int> idx(K, 0);
  std::vector<double> z(K, 0.0);
  while (true) {
    for (int k = 0; k < K; ++k) z[k] = cstar * idx[k] / (G - 1);
    const double v = objective(z);
    if (v < best.value - 1e-15) {
      best.value = v;
      best.z = z;
    }
    int k = K - 1;
    while (k >= 0 && ++idx[k] == G) idx[k--] = 0;
    if (k < 0) break;
  }

  double step = cstar / (G - 1);
  while (step > cfg.recover_step) {
    bool improved = false;
    for (int k = 0; k < K; ++k)
      for (double dir : {-1.0, 1.0}) {
        std::vector<double> cand = best.z;
        cand[k] = std::min(cstar, std::max(0.0, cand[k] + dir * step));
        const double v = objective(cand);
        if (v < best.value - 1e-15) {
          best.value = v;
          best.z = cand;
          improved = true;
        }
      }
    if (!improved) step /= 2.0;
  }
  return best;
}

std::vector<std::vector<double>> gamma_matrix(int i,
                                              const std::vector<double>& z,
                                              const WField& w,
                                              DualValueOracle& oracle,
                                              const DiscountedAggregates& agg,
                                              const GameSpec& spec) {
  const int K = spec.num_types();
  const int A = spec.num_a1();
  const int B = spec.num_a2();
  const int S = spec.num_states();
  std::vector<double> ustar(S);
  for (int j = 0; j < S; ++j) ustar[j] = oracle.conjugate_eval(w[j], j);
  std::vector<std::vector<double>> M(K * A, std::vector<double>(B, 0.0));
  for (int k = 0; k < K; ++k)
    for (int a = 0; a < A; ++a)
      for (int b = 0; b < B; ++b) {
        double v = spec.cost_at(k, i, a, b) * agg.m_at(spec, i, a, b) -
                   z[k] / spec.alpha;
        for (int j = 0; j < S; ++j)
          v += agg.qhat_at(spec, i, a, b, j) *
               (ustar[j] + w[j][k] / spec.alpha);
        M[k * A + a][b] = v;
      }
  return M;
}

DualStageSolution dual_stage_solve(int i, const std::vector<double>& z,
                                   DualValueOracle& oracle,
                                   const DiscountedAggregates& agg,
                                   const GameSpec& spec,
                                   const DualSearchConfig& cfg) {
  const int K = spec.num_types();
  const int S = spec.num_states();
  const int D = K * S;
  const double cstar = spec.max_cost();

  long evals = 0;
  auto evaluate = [&](const WField& w) {
    if (++evals > cfg.max_evals)
      throw SearchBudgetExceeded("dual stage w-search exceeded max_evals");
    return solve_matrix_game(gamma_matrix(i, z, w, oracle, agg, spec));
  };

  DualStageSolution best;
  best.w.assign(S, std::vector<double>(K, 0.0));
  {
    MatrixGameSolution g = evaluate(best.w);
    best.val = g.value;
    best.nu.nu = g.col_mix;
  }
  if (cstar <= 0.0) {
    best.tol = 0.0;
    return best;
  }

  const int G = std::max(2, cfg.w_grid);
  double grid_points = 1.0;
  for (int d = 0; d < D; ++d) grid_points *= G;
  if (grid_points > static_cast<double>(cfg.max_evals))
    throw SearchBudgetExceeded("dual stage w-grid larger than max_evals");

  std::vector<int> idx(D, 0);
  WField w(S, std::vector<double>(K, 0.0));
  while (true) {
    for (int d = 0; d < D; ++d) w[d / K][d % K] = cstar * idx[d] / (G - 1);
    MatrixGameSolution g = evaluate(w);
    if (g.value < best.val - 1e-15) {
      best.val = g.value;
      best.nu.nu = g.col_mix;
      best.w = w;
    }
    int d = D - 1;
    while (d >= 0 && ++idx[d] == G) idx[d--] = 0;
    if (d < 0) break;
  }
  for (const auto& seed : cfg.warm_w) {
    MatrixGameSolution g = evaluate(seed);
    if (g.value < best.val - 1e-15) {
      best.val = g.value;
      best.nu.nu = g.col_mix;
      best.w = seed;
    }
  }

  const double step_min = cstar * cfg.w_step_frac;
  double step = cstar / (G - 1);
  while (step > step_min) {
    bool improved = false;
    for (int d = 0; d < D; ++d)
      for (double dir : {-1.0, 1.0}) {
        WField cand = best.w;
        double& x = cand[d / K][d % K];
        x = std::min(cstar, std::max(0.0, x + dir * step));
        MatrixGameSolution g = evaluate(cand);
        if (g.value < best.val - 1e-15) {
          best.val = g.value;
          best.nu.nu = g.col_mix;
          best.w = cand;
          improved = true;
        }
      }
    if (!improved) step /= 2.0;
  }
  best.tol = D * step_min / spec.alpha;
  return best;
}

std::vector<double> p2_init(DualValueOracle& oracle, const Belief& p, int i0,
                            const DualSearchConfig& cfg) {
  return recover_value(oracle, p, i0, cfg).z;
}

std::vector<long long> DualDecisionCache::key(
    const std::vector<double>& z) const {
  return quantize(z, quantum);
}

P2Engine::P2Engine(const GameSpec& spec, const DiscountedAggregates& agg,
                   DualValueOracle& oracle, std::vector<double> zeta0,
                   std::shared_ptr<DualDecisionCache> cache,
                   DualSearchConfig cfg)
    : spec_(spec),
      agg_(agg),
      oracle_(oracle),
      cache_(std::move(cache)),
      cfg_(std::move(cfg)),
      zeta_(std::move(zeta0)) {}

StageMixP2 P2Engine::decide(int i) {
  if (awaiting_observe_)
    throw ProtocolMisuse("decide called twice without observe");
  if (cache_) {
    auto key = std::make_pair(i, cache_->key(zeta_));
    auto it = cache_->table.find(key);
    if (it != cache_->table.end()) {
      last_ = it->second;
    } else {
      last_ = dual_stage_solve(i, zeta_, oracle_, agg_, spec_, cfg_);
      cache_->table.emplace(std::move(key), last_);
    }
  } else {
    last_ = dual_stage_solve(i, zeta_, oracle_, agg_, spec_, cfg_);
  }
  awaiting_observe_ = true;
  if (tracing_)
    trace_.push_back({n_, i, zeta_, last_.nu.nu, last_.val, last_.w});
  return last_.nu;
}

std::vector<double> P2Engine::observe(int j) {
  if (!awaiting_observe_)
    throw ProtocolMisuse("observe called without a matching decide");
  zeta_ = last_.w[j];
  awaiting_observe_ = false;
  ++n_;
  return zeta_;
}

std::string conjugate_csv(DualValueOracle& oracle, int points_per_axis) {
  const GameSpec& spec = oracle.spec();
  const int K = spec.num_types();
  const double cstar = spec.max_cost();
  const int G = std::max(2, points_per_axis);
  std::ostringstream out;
  out.precision(12);
  out << "z,state,value\n";
  std::vector<int> idx(K, 0);
  std::vector<double> z(K, 0.0);
  while (true) {
    for (int k = 0; k < K; ++k) z[k] = cstar * idx[k] / (G - 1);
    for (int i = 0; i < spec.num_states(); ++i) {
      for (int k = 0; k < K; ++k) out << (k ? ";" : "") << z[k];
      out << "," << spec.states[i] << "," << oracle.conjugate_eval(z, i)
          << "\n";
    }
    int k = K - 1;
    while (k >= 0 && ++idx[k] == G) idx[k--] = 0;
    if (k < 0) break;
  }
  return out.str();
}

}  // namespace smg
