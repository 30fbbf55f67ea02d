#include "smg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "smg/lp.hpp"

namespace smg {

namespace {

double eval_rec(const std::vector<int>& h, int i, const std::vector<double>& p,
                int m, const P1Policy& pi, const P2Policy& sigma,
                const DiscountedAggregates& agg, const GameSpec& spec) {
  if (m < 0) return 0.0;
  const int K = spec.num_types();
  const int A = spec.num_a1();
  const int B = spec.num_a2();
  const int S = spec.num_states();
  std::vector<std::vector<double>> mu(K);
  for (int k = 0; k < K; ++k) mu[k] = pi.act(k, h);
  const std::vector<double> nu = sigma.act(h);

  double total = 0.0;
  for (int a = 0; a < A; ++a) {
    double x = 0.0;
    for (int k = 0; k < K; ++k) x += p[k] * mu[k][a];
    if (x <= 0.0) continue;
    std::vector<double> post(K);
    for (int k = 0; k < K; ++k) post[k] = p[k] * mu[k][a] / x;
    for (int b = 0; b < B; ++b) {
      if (nu[b] <= 0.0) continue;
      double stage = 0.0;
      for (int k = 0; k < K; ++k)
        stage += p[k] * mu[k][a] * spec.cost_at(k, i, a, b);
      stage *= agg.m_at(spec, i, a, b);
      double cont = 0.0;
      for (int j = 0; j < S; ++j) {
        const double q = agg.qhat_at(spec, i, a, b, j);
        if (q <= 0.0) continue;
        std::vector<int> h2 = h;
        h2.push_back(a);
        h2.push_back(b);
        h2.push_back(j);
        cont += q * eval_rec(h2, j, post, m - 1, pi, sigma, agg, spec);
      }
      total += nu[b] * (stage + x * cont);
    }
  }
  return total;
}

}  // namespace

double eval_finite_horizon(const Belief& p, int i, const P1Policy& pi,
                           const P2Policy& sigma, int n,
                           const DiscountedAggregates& agg,
                           const GameSpec& spec) {
  if (pi.depth < n || sigma.depth < n)
    throw DepthExceeded("policy tables shallower than requested horizon");
  return eval_rec({i}, i, p.p, n, pi, sigma, agg, spec);
}

double brute_value(const Belief& p, int i, int n, const GameSpec& spec,
                   const DiscountedAggregates& agg, const BruteLimits& limits) {
  const int K = spec.num_types();
  const int A = spec.num_a1();
  const int B = spec.num_a2();
  const int S = spec.num_states();

  // Histories where a decision is made, epochs 0..n, indexed for policy
  // decoding.
  std::map<std::vector<int>, int> hist_id;
  std::vector<std::vector<int>> frontier = {{i}};
  hist_id[{i}] = 0;
  for (int m = 0; m < n; ++m) {
    std::vector<std::vector<int>> next;
    for (const auto& h : frontier)
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b)
          for (int j = 0; j < S; ++j) {
            std::vector<int> h2 = h;
            h2.push_back(a);
            h2.push_back(b);
            h2.push_back(j);
            const int id = static_cast<int>(hist_id.size());
            hist_id[h2] = id;
            next.push_back(std::move(h2));
          }
    frontier = std::move(next);
  }
  const int H = static_cast<int>(hist_id.size());

  const double n1 = std::pow(static_cast<double>(A), K * H);
  const double n2 = std::pow(static_cast<double>(B), H);
  if (n1 * n2 > static_cast<double>(limits.max_matrix_entries))
    throw EnumerationTooLarge(
        "deterministic policy enumeration needs " + std::to_string(n1) + " x " +
        std::to_string(n2) + " matrix entries, above the limit of " +
        std::to_string(limits.max_matrix_entries));
  const long long num_p1 = static_cast<long long>(n1);
  const long long num_p2 = static_cast<long long>(n2);

  auto p1_digit = [&](long long code, int slot) {
    for (int s = 0; s < slot; ++s) code /= A;
    return static_cast<int>(code % A);
  };
  auto p2_digit = [&](long long code, int slot) {
    for (int s = 0; s < slot; ++s) code /= B;
    return static_cast<int>(code % B);
  };

  std::vector<std::vector<double>> R(num_p1, std::vector<double>(num_p2));
  for (long long f = 0; f < num_p1; ++f) {
    P1Policy pi;
    pi.depth = n;
    pi.act = [&, f](int k, const std::vector<int>& h) {
      std::vector<double> row(A, 0.0);
      row[p1_digit(f, k * H + hist_id.at(h))] = 1.0;
      return row;
    };
    for (long long g = 0; g < num_p2; ++g) {
      P2Policy sigma;
      sigma.depth = n;
      sigma.act = [&, g](const std::vector<int>& h) {
        std::vector<double> row(B, 0.0);
        row[p2_digit(g, hist_id.at(h))] = 1.0;
        return row;
      };
      R[f][g] = eval_finite_horizon(p, i, pi, sigma, n, agg, spec);
    }
  }
  return solve_matrix_game(R).value;
}

BrBracket best_response_p1(const P2Responder& sigma, const Belief& p, int i,
                           int N, const GameSpec& spec,
                           const DiscountedAggregates& agg,
                           const Assumption1Certificate& cert,
                           const BrBudget& budget) {
  const int A = spec.num_a1();
  const int B = spec.num_a2();
  const int S = spec.num_states();
  if (std::pow(static_cast<double>(A) * B * S, N) > budget.max_nodes)
    throw BudgetExceeded("best-response tree exceeds the node budget");

  // Player 2's rule depends on history only through (i, zeta), so each
  // type's maximization is a DP over (depth, state, dual vector).
  std::map<std::pair<int, std::vector<double>>,
           std::pair<std::vector<double>, std::vector<std::vector<double>>>>
      rule_cache;
  auto rule = [&](int st, const std::vector<double>& zeta) -> const auto& {
    auto key = std::make_pair(st, zeta);
    auto it = rule_cache.find(key);
    if (it == rule_cache.end())
      it = rule_cache.emplace(key, sigma.decide(st, zeta)).first;
    return it->second;
  };

  const double cstar = spec.max_cost();
  double value_lo = 0.0;
  for (int k = 0; k < spec.num_types(); ++k) {
    if (p.p[k] <= 0.0) continue;
    std::map<std::tuple<int, int, std::vector<double>>, double> memo;
    std::function<double(int, const std::vector<double>&, int)> br =
        [&](int st, const std::vector<double>& zeta, int d) -> double {
      if (d > N) return 0.0;
      auto key = std::make_tuple(d, st, zeta);
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      const auto& [nu, w] = rule(st, zeta);
      double best = -kInf;
      for (int a = 0; a < A; ++a) {
        double v = 0.0;
        for (int b = 0; b < B; ++b) {
          if (nu[b] <= 0.0) continue;
          double term =
              spec.cost_at(k, st, a, b) * agg.m_at(spec, st, a, b);
          for (int j = 0; j < S; ++j) {
            const double q = agg.qhat_at(spec, st, a, b, j);
            if (q > 0.0) term += q * br(j, w[j], d + 1);
          }
          v += nu[b] * term;
        }
        best = std::max(best, v);
      }
      memo.emplace(std::move(key), best);
      return best;
    };
    value_lo += p.p[k] * br(i, sigma.zeta0, 0);
  }
  BrBracket out;
  out.value_lo = value_lo;
  out.value_hi = value_lo + error_budget(N, cert, cstar, spec.alpha);
  return out;
}

BrBracket best_response_p2(const P1Responder& pi, const Belief& p, int i,
                           int N, const GameSpec& spec,
                           const DiscountedAggregates& agg,
                           const Assumption1Certificate& cert,
                           const BrBudget& budget) {
  const int K = spec.num_types();
  const int A = spec.num_a1();
  const int B = spec.num_a2();
  const int S = spec.num_states();
  if (std::pow(static_cast<double>(A) * B * S, N) > budget.max_nodes)
    throw BudgetExceeded("best-response tree exceeds the node budget");

  // Unnormalized type weights w_k = p_k prod_m mu^(k)(a_m); the returned
  // value is linear in the weights, so no posterior normalization is ever
  // needed on zero-mass branches.
  std::function<double(int, const std::vector<double>&, int)> br =
      [&](int st, const std::vector<double>& w, int d) -> double {
    if (d > N) return 0.0;
    double mass = 0.0;
    for (double x : w) mass += x;
    if (mass <= 0.0) return 0.0;
    Belief q;
    q.p.resize(K);
    for (int k = 0; k < K; ++k) q.p[k] = w[k] / mass;
    const StageMixP1 mu = pi.decide(q, st);

    std::vector<std::vector<double>> cont(A, std::vector<double>(S, 0.0));
    for (int a = 0; a < A; ++a) {
      std::vector<double> w2(K);
      for (int k = 0; k < K; ++k) w2[k] = w[k] * mu.mu[k][a];
      bool need = false;
      for (int b = 0; b < B && !need; ++b)
        for (int j = 0; j < S && !need; ++j)
          if (agg.qhat_at(spec, st, a, b, j) > 0.0) need = true;
      if (!need) continue;
      for (int j = 0; j < S; ++j) cont[a][j] = br(j, w2, d + 1);
    }
    double best = kInf;
    for (int b = 0; b < B; ++b) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        double stage = 0.0;
        for (int k = 0; k < K; ++k)
          stage += w[k] * mu.mu[k][a] * spec.cost_at(k, st, a, b);
        v += stage * agg.m_at(spec, st, a, b);
        for (int j = 0; j < S; ++j)
          v += agg.qhat_at(spec, st, a, b, j) * cont[a][j];
      }
      best = std::min(best, v);
    }
    return best;
  };

  BrBracket out;
  out.value_lo = br(i, p.p, 0);
  out.value_hi =
      out.value_lo + error_budget(N, cert, spec.max_cost(), spec.alpha);
  return out;
}

SingleTypeSolution single_type_solve(const GameSpec& spec,
                                     const DiscountedAggregates& agg, int k,
                                     double tol, int max_iter) {
  const int S = spec.num_states();
  const int A = spec.num_a1();
  const int B = spec.num_a2();
  SingleTypeSolution out;
  out.value.assign(S, 0.0);
  out.p1_mix.assign(S, {});
  out.p2_mix.assign(S, {});
  for (int n = 0; n < max_iter; ++n) {
    std::vector<double> next(S);
    double change = 0.0;
    for (int i = 0; i < S; ++i) {
      std::vector<std::vector<double>> M(A, std::vector<double>(B));
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b) {
          double v = spec.cost_at(k, i, a, b) * agg.m_at(spec, i, a, b);
          for (int j = 0; j < S; ++j)
            v += agg.qhat_at(spec, i, a, b, j) * out.value[j];
          M[a][b] = v;
        }
      MatrixGameSolution g = solve_matrix_game(M);
      next[i] = g.value;
      out.p1_mix[i] = g.row_mix;
      out.p2_mix[i] = g.col_mix;
      change = std::max(change, std::abs(next[i] - out.value[i]));
    }
    out.value = next;
    out.iterations = n + 1;
    if (change <= tol) return out;
  }
  throw IterationBudgetExceeded("single-type iteration hit the cap");
}

std::vector<double> single_type_finite(const GameSpec& spec,
                                       const DiscountedAggregates& agg, int k,
                                       int n) {
  const int S = spec.num_states();
  const int A = spec.num_a1();
  const int B = spec.num_a2();
  std::vector<double> v(S, 0.0);
  for (int m = 0; m <= n; ++m) {
    std::vector<double> next(S);
    for (int i = 0; i < S; ++i) {
      std::vector<std::vector<double>> M(A, std::vector<double>(B));
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b) {
          double val = spec.cost_at(k, i, a, b) * agg.m_at(spec, i, a, b);
          for (int j = 0; j < S; ++j)
            val += agg.qhat_at(spec, i, a, b, j) * v[j];
          M[a][b] = val;
        }
      next[i] = solve_matrix_game(M).value;
    }
    v = next;
  }
  return v;
}

}  // namespace smg
