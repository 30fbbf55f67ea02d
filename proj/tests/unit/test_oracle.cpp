#include <doctest.h>

#include <cmath>
#include <random>

#include "smg/game_io.hpp"
#include "smg/oracle.hpp"

using namespace smg;

namespace {

GameSpec fixture(const char* name) {
  GameSpec s = load_game_spec(std::string(FIXTURE_DIR) + name);
  s.renormalize();
  return s;
}

GameSpec tiny_spec(double cost_value) {
  GameSpec s;
  s.types = {"k0", "k1"};
  s.states = {"s0"};
  s.actions_p1 = {"a0", "a1"};
  s.actions_p2 = {"b0", "b1"};
  s.alpha = 1.0;
  s.initial_belief = {0.5, 0.5};
  s.cost.assign(2 * 1 * 2 * 2, cost_value);
  s.transitions.assign(1 * 2 * 2, {Branch{0, 1.0, Exponential{1.0}}});
  return s;
}

P1Policy uniform_p1(int depth, int A) {
  P1Policy pi;
  pi.depth = depth;
  pi.act = [A](int, const std::vector<int>&) {
    return std::vector<double>(A, 1.0 / A);
  };
  return pi;
}

P2Policy uniform_p2(int depth, int B) {
  P2Policy sigma;
  sigma.depth = depth;
  sigma.act = [B](const std::vector<int>&) {
    return std::vector<double>(B, 1.0 / B);
  };
  return sigma;
}

}  // namespace

TEST_CASE("one-stage evaluation of fixed mixes") {
  GameSpec s = tiny_spec(0.5);
  DiscountedAggregates agg = discounted_aggregates(s);
  const Belief p{{0.5, 0.5}, false};
  double v = eval_finite_horizon(p, 0, uniform_p1(0, 2), uniform_p2(0, 2), 0,
                                 agg, s);
  CHECK(v == doctest::Approx(0.5 * 0.5).epsilon(1e-12));
}

TEST_CASE("two-stage evaluation expands to the weighted stage averages") {
  GameSpec s = tiny_spec(0.5);
  // Distinct costs; uniform play makes the horizon-n value
  // avg(c) * sum_{m<=n} (1/2)^m * (1/2) with avg over (k,a,b) at p = 1/2.
  double avg = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        s.cost_at(k, 0, a, b) = 0.1 * (4 * k + 2 * a + b);
        avg += 0.5 * 0.25 * s.cost_at(k, 0, a, b);
      }
  DiscountedAggregates agg = discounted_aggregates(s);
  const Belief p{{0.5, 0.5}, false};
  for (int n : {0, 1, 2}) {
    double want = 0.0;
    for (int m = 0; m <= n; ++m) want += avg * std::pow(0.5, m) * 0.5;
    CHECK(eval_finite_horizon(p, 0, uniform_p1(n, 2), uniform_p2(n, 2), n, agg,
                              s) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS_AS(eval_finite_horizon(p, 0, uniform_p1(0, 2), uniform_p2(0, 2),
                                      1, agg, s),
                  DepthExceeded);
}

TEST_CASE("fixed-policy payoff is linear in the prior") {
  GameSpec s = fixture("/desk.json");
  DiscountedAggregates agg = discounted_aggregates(s);
  // Type- and history-dependent deterministic-ish policies.
  P1Policy pi;
  pi.depth = 2;
  pi.act = [&](int k, const std::vector<int>& h) {
    std::vector<double> mix(s.num_a1(), 0.0);
    mix[(k + static_cast<int>(h.size())) % s.num_a1()] = 1.0;
    return mix;
  };
  P2Policy sigma;
  sigma.depth = 2;
  sigma.act = [&](const std::vector<int>& h) {
    std::vector<double> mix(s.num_a2(), 1.0 / s.num_a2());
    if (!h.empty() && h.back() == 1) mix = {0.25, 0.75};
    return mix;
  };
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng), b = u(rng), lam = u(rng);
    const Belief p{{a, 1.0 - a}, false};
    const Belief q{{b, 1.0 - b}, false};
    const Belief mix{{lam * a + (1.0 - lam) * b,
                      lam * (1.0 - a) + (1.0 - lam) * (1.0 - b)},
                     false};
    const double vp = eval_finite_horizon(p, 0, pi, sigma, 2, agg, s);
    const double vq = eval_finite_horizon(q, 0, pi, sigma, 2, agg, s);
    const double vm = eval_finite_horizon(mix, 0, pi, sigma, 2, agg, s);
    CHECK(vm == doctest::Approx(lam * vp + (1.0 - lam) * vq).epsilon(1e-12));
  }
}

TEST_CASE("horizon-zero enumeration equals the one-stage backup") {
  GameSpec s = fixture("/desk.json");
  DiscountedAggregates agg = discounted_aggregates(s);
  CutEnvelope zero(s.num_states());
  for (auto& cuts : zero.cuts) cuts = {{0.0, 0.0}};
  CHECK(brute_value({{0.5, 0.5}, false}, 0, 0, s, agg) ==
        doctest::Approx(0.2361111111111111).epsilon(1e-9));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double x = u(rng);
    const Belief p{{x, 1.0 - x}, false};
    for (int i = 0; i < s.num_states(); ++i)
      CHECK(brute_value(p, i, 0, s, agg) ==
            doctest::Approx(stage_backup(p, i, zero, agg, s).value)
                .epsilon(1e-7));
  }
}

TEST_CASE("constant-cost horizons sum the discount weights") {
  GameSpec s = tiny_spec(0.5);
  DiscountedAggregates agg = discounted_aggregates(s);
  const Belief p{{0.3, 0.7}, false};
  CHECK(brute_value(p, 0, 0, s, agg) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(brute_value(p, 0, 1, s, agg) == doctest::Approx(0.375).epsilon(1e-9));
}

TEST_CASE("vertex beliefs reduce to the single-type recursion") {
  GameSpec s = fixture("/single_state.json");
  DiscountedAggregates agg = discounted_aggregates(s);
  for (int k = 0; k < 2; ++k) {
    const Belief vertex{{k == 0 ? 1.0 : 0.0, k == 0 ? 0.0 : 1.0}, false};
    for (int n : {0, 1}) {
      const std::vector<double> ref = single_type_finite(s, agg, k, n);
      CHECK(brute_value(vertex, 0, n, s, agg) ==
            doctest::Approx(ref[0]).epsilon(1e-7));
    }
  }
}

TEST_CASE("enumerated values grow with the horizon and stay concave") {
  GameSpec s = fixture("/single_state.json");
  DiscountedAggregates agg = discounted_aggregates(s);
  for (double p0 : {0.2, 0.5, 0.8}) {
    const Belief p{{p0, 1.0 - p0}, false};
    const double v0 = brute_value(p, 0, 0, s, agg);
    const double v1 = brute_value(p, 0, 1, s, agg);
    CHECK(v1 >= v0 - 1e-9);
  }
  const double va = brute_value({{0.2, 0.8}, false}, 0, 1, s, agg);
  const double vb = brute_value({{0.8, 0.2}, false}, 0, 1, s, agg);
  const double vm = brute_value({{0.5, 0.5}, false}, 0, 1, s, agg);
  CHECK(vm >= 0.5 * (va + vb) - 1e-9);
}

TEST_CASE("oversized enumerations are refused") {
  GameSpec s = fixture("/desk.json");
  DiscountedAggregates agg = discounted_aggregates(s);
  CHECK_THROWS_AS(brute_value({{0.5, 0.5}, false}, 0, 1, s, agg),
                  EnumerationTooLarge);
}

TEST_CASE("best responses against passive opponents, constant costs") {
  GameSpec s = tiny_spec(0.5);
  DiscountedAggregates agg = discounted_aggregates(s);
  Assumption1Certificate cert =
      certify_assumption1(s, default_delta_candidates(s));
  const Belief p{{0.5, 0.5}, false};
  const int N = 3;
  const double want = 0.5 * (1.0 - std::pow(0.5, N + 1));

  P2Responder sigma;
  sigma.zeta0 = {0.0, 0.0};
  sigma.decide = [&](int, const std::vector<double>& zeta) {
    return std::make_pair(std::vector<double>{0.5, 0.5},
                          std::vector<std::vector<double>>{zeta});
  };
  BrBracket br1 = best_response_p1(sigma, p, 0, N, s, agg, cert);
  CHECK(br1.value_lo == doctest::Approx(want).epsilon(1e-9));
  CHECK(br1.value_hi - br1.value_lo ==
        doctest::Approx(error_budget(N, cert, s.max_cost(), s.alpha))
            .epsilon(1e-12));

  P1Responder pi;
  pi.decide = [&](const Belief&, int) {
    StageMixP1 mu;
    mu.mu.assign(2, {0.5, 0.5});
    return mu;
  };
  BrBracket br2 = best_response_p2(pi, p, 0, N, s, agg, cert);
  CHECK(br2.value_lo == doctest::Approx(want).epsilon(1e-9));
  CHECK(br2.value_hi - br2.value_lo ==
        doctest::Approx(error_budget(N, cert, s.max_cost(), s.alpha))
            .epsilon(1e-12));
}

TEST_CASE("best-response node budgets are enforced") {
  GameSpec s = fixture("/desk.json");
  DiscountedAggregates agg = discounted_aggregates(s);
  Assumption1Certificate cert =
      certify_assumption1(s, default_delta_candidates(s));
  BrBudget budget;
  budget.max_nodes = 2;
  P1Responder pi;
  pi.decide = [&](const Belief&, int) {
    StageMixP1 mu;
    mu.mu.assign(2, {0.5, 0.5});
    return mu;
  };
  CHECK_THROWS_AS(best_response_p2(pi, {{0.5, 0.5}, false}, 0, 4, s, agg, cert,
                                   budget),
                  BudgetExceeded);
}

TEST_CASE("single-type solver satisfies its own fixed point") {
  GameSpec s = fixture("/desk.json");
  DiscountedAggregates agg = discounted_aggregates(s);
  SingleTypeSolution sol = single_type_solve(s, agg, 1, 1e-10);
  for (int i = 0; i < s.num_states(); ++i) {
    std::vector<std::vector<double>> M(s.num_a1(),
                                       std::vector<double>(s.num_a2()));
    for (int a = 0; a < s.num_a1(); ++a)
      for (int b = 0; b < s.num_a2(); ++b) {
        M[a][b] = s.cost_at(1, i, a, b) * agg.m_at(s, i, a, b);
        for (int j = 0; j < s.num_states(); ++j)
          M[a][b] += agg.qhat_at(s, i, a, b, j) * sol.value[j];
      }
    CHECK(solve_matrix_game(M).value ==
          doctest::Approx(sol.value[i]).epsilon(1e-8));
  }
}
