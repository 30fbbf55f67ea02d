#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "smg/dual.hpp"
#include "smg/game_io.hpp"
#include "smg/oracle.hpp"

using namespace smg;

namespace {

GameSpec fixture(const char* name) {
  GameSpec s = load_game_spec(std::string(FIXTURE_DIR) + name);
  s.renormalize();
  return s;
}

const GameSpec& solved_spec() {
  static GameSpec s = fixture("/single_state.json");
  return s;
}

const SolveReport& solved_report() {
  static SolveReport rep = [] {
    const GameSpec& s = solved_spec();
    DiscountedAggregates agg = discounted_aggregates(s);
    Assumption1Certificate cert =
        certify_assumption1(s, default_delta_candidates(s));
    SolveOptions opts;
    opts.parallel = false;
    return value_iterate(s, agg, cert, 10, 1e-3, opts);
  }();
  return rep;
}

}  // namespace

TEST_CASE("conjugate of a flat envelope") {
  GameSpec s = fixture("/single_state.json");
  CutEnvelope env(1);
  env.cuts[0] = {{0.7, 0.7}};
  DualValueOracle oracle(s, env);
  CHECK(oracle.conjugate_eval({0.0, 0.0}, 0) == doctest::Approx(0.7).epsilon(1e-9));
  for (auto z : {std::vector<double>{0.2, 0.5}, {0.5, 0.2}, {0.3, 0.3}}) {
    const double want = 0.7 - std::min(z[0], z[1]) / s.alpha;
    CHECK(oracle.conjugate_eval(z, 0) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("conjugate: translation, convexity, Lipschitz") {
  GameSpec s = fixture("/single_state.json");
  CutEnvelope env(1);
  env.cuts[0] = {{0.9, 0.1}, {0.3, 0.6}, {0.5, 0.5}};
  DualValueOracle oracle(s, env);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> z = {u(rng), u(rng)};
    std::vector<double> z2 = {u(rng), u(rng)};
    const double t = u(rng);
    const double base = oracle.conjugate_eval(z, 0);
    CHECK(oracle.conjugate_eval({z[0] + t, z[1] + t}, 0) ==
          doctest::Approx(base - t / s.alpha).epsilon(1e-8));
    std::vector<double> mid = {0.5 * (z[0] + z2[0]), 0.5 * (z[1] + z2[1])};
    const double other = oracle.conjugate_eval(z2, 0);
    CHECK(oracle.conjugate_eval(mid, 0) <= 0.5 * (base + other) + 1e-8);
    const double linf =
        std::max(std::abs(z[0] - z2[0]), std::abs(z[1] - z2[1]));
    CHECK(std::abs(base - other) <= linf / s.alpha + 1e-8);
  }
}

TEST_CASE("recovering the primal value from the conjugate") {
  const GameSpec& s = solved_spec();
  const SolveReport& rep = solved_report();
  DualValueOracle oracle(s, rep.envelope);
  for (double p0 : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const Belief p{{p0, 1.0 - p0}, false};
    RecoveredValue rec = recover_value(oracle, p, 0);
    CHECK(std::abs(rec.value - rep.envelope.eval(p.p, 0)) <= 1e-3);
    for (double zk : rec.z) {
      CHECK(zk >= 0.0);
      CHECK(zk <= s.max_cost());
    }
  }
}

TEST_CASE("dual stage matrix from a flat envelope, by hand") {
  GameSpec s = fixture("/single_state.json");
  DiscountedAggregates agg = discounted_aggregates(s);
  CutEnvelope env(1);
  env.cuts[0] = {{0.7, 0.7}};
  DualValueOracle oracle(s, env);
  const std::vector<double> z = {0.1, 0.4};
  WField w = {{0.2, 0.6}};
  auto M = gamma_matrix(0, z, w, oracle, agg, s);
  REQUIRE(M.size() == static_cast<std::size_t>(s.num_types() * s.num_a1()));
  REQUIRE(M[0].size() == static_cast<std::size_t>(s.num_a2()));
  const double ustar = 0.7 - 0.2 / s.alpha;
  for (int k = 0; k < s.num_types(); ++k)
    for (int a = 0; a < s.num_a1(); ++a)
      for (int b = 0; b < s.num_a2(); ++b) {
        double want = s.cost_at(k, 0, a, b) * agg.m_at(s, 0, a, b) -
                      z[k] / s.alpha +
                      agg.qhat_at(s, 0, a, b, 0) * (ustar + w[0][k] / s.alpha);
        CHECK(M[k * s.num_a1() + a][b] == doctest::Approx(want).epsilon(1e-12));
      }
}

TEST_CASE("dual stage solve reproduces the conjugate at its fixed point") {
  const GameSpec& s = solved_spec();
  const SolveReport& rep = solved_report();
  DiscountedAggregates agg = discounted_aggregates(s);
  DualValueOracle oracle(s, rep.envelope);
  DualSearchConfig cfg;
  cfg.w_grid = 5;
  for (auto z : {std::vector<double>{0.0, 0.0}, {0.3, 0.1}, {0.5, 0.5}}) {
    DualStageSolution sol = dual_stage_solve(0, z, oracle, agg, s, cfg);
    const double ustar = oracle.conjugate_eval(z, 0);
    CHECK(std::abs(sol.val - ustar) <= sol.tol + 2e-3);
    CHECK(sol.tol <= 5e-3);
    double mass = 0.0;
    for (double x : sol.nu.nu) {
      CHECK(x >= -1e-12);
      mass += x;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("initial dual state attains the recovered minimum") {
  const GameSpec& s = solved_spec();
  const SolveReport& rep = solved_report();
  DualValueOracle oracle(s, rep.envelope);
  const Belief p{{0.4, 0.6}, false};
  std::vector<double> z0 = p2_init(oracle, p, 0);
  const double attained = oracle.conjugate_eval(z0, 0) +
                          (p.p[0] * z0[0] + p.p[1] * z0[1]) / s.alpha;
  CHECK(std::abs(attained - rep.envelope.eval(p.p, 0)) <= 1e-3);
}

TEST_CASE("uninformed engine enforces the decide/observe protocol") {
  const GameSpec& s = solved_spec();
  const SolveReport& rep = solved_report();
  DiscountedAggregates agg = discounted_aggregates(s);
  DualValueOracle oracle(s, rep.envelope);
  DualSearchConfig cfg;
  cfg.w_grid = 5;
  auto cache = std::make_shared<DualDecisionCache>();
  P2Engine eng(s, agg, oracle, {0.2, 0.2}, cache, cfg);
  CHECK_THROWS_AS(eng.observe(0), ProtocolMisuse);
  StageMixP2 nu = eng.decide(0);
  CHECK(nu.nu.size() == static_cast<std::size_t>(s.num_a2()));
  CHECK_THROWS_AS(eng.decide(0), ProtocolMisuse);
  std::vector<double> zeta1 = eng.observe(0);
  CHECK(zeta1 == eng.last_w()[0]);
  CHECK(eng.epoch() == 1);
  CHECK(!cache->table.empty());

  // A second engine with the shared cache replays the stored decision.
  P2Engine eng2(s, agg, oracle, {0.2, 0.2}, cache, cfg);
  StageMixP2 nu2 = eng2.decide(0);
  CHECK(nu2.nu == nu.nu);
}

TEST_CASE("conjugate csv shape") {
  GameSpec s = fixture("/single_state.json");
  CutEnvelope env(1);
  env.cuts[0] = {{0.5, 0.25}};
  DualValueOracle oracle(s, env);
  std::istringstream in(conjugate_csv(oracle, 3));
  std::string line;
  std::getline(in, line);
  CHECK(line == "z,state,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * 3 * s.num_states());
}
