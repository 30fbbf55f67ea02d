#include <doctest.h>

#include <cmath>

#include "smg/game.hpp"
#include "smg/game_io.hpp"

using namespace smg;

namespace {

GameSpec tiny_spec(const SojournLaw& law, double alpha = 1.0) {
  GameSpec s;
  s.types = {"k0", "k1"};
  s.states = {"s0"};
  s.actions_p1 = {"a0", "a1"};
  s.actions_p2 = {"b0", "b1"};
  s.alpha = alpha;
  s.initial_belief = {0.5, 0.5};
  s.cost.assign(2 * 1 * 2 * 2, 0.5);
  s.transitions.assign(1 * 2 * 2, {Branch{0, 1.0, law}});
  return s;
}

}  // namespace

TEST_CASE("aggregates for a single exponential branch") {
  GameSpec s = tiny_spec(Exponential{1.0});
  DiscountedAggregates agg = discounted_aggregates(s);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CHECK(agg.qhat_at(s, 0, a, b, 0) == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(agg.m_at(s, 0, a, b) == doctest::Approx(0.5).epsilon(1e-12));
    }
  CHECK(agg.beta_bound == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("aggregates for a mixed two-branch kernel") {
  GameSpec s = tiny_spec(Exponential{1.0});
  s.states = {"s0", "s1"};
  s.cost.assign(2 * 2 * 2 * 2, 0.5);
  s.transitions.assign(2 * 2 * 2,
                       {Branch{0, 0.5, Deterministic{1.0}},
                        Branch{1, 0.5, Exponential{1.0}}});
  DiscountedAggregates agg = discounted_aggregates(s);
  const double q0 = 0.5 * std::exp(-1.0);
  CHECK(agg.qhat_at(s, 0, 0, 0, 0) == doctest::Approx(q0).epsilon(1e-12));
  CHECK(agg.qhat_at(s, 0, 0, 0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(agg.m_at(s, 0, 0, 0) ==
        doctest::Approx(1.0 - q0 - 0.25).epsilon(1e-12));
}

TEST_CASE("discount identity m alpha + sum qhat = 1 on all fixtures") {
  for (const char* name : {"/desk.json", "/constant_cost.json",
                           "/single_state.json"}) {
    GameSpec s = load_game_spec(std::string(FIXTURE_DIR) + name);
    s.renormalize();
    DiscountedAggregates agg = discounted_aggregates(s);
    for (int i = 0; i < s.num_states(); ++i)
      for (int a = 0; a < s.num_a1(); ++a)
        for (int b = 0; b < s.num_a2(); ++b) {
          double sum = 0.0;
          for (int j = 0; j < s.num_states(); ++j)
            sum += agg.qhat_at(s, i, a, b, j);
          CHECK(std::abs(agg.m_at(s, i, a, b) * s.alpha + sum - 1.0) <= 1e-12);
        }
  }
}

TEST_CASE("spec validation reports each violation") {
  GameSpec s = tiny_spec(Exponential{1.0});
  CHECK(validate_spec(s).empty());

  GameSpec bad = s;
  bad.transitions[0] = {Branch{0, 0.5, Exponential{1.0}},
                        Branch{0, 0.6, Exponential{1.0}}};
  auto v = validate_spec(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("s0") != std::string::npos);

  bad = s;
  bad.cost_at(0, 0, 1, 0) = -1.0;
  v = validate_spec(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("cost") != std::string::npos);

  GameSpec fixture = load_game_spec(std::string(FIXTURE_DIR) + "/bad_probs.json");
  CHECK(!validate_spec(fixture).empty());
}

TEST_CASE("assumption certificate on exponential laws") {
  GameSpec s = tiny_spec(Exponential{2.0});
  s.transitions[1] = {Branch{0, 1.0, Exponential{1.5}}};
  Assumption1Certificate cert = certify_assumption1(s, {0.1});
  CHECK(cert.delta == doctest::Approx(0.1));
  CHECK(cert.epsilon == doctest::Approx(std::exp(-0.2)).epsilon(1e-9));
  CHECK(cert.beta ==
        doctest::Approx(1.0 - std::exp(-0.2) * (1.0 - std::exp(-0.1)))
            .epsilon(1e-9));
}

TEST_CASE("deterministic laws give epsilon = 1") {
  GameSpec s = tiny_spec(Deterministic{1.0}, 2.0);
  Assumption1Certificate cert = certify_assumption1(s, {0.5});
  CHECK(cert.epsilon == doctest::Approx(1.0));
  CHECK(cert.beta == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("instantaneous laws cannot be certified") {
  GameSpec s = tiny_spec(Deterministic{0.0});
  CHECK_THROWS_AS(certify_assumption1(s, default_delta_candidates(s)),
                  CertificationFailed);
}

TEST_CASE("certified beta dominates the exact discount bound") {
  for (const char* name : {"/desk.json", "/constant_cost.json",
                           "/single_state.json"}) {
    GameSpec s = load_game_spec(std::string(FIXTURE_DIR) + name);
    s.renormalize();
    DiscountedAggregates agg = discounted_aggregates(s);
    Assumption1Certificate cert =
        certify_assumption1(s, default_delta_candidates(s));
    CHECK(cert.beta < 1.0);
    CHECK(cert.beta >= agg.beta_bound - 1e-12);
  }
}

TEST_CASE("spec files parse strictly") {
  GameSpec s = load_game_spec(std::string(FIXTURE_DIR) + "/desk.json");
  CHECK(s.num_types() == 2);
  CHECK(s.num_states() == 2);
  CHECK(s.cost_at(0, 0, 0, 0) == doctest::Approx(0.2));

  CHECK_THROWS_AS(parse_game_spec("{\"types\": [\"a\"]}"), SpecParseError);
  CHECK_THROWS_AS(parse_game_spec("not json"), SpecParseError);

  const std::string canon = game_spec_to_json(s);
  GameSpec s2 = parse_game_spec(canon);
  CHECK(game_spec_to_json(s2) == canon);
  CHECK(spec_digest(s2) == spec_digest(s));
}
