#include <doctest.h>

#include <cmath>
#include <random>

#include "smg/belief.hpp"

using namespace smg;

TEST_CASE("posterior update: revealing, non-revealing, generic") {
  Belief p{{0.5, 0.5}, false};
  StageMixP1 mu;
  mu.mu = {{1.0, 0.0}, {0.0, 1.0}};
  Belief q = posterior_update(p, mu, 0);
  CHECK(q.p[0] == doctest::Approx(1.0));
  CHECK(q.p[1] == doctest::Approx(0.0));
  CHECK(!q.off_support);

  mu.mu = {{0.3, 0.7}, {0.3, 0.7}};
  Belief any{{0.2, 0.8}, false};
  q = posterior_update(any, mu, 1);
  CHECK(q.p[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(q.p[1] == doctest::Approx(0.8).epsilon(1e-12));

  Belief p2{{0.3, 0.7}, false};
  mu.mu = {{0.5, 0.5}, {0.25, 0.75}};
  q = posterior_update(p2, mu, 0);
  CHECK(q.p[0] == doctest::Approx(0.15 / 0.325).epsilon(1e-9));
  CHECK(q.p[1] == doctest::Approx(0.175 / 0.325).epsilon(1e-9));
}

TEST_CASE("off-support action freezes the belief and flags") {
  Belief p{{1.0, 0.0}, false};
  StageMixP1 mu;
  mu.mu = {{1.0, 0.0}, {0.0, 1.0}};
  Belief q = posterior_update(p, mu, 1);
  CHECK(q.off_support);
  CHECK(q.p[0] == doctest::Approx(1.0));
}

TEST_CASE("chi conditionals") {
  JointMix phi;
  phi.phi = {{0.1, 0.2}, {0.3, 0.4}};
  Belief q = chi(phi, 0);
  CHECK(q.p[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(q.p[1] == doctest::Approx(0.75).epsilon(1e-12));

  phi.phi = {{0.25, 0.25}, {0.25, 0.25}};
  for (int a = 0; a < 2; ++a) {
    q = chi(phi, a);
    CHECK(q.p[0] == doctest::Approx(0.5));
  }

  phi.phi = {{0.0, 0.5}, {0.0, 0.5}};
  q = chi(phi, 0);
  CHECK(q.off_support);
  CHECK(q.p[0] == doctest::Approx(0.5));
}

TEST_CASE("chi after joint_from equals the posterior update") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Belief p{{0.0, 0.0, 0.0}, false};
    double mass = 0.0;
    for (double& x : p.p) mass += (x = u(rng) + 1e-3);
    for (double& x : p.p) x /= mass;
    StageMixP1 mu;
    mu.mu.assign(3, std::vector<double>(2));
    for (auto& row : mu.mu) {
      const double x = u(rng);
      row = {x, 1.0 - x};
    }
    for (int a = 0; a < 2; ++a) {
      const Belief via_chi = chi(joint_from(p, mu), a);
      const Belief via_post = posterior_update(p, mu, a);
      for (int k = 0; k < 3; ++k)
        CHECK(via_chi.p[k] == doctest::Approx(via_post.p[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("joint and conditional round trip") {
  Belief p{{0.3, 0.7}, false};
  StageMixP1 mu;
  mu.mu = {{0.5, 0.5}, {0.25, 0.75}};
  JointMix phi = joint_from(p, mu);
  CHECK(phi.phi[0][0] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(phi.phi[1][0] == doctest::Approx(0.175).epsilon(1e-12));
  auto [p2, mu2] = conditional_from(phi, 2);
  CHECK(p2.p[0] == doctest::Approx(0.3).epsilon(1e-12));
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a)
      CHECK(mu2.mu[k][a] == doctest::Approx(mu.mu[k][a]).epsilon(1e-12));
}

TEST_CASE("zero-mass rows fall back to the uniform mix") {
  Belief p{{1.0, 0.0}, false};
  StageMixP1 mu;
  mu.mu = {{0.4, 0.6}, {0.9, 0.1}};
  JointMix phi = joint_from(p, mu);
  CHECK(phi.phi[1][0] == 0.0);
  CHECK(phi.phi[1][1] == 0.0);
  auto [p2, mu2] = conditional_from(phi, 2);
  CHECK(mu2.mu[1][0] == doctest::Approx(0.5));
  CHECK(mu2.mu[0][0] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("belief martingale under any stage mix") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Belief p{{0.0, 0.0}, false};
    const double x = u(rng);
    p.p = {x, 1.0 - x};
    StageMixP1 mu;
    mu.mu.assign(2, std::vector<double>(3));
    for (auto& row : mu.mu) {
      double mass = 0.0;
      for (double& e : row) mass += (e = u(rng));
      for (double& e : row) e /= mass;
    }
    for (int k = 0; k < 2; ++k) {
      double total = 0.0;
      for (int a = 0; a < 3; ++a) {
        double xa = 0.0;
        for (int l = 0; l < 2; ++l) xa += p.p[l] * mu.mu[l][a];
        if (xa <= 0.0) continue;
        total += xa * posterior_update(p, mu, a).p[k];
      }
      CHECK(total == doctest::Approx(p.p[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("simplex grids enumerate lexicographically") {
  auto g = simplex_grid(2, 2);
  REQUIRE(g.size() == 3);
  CHECK(g[0].p == std::vector<double>{0.0, 1.0});
  CHECK(g[1].p == std::vector<double>{0.5, 0.5});
  CHECK(g[2].p == std::vector<double>{1.0, 0.0});

  CHECK(simplex_grid(3, 2).size() == 6);
  auto v = simplex_grid(2, 1);
  REQUIRE(v.size() == 2);
  CHECK(v[0].p == std::vector<double>{0.0, 1.0});
  CHECK(v[1].p == std::vector<double>{1.0, 0.0});

  for (const auto& b : simplex_grid(4, 5)) {
    double sum = 0.0;
    for (double e : b.p) {
      CHECK(e >= 0.0);
      sum += e;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}
