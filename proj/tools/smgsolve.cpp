#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "smg/dual.hpp"
#include "smg/game_io.hpp"
#include "smg/oracle.hpp"
#include "smg/player1.hpp"
#include "smg/sim.hpp"
#include "smg/value.hpp"

using namespace smg;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitBudget = 4;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

GameSpec load_and_validate(const std::string& path) {
  GameSpec spec = load_game_spec(path);
  const auto violations = validate_spec(spec);
  if (!violations.empty()) {
    std::string msg = "spec validation failed:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  spec.renormalize();
  return spec;
}

struct Loaded {
  GameSpec spec;
  DiscountedAggregates agg;
  Assumption1Certificate cert;
  SolveReport report;
};

Loaded load_solved(const std::string& spec_path,
                   const std::string& solution_path) {
  Loaded out;
  out.spec = load_and_validate(spec_path);
  out.agg = discounted_aggregates(out.spec);
  out.cert = certify_assumption1(out.spec, default_delta_candidates(out.spec));
  std::ifstream in(solution_path);
  if (!in) throw ValidationError("cannot open solution " + solution_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string digest;
  out.report = solution_from_json(buf.str(), &digest);
  if (digest != spec_digest(out.spec))
    throw ValidationError(
        "solution file digest does not match the given spec");
  return out;
}

json cert_json(const GameSpec& spec, const Assumption1Certificate& cert) {
  json j;
  j["delta"] = cert.delta;
  j["epsilon"] = cert.epsilon;
  j["beta"] = cert.beta;
  j["worst_state"] = spec.states[cert.worst_i];
  j["worst_a1"] = spec.actions_p1[cert.worst_a];
  j["worst_a2"] = spec.actions_p2[cert.worst_b];
  return j;
}

// Shared engine wiring: Player 1 backed by the pruned envelope with a
// quantized decision cache, Player 2 by the dual stage solver.
struct Engines {
  CutEnvelope pruned;
  std::shared_ptr<StagePolicyCache> p1_cache;
  std::shared_ptr<DualValueOracle> oracle;
  std::shared_ptr<DualDecisionCache> p2_cache;
  std::vector<double> zeta0;
  DualSearchConfig cfg;
};

Engines make_engines(const Loaded& l, double p1_quantum) {
  Engines e;
  e.pruned = prune_envelope(l.report.envelope);
  e.p1_cache = std::make_shared<StagePolicyCache>();
  e.p1_cache->quantum = p1_quantum;
  e.oracle = std::make_shared<DualValueOracle>(l.spec, e.pruned);
  e.p2_cache = std::make_shared<DualDecisionCache>();
  Belief p0{l.spec.initial_belief, false};
  e.zeta0 = p2_init(*e.oracle, p0, 0, e.cfg);
  return e;
}

int dispatch(const std::string& cmd, const std::string& spec_path,
             const std::string& solution_path, int mesh, double tol,
             int horizon, long episodes, std::uint64_t seed,
             const std::string& out_path, const std::string& format,
             double budget, int player) {
  if (cmd == "validate") {
    GameSpec spec = load_and_validate(spec_path);
    Assumption1Certificate cert =
        certify_assumption1(spec, default_delta_candidates(spec));
    json j;
    j["valid"] = true;
    j["digest"] = spec_digest(spec);
    j["certificate"] = cert_json(spec, cert);
    write_output(out_path, j.dump(2) + "\n");
    std::cerr << "certified: delta=" << cert.delta << " epsilon=" << cert.epsilon
              << " beta=" << cert.beta << "\n";
    return kExitOk;
  }

  if (cmd == "solve") {
    GameSpec spec = load_and_validate(spec_path);
    DiscountedAggregates agg = discounted_aggregates(spec);
    Assumption1Certificate cert =
        certify_assumption1(spec, default_delta_candidates(spec));
    SolveReport report = value_iterate(spec, agg, cert, mesh, tol);
    write_output(solution_path, solution_to_json(report, spec_digest(spec)));
    if (!out_path.empty()) {
      if (format == "csv")
        write_output(out_path, value_csv(report, spec));
      else {
        json j;
        j["iterations"] = report.iterations;
        j["beta"] = report.beta;
        j["tail_bound"] = report.tail_bound;
        j["last_change"] = report.last_change;
        j["mesh"] = report.mesh;
        write_output(out_path, j.dump(2) + "\n");
      }
    }
    std::cerr << "solved in " << report.iterations
              << " iterations, tail bound " << report.tail_bound << "\n";
    return kExitOk;
  }

  if (cmd == "oracle") {
    GameSpec spec = load_and_validate(spec_path);
    DiscountedAggregates agg = discounted_aggregates(spec);
    BruteLimits limits;
    if (budget > 0) limits.max_matrix_entries = static_cast<long>(budget);
    Belief p0{spec.initial_belief, false};
    const double v = brute_value(p0, 0, horizon, spec, agg, limits);
    json j;
    j["horizon"] = horizon;
    j["belief"] = spec.initial_belief;
    j["state"] = spec.states[0];
    j["value"] = v;
    write_output(out_path, j.dump(2) + "\n");
    return kExitOk;
  }

  if (cmd == "conjugate") {
    Loaded l = load_solved(spec_path, solution_path);
    DualValueOracle oracle(l.spec, l.report.envelope);
    if (format == "csv" || out_path.empty())
      write_output(out_path, conjugate_csv(oracle, 33));
    double worst = 0.0;
    for (int i = 0; i < l.spec.num_states(); ++i)
      for (const auto& p : simplex_grid(l.spec.num_types(), 10)) {
        const double direct = l.report.envelope.eval(p.p, i);
        const double round = recover_value(oracle, p, i).value;
        worst = std::max(worst, std::abs(direct - round));
      }
    std::cerr << "fenchel round-trip worst gap: " << worst << "\n";
    return kExitOk;
  }

  if (cmd == "exploit") {
    Loaded l = load_solved(spec_path, solution_path);
    Engines e = make_engines(l, 0.0);
    Belief p0{l.spec.initial_belief, false};
    BrBudget br_budget;
    if (budget > 0) br_budget.max_nodes = budget;
    const double vstar = l.report.envelope.eval(p0.p, 0);
    json j;
    j["horizon"] = horizon;
    j["solved_value"] = vstar;
    if (player == 1) {
      P1Responder pi;
      pi.decide = [&](const Belief& q, int i) {
        P1Engine engine(l.spec, l.agg, e.pruned, q, e.p1_cache);
        return engine.decide(i);
      };
      BrBracket br = best_response_p2(pi, p0, 0, horizon, l.spec, l.agg,
                                      l.cert, br_budget);
      j["player"] = 1;
      j["value_lo"] = br.value_lo;
      j["value_hi"] = br.value_hi;
      std::cerr << "P2 best response vs P1 engine: guaranteed >= "
                << br.value_lo << " (solved " << vstar << ")\n";
    } else {
      P2Responder sigma;
      sigma.zeta0 = e.zeta0;
      sigma.decide = [&](int i, const std::vector<double>& zeta) {
        auto key = std::make_pair(i, e.p2_cache->key(zeta));
        auto it = e.p2_cache->table.find(key);
        if (it == e.p2_cache->table.end()) {
          auto sol = dual_stage_solve(i, zeta, *e.oracle, l.agg, l.spec, e.cfg);
          it = e.p2_cache->table.emplace(std::move(key), std::move(sol)).first;
        }
        return std::make_pair(it->second.nu.nu, it->second.w);
      };
      BrBracket br = best_response_p1(sigma, p0, 0, horizon, l.spec, l.agg,
                                      l.cert, br_budget);
      j["player"] = 2;
      j["value_lo"] = br.value_lo;
      j["value_hi"] = br.value_hi;
      std::cerr << "P1 best response vs P2 engine: concedes <= " << br.value_hi
                << " (solved " << vstar << ")\n";
    }
    write_output(out_path, j.dump(2) + "\n");
    return kExitOk;
  }

  if (cmd == "simulate") {
    Loaded l = load_solved(spec_path, solution_path);
    Engines e = make_engines(l, 1e-4);
    Belief p0{l.spec.initial_belief, false};
    SimP1Factory p1f = [&]() {
      auto engine =
          std::make_shared<P1Engine>(l.spec, l.agg, e.pruned, p0, e.p1_cache);
      SimP1 out;
      out.decide = [engine](int i) { return engine->decide(i); };
      out.observe = [engine](int i, int a) { engine->observe(i, a); };
      return out;
    };
    SimP2Factory p2f = [&]() {
      auto engine = std::make_shared<P2Engine>(l.spec, l.agg, *e.oracle,
                                               e.zeta0, e.p2_cache, e.cfg);
      SimP2 out;
      out.decide = [engine](int i) { return engine->decide(i); };
      out.observe = [engine](int j) { engine->observe(j); };
      return out;
    };
    MonteCarloResult mc = monte_carlo_value(
        l.spec, l.agg, p1f, p2f, l.spec.initial_belief, 0, episodes, seed);
    json j;
    j["episodes"] = mc.episodes;
    j["mean"] = mc.mean;
    j["stderr"] = mc.stderr_;
    j["max_residual"] = mc.max_residual;
    j["solved_value"] = l.report.envelope.eval(p0.p, 0);
    write_output(out_path, j.dump(2) + "\n");
    std::cerr << "monte carlo mean " << mc.mean << " +- " << mc.stderr_
              << " over " << mc.episodes << " episodes\n";
    return kExitOk;
  }

  std::cerr << "unknown subcommand " << cmd << "\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solver for zero-sum semi-Markov games with one-sided "
               "incomplete information"};
  app.require_subcommand(1);

  std::string spec_path, solution_path, out_path, format = "json";
  int mesh = 50, horizon = 1, player = 1;
  double tol = 1e-4, budget = 0.0;
  long episodes = 10000;
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* sub, bool needs_solution) {
    sub->add_option("--spec", spec_path, "game specification file")->required();
    if (needs_solution)
      sub->add_option("--solution", solution_path, "solution file")->required();
    sub->add_option("--out", out_path, "output path ('-' for stdout)");
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--budget", budget, "enumeration/search budget");
  };

  auto* validate = app.add_subcommand("validate", "check a spec and certify it");
  add_common(validate, false);

  auto* solve = app.add_subcommand("solve", "run value iteration");
  solve->add_option("--spec", spec_path)->required();
  solve->add_option("--solution", solution_path, "solution output path")
      ->required();
  solve->add_option("--mesh", mesh, "belief grid denominator");
  solve->add_option("--tol", tol, "stopping tolerance");
  solve->add_option("--out", out_path, "value table output");
  solve->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  auto* oracle = app.add_subcommand("oracle", "brute-force finite-horizon value");
  add_common(oracle, false);
  oracle->add_option("--horizon", horizon, "horizon n");

  auto* conjugate =
      app.add_subcommand("conjugate", "dual value table and round trip");
  add_common(conjugate, true);

  auto* exploit = app.add_subcommand("exploit", "best-respond to an engine");
  add_common(exploit, true);
  exploit->add_option("--player", player, "engine under attack: 1 or 2")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  exploit->add_option("--horizon", horizon, "best-response depth");

  auto* simulate = app.add_subcommand("simulate", "monte carlo with both engines");
  add_common(simulate, true);
  simulate->add_option("--episodes", episodes, "episode count");
  simulate->add_option("--seed", seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    return dispatch(app.get_subcommands().front()->get_name(), spec_path,
                    solution_path, mesh, tol, horizon, episodes, seed, out_path,
                    format, budget, player);
  } catch (const SpecParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const CertificationFailed& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const SolutionParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalFailure& e) {
    std::cerr << e.what() << "\n";
    return kExitNumerical;
  } catch (const EnumerationTooLarge& e) {
    std::cerr << e.what() << "\n";
    return kExitBudget;
  } catch (const BudgetExceeded& e) {
    std::cerr << e.what() << "\n";
    return kExitBudget;
  } catch (const SearchBudgetExceeded& e) {
    std::cerr << e.what() << "\n";
    return kExitBudget;
  } catch (const IterationBudgetExceeded& e) {
    std::cerr << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
}
