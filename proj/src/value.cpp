#include "smg/value.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include <json.hpp>

namespace smg {

double CutEnvelope::eval(const std::vector<double>& p, int j) const {
  double best = kInf;
  for (const auto& g : cuts[j]) {
    double v = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) v += g[k] * p[k];
    best = std::min(best, v);
  }
  return best;
}

double CutEnvelope::perspective(const std::vector<double>& v, int j) const {
  return eval(v, j);
}

void CutEnvelope::add_cut(int j, const std::vector<double>& g) {
  for (const auto& h : cuts[j]) {
    bool same = true;
    for (std::size_t k = 0; k < g.size() && same; ++k)
      if (std::abs(h[k] - g[k]) > 1e-12) same = false;
    if (same) return;
  }
  cuts[j].push_back(g);
}

CutEnvelope prune_envelope(const CutEnvelope& env, const LpTolerances& tol) {
  CutEnvelope out(static_cast<int>(env.cuts.size()));
  for (std::size_t j = 0; j < env.cuts.size(); ++j) {
    std::vector<char> keep(env.cuts[j].size(), 1);
    const std::size_t K = env.cuts[j].empty() ? 0 : env.cuts[j][0].size();
    for (std::size_t c = 0; c < env.cuts[j].size(); ++c) {
      std::size_t alive = 0;
      for (char k : keep) alive += k;
      if (alive <= 1) break;
      // Keep the cut only if some belief puts it strictly below all others.
      LinearProgram lp;
      for (std::size_t k = 0; k < K; ++k) lp.add_variable(0.0, 0.0, kInf);
      const int s = lp.add_variable(1.0, -kInf, kInf);
      for (std::size_t o = 0; o < env.cuts[j].size(); ++o) {
        if (o == c || !keep[o]) continue;
        LpRow row;
        row.coeffs.assign(K + 1, 0.0);
        for (std::size_t k = 0; k < K; ++k)
          row.coeffs[k] = env.cuts[j][c][k] - env.cuts[j][o][k];
        row.coeffs[s] = 1.0;
        lp.rows.push_back(row);
      }
      LpRow mass;
      mass.coeffs.assign(K + 1, 0.0);
      for (std::size_t k = 0; k < K; ++k) mass.coeffs[k] = 1.0;
      mass.relation = LpRelation::Equal;
      mass.rhs = 1.0;
      lp.rows.push_back(mass);
      LpSolution sol = solve_lp(lp, tol);
      if (sol.status == LpStatus::Optimal && sol.objective <= 1e-10)
        keep[c] = 0;
    }
    for (std::size_t c = 0; c < env.cuts[j].size(); ++c)
      if (keep[c]) out.cuts[j].push_back(env.cuts[j][c]);
  }
  return out;
}

StageSaddle stage_backup(const Belief& p, int i, const CutEnvelope& prev,
                         const DiscountedAggregates& agg, const GameSpec& spec,
                         const LpTolerances& tol) {
  const int K = spec.num_types();
  const int A = spec.num_a1();
  const int B = spec.num_a2();
  const int S = spec.num_states();

  LinearProgram lp;
  // Variables: phi(k,a) >= 0, continuation values w(a,j) free, t free.
  auto phi_var = [&](int k, int a) { return k * A + a; };
  for (int n = 0; n < K * A; ++n) lp.add_variable(0.0, 0.0, kInf);
  auto w_var = [&](int a, int j) { return K * A + a * S + j; };
  for (int n = 0; n < A * S; ++n) lp.add_variable(0.0, -kInf, kInf);
  const int t_var = lp.add_variable(1.0, -kInf, kInf);
  const int nvar = t_var + 1;

  // Mass rows first (their duals are the cut), then the cut rows bounding
  // each w(a,j) by the previous envelope over the column mass phi(.,a),
  // then one payoff row per b (duals are Player 2's mix).
  for (int k = 0; k < K; ++k) {
    LpRow row;
    row.coeffs.assign(nvar, 0.0);
    for (int a = 0; a < A; ++a) row.coeffs[phi_var(k, a)] = 1.0;
    row.relation = LpRelation::Equal;
    row.rhs = p.p[k];
    lp.rows.push_back(row);
  }
  for (int a = 0; a < A; ++a)
    for (int j = 0; j < S; ++j)
      for (const auto& g : prev.cuts[j]) {
        LpRow row;
        row.coeffs.assign(nvar, 0.0);
        row.coeffs[w_var(a, j)] = 1.0;
        for (int k = 0; k < K; ++k) row.coeffs[phi_var(k, a)] = -g[k];
        lp.rows.push_back(row);
      }
  const int payoff_row0 = static_cast<int>(lp.rows.size());
  for (int b = 0; b < B; ++b) {
    LpRow row;
    row.coeffs.assign(nvar, 0.0);
    row.coeffs[t_var] = 1.0;
    for (int k = 0; k < K; ++k)
      for (int a = 0; a < A; ++a)
        row.coeffs[phi_var(k, a)] =
            -spec.cost_at(k, i, a, b) * agg.m_at(spec, i, a, b);
    for (int a = 0; a < A; ++a)
      for (int j = 0; j < S; ++j)
        row.coeffs[w_var(a, j)] -= agg.qhat_at(spec, i, a, b, j);
    lp.rows.push_back(row);
  }

  LpSolution sol = solve_lp(lp, tol);
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailure("stage backup lp did not solve to optimality");

  StageSaddle out;
  out.value = sol.objective;
  out.phi_star.phi.assign(K, std::vector<double>(A, 0.0));
  for (int k = 0; k < K; ++k)
    for (int a = 0; a < A; ++a)
      out.phi_star.phi[k][a] = std::max(0.0, sol.x[phi_var(k, a)]);
  auto [marg, mu] = conditional_from(out.phi_star, A);
  out.mu_star = std::move(mu);
  out.cut.assign(K, 0.0);
  for (int k = 0; k < K; ++k) out.cut[k] = sol.duals[k];
  out.nu_star.nu.assign(B, 0.0);
  double mass = 0.0;
  for (int b = 0; b < B; ++b) {
    out.nu_star.nu[b] = std::max(0.0, sol.duals[payoff_row0 + b]);
    mass += out.nu_star.nu[b];
  }
  if (mass > 0.0)
    for (double& x : out.nu_star.nu) x /= mass;
  else
    for (double& x : out.nu_star.nu) x = 1.0 / B;
  return out;
}

double error_budget(int n, const Assumption1Certificate& cert, double cstar,
                    double alpha) {
  return cstar * std::pow(cert.beta, n + 1) / alpha;
}

SolveReport value_iterate(const GameSpec& spec, const DiscountedAggregates& agg,
                          const Assumption1Certificate& cert, int mesh,
                          double stop_tol, const SolveOptions& opts) {
  const int S = spec.num_states();
  const double cstar = spec.max_cost();
  const double beta = cert.beta;

  int n_min = 1;
  if (cstar > 0.0) {
    const double ratio = spec.alpha * stop_tol / cstar;
    n_min = static_cast<int>(
                std::ceil(std::abs(std::log(ratio)) / std::abs(std::log(beta)))) +
            1;
  }

  SolveReport report;
  report.mesh = mesh;
  report.beta = beta;
  report.grid = simplex_grid(spec.num_types(), mesh);
  const int G = static_cast<int>(report.grid.size());

  CutEnvelope prev(S);
  for (int j = 0; j < S; ++j)
    prev.cuts[j].push_back(std::vector<double>(spec.num_types(), 0.0));
  std::vector<double> prev_vals(S * G, 0.0);

  for (int n = 0; n < opts.max_iterations; ++n) {
    std::vector<StageSaddle> results(S * G);
    const int total = S * G;
    if (opts.parallel) {
      std::exception_ptr failure;
#ifdef SMG_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
      for (int idx = 0; idx < total; ++idx) {
        try {
          results[idx] = stage_backup(report.grid[idx % G], idx / G, prev,
                                      agg, spec, opts.lp);
        } catch (...) {
          // Exceptions cannot unwind through the worksharing region.
#ifdef SMG_HAVE_OPENMP
#pragma omp critical
#endif
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
    } else {
      for (int idx = 0; idx < total; ++idx)
        results[idx] = stage_backup(report.grid[idx % G], idx / G, prev, agg,
                                    spec, opts.lp);
    }
    CutEnvelope next(S);
    std::vector<double> vals(total);
    double change = 0.0;
    for (int idx = 0; idx < total; ++idx) {
      next.add_cut(idx / G, results[idx].cut);
      // The exact iterates are nondecreasing; keeping the running max
      // removes the sub-1e-7 dips the envelope discretization introduces
      // near convergence while staying an upper approximation.
      vals[idx] = std::max(results[idx].value, prev_vals[idx]);
      change = std::max(change, std::abs(vals[idx] - prev_vals[idx]));
    }
    report.grid_values.push_back(vals);
    prev = std::move(next);
    prev_vals = std::move(vals);
    report.iterations = n + 1;
    report.last_change = change;
    if (change <= stop_tol * (1.0 - beta) && n + 1 >= n_min) {
      report.tail_bound = error_budget(n, cert, cstar, spec.alpha);
      report.envelope = opts.prune ? prune_envelope(prev, opts.lp) : prev;
      return report;
    }
  }
  throw IterationBudgetExceeded("value iteration hit the iteration cap");
}

using nlohmann::json;

std::string solution_to_json(const SolveReport& report,
                             const std::string& digest) {
  json root;
  root["spec_digest"] = digest;
  root["mesh"] = report.mesh;
  root["iterations"] = report.iterations;
  root["beta"] = report.beta;
  root["tail_bound"] = report.tail_bound;
  root["last_change"] = report.last_change;
  json cuts = json::array();
  for (const auto& state_cuts : report.envelope.cuts) cuts.push_back(state_cuts);
  root["cuts"] = cuts;
  return root.dump(2);
}

SolveReport solution_from_json(const std::string& text, std::string* digest) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object())
    throw SolutionParseError("solution file: not a JSON object");
  for (const char* key :
       {"spec_digest", "mesh", "iterations", "beta", "tail_bound",
        "last_change", "cuts"})
    if (!root.contains(key))
      throw SolutionParseError(std::string("solution file: missing \"") + key +
                               "\"");
  SolveReport report;
  if (digest) *digest = root["spec_digest"].get<std::string>();
  report.mesh = root["mesh"].get<int>();
  report.iterations = root["iterations"].get<int>();
  report.beta = root["beta"].get<double>();
  report.tail_bound = root["tail_bound"].get<double>();
  report.last_change = root["last_change"].get<double>();
  const json& cuts = root["cuts"];
  if (!cuts.is_array() || cuts.empty())
    throw SolutionParseError("solution file: cuts must be a nonempty array");
  report.envelope = CutEnvelope(static_cast<int>(cuts.size()));
  for (std::size_t j = 0; j < cuts.size(); ++j) {
    for (const auto& g : cuts[j])
      report.envelope.cuts[j].push_back(g.get<std::vector<double>>());
    if (report.envelope.cuts[j].empty())
      throw SolutionParseError("solution file: state with no cuts");
  }
  return report;
}

std::string value_csv(const SolveReport& report, const GameSpec& spec) {
  std::ostringstream out;
  out.precision(12);
  out << "belief,state,value\n";
  for (int j = 0; j < spec.num_states(); ++j)
    for (const auto& p : report.grid) {
      for (std::size_t k = 0; k < p.p.size(); ++k)
        out << (k ? ";" : "") << p.p[k];
      out << "," << spec.states[j] << "," << report.envelope.eval(p.p, j)
          << "\n";
    }
  return out.str();
}

}  // namespace smg
