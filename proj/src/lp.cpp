#include "smg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace smg {

namespace {

// Dense LU with partial pivoting.
struct Lu {
  int n = 0;
  std::vector<std::vector<double>> a;
  std::vector<std::vector<double>> orig;
  std::vector<int> perm;

  bool factor(std::vector<std::vector<double>> M) {
    n = static_cast<int>(M.size());
    orig = M;
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
      int piv = k;
      for (int i = k + 1; i < n; ++i)
        if (std::abs(M[i][k]) > std::abs(M[piv][k])) piv = i;
      if (std::abs(M[piv][k]) < 1e-13) return false;
      std::swap(M[k], M[piv]);
      std::swap(perm[k], perm[piv]);
      for (int i = k + 1; i < n; ++i) {
        const double f = M[i][k] / M[k][k];
        M[i][k] = f;
        if (f == 0.0) continue;
        for (int j = k + 1; j < n; ++j) M[i][j] -= f * M[k][j];
      }
    }
    a = std::move(M);
    return true;
  }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[perm[i]];
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= a[i][j] * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] -= a[i][j] * x[j];
      x[i] /= a[i][i];
    }
    return x;
  }

  // One pass of iterative refinement keeps residuals near machine precision
  // even when the basis is badly conditioned.
  std::vector<double> solve_refined(const std::vector<double>& rhs) const {
    std::vector<double> x = solve(rhs);
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> r(n);
      for (int i = 0; i < n; ++i) {
        double acc = rhs[i];
        for (int j = 0; j < n; ++j) acc -= orig[i][j] * x[j];
        r[i] = acc;
      }
      const std::vector<double> d = solve(r);
      for (int i = 0; i < n; ++i) x[i] += d[i];
    }
    return x;
  }
};

struct Tableau {
  int m = 0;
  int ncols = 0;
  std::vector<std::vector<double>> a;  // m x ncols
  std::vector<double> rhs;             // m
  std::vector<int> basis;              // m
  std::vector<int> row_id;             // tableau row -> internal row

  void pivot(int r, int c) {
    const double piv = a[r][c];
    for (int j = 0; j < ncols; ++j) a[r][j] /= piv;
    rhs[r] /= piv;
    a[r][c] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = a[i][c];
      if (f == 0.0) continue;
      for (int j = 0; j < ncols; ++j) a[i][j] -= f * a[r][j];
      rhs[i] -= f * rhs[r];
      a[i][c] = 0.0;
    }
    basis[r] = c;
  }

  void drop_rows(const std::vector<char>& drop) {
    int out = 0;
    for (int i = 0; i < m; ++i) {
      if (drop[i]) continue;
      if (out != i) {
        a[out] = std::move(a[i]);
        rhs[out] = rhs[i];
        basis[out] = basis[i];
        row_id[out] = row_id[i];
      }
      ++out;
    }
    m = out;
    a.resize(m);
    rhs.resize(m);
    basis.resize(m);
    row_id.resize(m);
  }
};

void reduced_costs(const Tableau& t, const std::vector<double>& cost,
                   std::vector<double>& cbar) {
  cbar = cost;
  for (int i = 0; i < t.m; ++i) {
    const double cb = cost[t.basis[i]];
    if (cb == 0.0) continue;
    for (int j = 0; j < t.ncols; ++j) cbar[j] -= cb * t.a[i][j];
  }
}

enum class RunResult { Optimal, Unbounded };

// Dantzig pricing with a Bland fallback on stalls; the tableau is rebuilt
// from original data every few dozen pivots to shed accumulated round-off.
RunResult run_simplex(Tableau& t, const std::vector<double>& cost,
                      const std::vector<char>& may_enter, double pivot_tol,
                      const std::function<void(Tableau&)>& refactor) {
  std::vector<double> cbar;
  const long stall_limit = 50L * (t.m + t.ncols + 10);
  const long hard_limit = 40 * stall_limit;
  long iter = 0;
  bool just_refreshed = false;
  while (true) {
    reduced_costs(t, cost, cbar);
    int enter = -1;
    if (iter < stall_limit) {
      double best = pivot_tol;
      for (int j = 0; j < t.ncols; ++j)
        if (may_enter[j] && cbar[j] > best) {
          best = cbar[j];
          enter = j;
        }
    } else {
      for (int j = 0; j < t.ncols; ++j)
        if (may_enter[j] && cbar[j] > pivot_tol) {
          enter = j;
          break;
        }
    }
    if (enter < 0) return RunResult::Optimal;
    // Ratio test on rhs clamped at zero (degenerate pivots can leave tiny
    // negative residue), skipping near-zero pivot elements unless nothing
    // larger exists. Among tied ratios the largest pivot element wins for
    // stability, then the smallest basis index for determinism.
    int leave = -1;
    double best_ratio = 0.0;
    for (double entry_tol : {1e-6, pivot_tol}) {
      for (int i = 0; i < t.m; ++i) {
        const double a = t.a[i][enter];
        if (a <= entry_tol) continue;
        const double ratio = std::max(t.rhs[i], 0.0) / a;
        if (leave < 0 || ratio < best_ratio - 1e-12) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio < best_ratio + 1e-12 &&
                   (a > t.a[leave][enter] + 1e-12 ||
                    (a > t.a[leave][enter] - 1e-12 &&
                     t.basis[i] < t.basis[leave]))) {
          leave = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      if (leave >= 0) break;
    }
    if (leave < 0) return RunResult::Unbounded;
    // A basic value a hair below zero would be amplified by a small pivot
    // element; refresh the tableau once if the drift is visible, otherwise
    // zero it out before pivoting.
    if (t.rhs[leave] < -1e-9 && !just_refreshed) {
      refactor(t);
      just_refreshed = true;
      continue;
    }
    if (t.rhs[leave] < 0.0) t.rhs[leave] = 0.0;
    t.pivot(leave, enter);
    just_refreshed = false;
    ++iter;
    if (iter > hard_limit)
      throw NumericalFailure("simplex iteration limit hit");
    if (iter % 30 == 0) refactor(t);
  }
}

struct VarPiece {
  int col;
  double coef;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol) {
  const int nvar = static_cast<int>(lp.objective.size());
  const int n_user_rows = static_cast<int>(lp.rows.size());
  LpSolution sol;

  for (int j = 0; j < nvar; ++j)
    if (lp.lower[j] > lp.upper[j]) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }

  // Variable transformation to nonnegative columns: shifted when the lower
  // bound is finite, negated when only the upper bound is, split when free.
  // Finite two-sided bounds become an extra internal row.
  std::vector<std::vector<VarPiece>> pieces(nvar);
  std::vector<double> shift(nvar, 0.0);
  std::vector<double> col_cost;
  struct BoundRow {
    int var_col;
    double rhs;
  };
  std::vector<BoundRow> bound_rows;
  for (int j = 0; j < nvar; ++j) {
    if (lp.lower[j] > -kInf) {
      const int c = static_cast<int>(col_cost.size());
      col_cost.push_back(lp.objective[j]);
      pieces[j] = {{c, 1.0}};
      shift[j] = lp.lower[j];
      if (lp.upper[j] < kInf)
        bound_rows.push_back({c, lp.upper[j] - lp.lower[j]});
    } else if (lp.upper[j] < kInf) {
      const int c = static_cast<int>(col_cost.size());
      col_cost.push_back(-lp.objective[j]);
      pieces[j] = {{c, -1.0}};
      shift[j] = lp.upper[j];
    } else {
      const int cp = static_cast<int>(col_cost.size());
      col_cost.push_back(lp.objective[j]);
      col_cost.push_back(-lp.objective[j]);
      pieces[j] = {{cp, 1.0}, {cp + 1, -1.0}};
    }
  }
  const int n_struct = static_cast<int>(col_cost.size());
  double obj_constant = 0.0;
  for (int j = 0; j < nvar; ++j) obj_constant += lp.objective[j] * shift[j];

  const int m = n_user_rows + static_cast<int>(bound_rows.size());
  std::vector<std::vector<double>> row_a(m, std::vector<double>(n_struct, 0.0));
  std::vector<double> row_b(m, 0.0);
  std::vector<char> row_eq(m, 0);
  std::vector<double> row_sign(m, 1.0);
  for (int r = 0; r < n_user_rows; ++r) {
    const LpRow& row = lp.rows[r];
    double b = row.rhs;
    for (int j = 0; j < nvar; ++j) {
      const double a = row.coeffs[j];
      if (a == 0.0) continue;
      b -= a * shift[j];
      for (const auto& pc : pieces[j]) row_a[r][pc.col] += a * pc.coef;
    }
    row_b[r] = b;
    row_eq[r] = row.relation == LpRelation::Equal;
  }
  for (std::size_t n = 0; n < bound_rows.size(); ++n) {
    const int r = n_user_rows + static_cast<int>(n);
    row_a[r][bound_rows[n].var_col] = 1.0;
    row_b[r] = bound_rows[n].rhs;
  }
  std::vector<char> row_ge(m, 0);
  for (int r = 0; r < m; ++r)
    if (row_b[r] < 0.0) {
      row_sign[r] = -1.0;
      row_b[r] = -row_b[r];
      for (double& a : row_a[r]) a = -a;
      if (!row_eq[r]) row_ge[r] = 1;
    }

  // Logical columns: slack for <=, surplus + artificial for >=, artificial
  // for =.
  Tableau t;
  t.m = m;
  std::vector<char> is_artificial(n_struct, 0);
  int ncols = n_struct;
  std::vector<std::pair<int, std::pair<int, double>>> logicals;
  t.basis.assign(m, -1);
  for (int r = 0; r < m; ++r) {
    if (row_ge[r]) {
      logicals.push_back({r, {ncols, -1.0}});
      is_artificial.push_back(0);
      ++ncols;
    }
    logicals.push_back({r, {ncols, 1.0}});
    is_artificial.push_back(row_eq[r] || row_ge[r]);
    t.basis[r] = ncols++;
  }
  t.ncols = ncols;
  t.a.assign(m, std::vector<double>(ncols, 0.0));
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < n_struct; ++j) t.a[r][j] = row_a[r][j];
  for (const auto& lg : logicals) t.a[lg.first][lg.second.first] = lg.second.second;
  t.rhs = row_b;
  t.row_id.resize(m);
  for (int r = 0; r < m; ++r) t.row_id[r] = r;

  std::vector<std::pair<int, double>> logical_of(ncols, {-1, 0.0});
  for (const auto& lg : logicals)
    logical_of[lg.second.first] = {lg.first, lg.second.second};
  auto col_coeff = [&](int col, int internal_row) -> double {
    if (col < n_struct) return row_a[internal_row][col];
    return logical_of[col].first == internal_row ? logical_of[col].second : 0.0;
  };
  auto factor_basis = [&](const Tableau& tt, Lu& lu) {
    std::vector<std::vector<double>> B(tt.m, std::vector<double>(tt.m));
    for (int i = 0; i < tt.m; ++i)
      for (int c = 0; c < tt.m; ++c)
        B[i][c] = col_coeff(tt.basis[c], tt.row_id[i]);
    if (!lu.factor(std::move(B)))
      throw NumericalFailure("basis matrix is singular");
  };
  auto refactor = [&](Tableau& tt) {
    Lu lu;
    factor_basis(tt, lu);
    std::vector<double> col(tt.m);
    for (int j = 0; j < tt.ncols; ++j) {
      for (int i = 0; i < tt.m; ++i) col[i] = col_coeff(j, tt.row_id[i]);
      const std::vector<double> solved = lu.solve(col);
      for (int i = 0; i < tt.m; ++i) tt.a[i][j] = solved[i];
    }
    for (int i = 0; i < tt.m; ++i) col[i] = row_b[tt.row_id[i]];
    tt.rhs = lu.solve_refined(col);
    for (int i = 0; i < tt.m; ++i)
      if (tt.rhs[i] < 0.0) tt.rhs[i] = 0.0;
  };

  std::vector<char> may_enter(ncols, 1);
  bool any_artificial =
      std::find(is_artificial.begin(), is_artificial.end(), char(1)) !=
      is_artificial.end();
  if (any_artificial) {
    std::vector<double> phase1_cost(ncols, 0.0);
    for (int j = 0; j < ncols; ++j)
      if (is_artificial[j]) phase1_cost[j] = -1.0;
    run_simplex(t, phase1_cost, may_enter, tol.pivot, refactor);
    refactor(t);
    double infeas = 0.0;
    for (int i = 0; i < t.m; ++i)
      if (is_artificial[t.basis[i]]) infeas += t.rhs[i];
    if (infeas > tol.feasibility) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive remaining basic artificials out; rows where no pivot exists are
    // redundant combinations of the others and are removed (dual 0).
    std::vector<char> drop(t.m, 0);
    for (int i = 0; i < t.m; ++i) {
      if (!is_artificial[t.basis[i]]) continue;
      int enter = -1;
      for (int j = 0; j < ncols && enter < 0; ++j)
        if (!is_artificial[j] && std::abs(t.a[i][j]) > 1e-7) enter = j;
      if (enter >= 0)
        t.pivot(i, enter);
      else
        drop[i] = 1;
    }
    t.drop_rows(drop);
    refactor(t);
  }

  for (int j = 0; j < ncols; ++j) may_enter[j] = !is_artificial[j];
  std::vector<double> cost2(ncols, 0.0);
  for (int j = 0; j < n_struct; ++j) cost2[j] = col_cost[j];
  if (run_simplex(t, cost2, may_enter, tol.pivot, refactor) ==
      RunResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  // The pivot path is only a heuristic once round-off clamps have fired;
  // certify the terminal basis against original data and repair it. An
  // exactly rebuilt tableau that is primal infeasible but dual feasible is
  // fixed by dual simplex steps; one that lost optimality gets another
  // primal pass. Alternate until both hold.
  {
    auto exact_refresh = [&](Tableau& tt) {
      Lu lu2;
      factor_basis(tt, lu2);
      std::vector<double> col(tt.m);
      for (int j = 0; j < tt.ncols; ++j) {
        for (int i = 0; i < tt.m; ++i) col[i] = col_coeff(j, tt.row_id[i]);
        const std::vector<double> solved = lu2.solve_refined(col);
        for (int i = 0; i < tt.m; ++i) tt.a[i][j] = solved[i];
      }
      for (int i = 0; i < tt.m; ++i) col[i] = row_b[tt.row_id[i]];
      tt.rhs = lu2.solve_refined(col);
    };
    auto dual_pass = [&]() {
      std::vector<double> cbar;
      for (int round = 0;; ++round) {
        if (round == 300)
          throw NumericalFailure("dual simplex repair did not converge");
        int leave = -1;
        double worst = -1e-11;
        for (int i = 0; i < t.m; ++i)
          if (t.rhs[i] < worst) {
            worst = t.rhs[i];
            leave = i;
          }
        if (leave < 0) return;
        reduced_costs(t, cost2, cbar);
        int enter = -1;
        double best = 0.0;
        for (int j = 0; j < t.ncols; ++j) {
          if (is_artificial[j]) continue;
          const double a = t.a[leave][j];
          if (a >= -tol.pivot) continue;
          const double ratio = std::max(-cbar[j], 0.0) / (-a);
          if (enter < 0 || ratio < best - 1e-12 ||
              (ratio < best + 1e-12 && a < t.a[leave][enter])) {
            enter = j;
            best = ratio;
          }
        }
        if (enter < 0)
          throw NumericalFailure("dual simplex repair found no pivot");
        t.pivot(leave, enter);
        exact_refresh(t);
      }
    };
    std::vector<double> cbar;
    bool clean = false;
    for (int outer = 0; outer < 25 && !clean; ++outer) {
      exact_refresh(t);
      double worst = 0.0;
      for (int i = 0; i < t.m; ++i) worst = std::min(worst, t.rhs[i]);
      if (worst < -1e-11) {
        dual_pass();
        continue;
      }
      reduced_costs(t, cost2, cbar);
      bool optimal = true;
      for (int j = 0; j < t.ncols && optimal; ++j)
        if (may_enter[j] && cbar[j] > tol.pivot) optimal = false;
      if (!optimal) {
        if (run_simplex(t, cost2, may_enter, tol.pivot, refactor) ==
            RunResult::Unbounded) {
          sol.status = LpStatus::Unbounded;
          return sol;
        }
        continue;
      }
      clean = true;
    }
    if (!clean)
      throw NumericalFailure("simplex did not reach a certified optimum");
  }

  // Recompute primal values and duals from original data on the final
  // basis, so pivot round-off never reaches the reported solution.
  Lu lu;
  factor_basis(t, lu);
  const int mb = t.m;
  std::vector<double> rhs_b(mb), cost_bt(mb);
  for (int i = 0; i < mb; ++i) rhs_b[i] = row_b[t.row_id[i]];
  const std::vector<double> u_b = lu.solve_refined(rhs_b);
  // Duals solve B^T y = c_B; reuse the factorization of B by transposing
  // the whole system instead: factor B^T directly (cheap at these sizes).
  {
    std::vector<std::vector<double>> Bt(mb, std::vector<double>(mb));
    for (int i = 0; i < mb; ++i)
      for (int c = 0; c < mb; ++c)
        Bt[c][i] = col_coeff(t.basis[c], t.row_id[i]);
    Lu lut;
    if (!lut.factor(std::move(Bt)))
      throw NumericalFailure("basis matrix is singular");
    for (int i = 0; i < mb; ++i) cost_bt[i] = cost2[t.basis[i]];
    cost_bt = lut.solve_refined(cost_bt);
  }
  const std::vector<double>& y = cost_bt;

  std::vector<double> u(n_struct, 0.0);
  double value = 0.0;
  for (int i = 0; i < mb; ++i) {
    value += cost2[t.basis[i]] * u_b[i];
    if (t.basis[i] < n_struct) u[t.basis[i]] = u_b[i];
  }
  sol.x.assign(nvar, 0.0);
  for (int j = 0; j < nvar; ++j) {
    double v = shift[j];
    for (const auto& pc : pieces[j]) v += pc.coef * u[pc.col];
    sol.x[j] = v;
  }
  std::vector<double> internal_duals(m, 0.0);
  for (int i = 0; i < mb; ++i) internal_duals[t.row_id[i]] = y[i];
  sol.duals.assign(n_user_rows, 0.0);
  for (int r = 0; r < n_user_rows; ++r)
    sol.duals[r] = internal_duals[r] * row_sign[r];
  sol.objective = value + obj_constant;
  sol.status = LpStatus::Optimal;

  // Invariant checks: primal feasibility against the caller's rows and
  // bounds, dual feasibility of the refreshed basis, strong duality.
  for (int r = 0; r < n_user_rows; ++r) {
    double lhs = 0.0;
    double scale = std::abs(lp.rows[r].rhs);
    for (int j = 0; j < nvar; ++j) {
      lhs += lp.rows[r].coeffs[j] * sol.x[j];
      scale += std::abs(lp.rows[r].coeffs[j] * sol.x[j]);
    }
    const double slack = lp.rows[r].rhs - lhs;
    const double allow = tol.feasibility * (1.0 + scale);
    const bool ok = lp.rows[r].relation == LpRelation::Equal
                        ? std::abs(slack) <= allow
                        : slack >= -allow;
    if (!ok) throw NumericalFailure("lp solution violates row feasibility");
  }
  for (int j = 0; j < nvar; ++j) {
    const double allow = tol.feasibility * (1.0 + std::abs(sol.x[j]));
    if (sol.x[j] < lp.lower[j] - allow || sol.x[j] > lp.upper[j] + allow)
      throw NumericalFailure("lp solution violates variable bounds");
  }
  for (int j = 0; j < ncols; ++j) {
    if (is_artificial[j]) continue;
    double cb = cost2[j];
    for (int i = 0; i < mb; ++i) cb -= y[i] * col_coeff(j, t.row_id[i]);
    if (cb > tol.duality_gap * (1.0 + std::abs(value)))
      throw NumericalFailure("final basis is not dual feasible");
  }
  double dual_obj = 0.0;
  for (int r = 0; r < m; ++r) dual_obj += internal_duals[r] * row_b[r];
  if (std::abs(dual_obj - value) > tol.duality_gap * (1.0 + std::abs(value)))
    throw NumericalFailure("lp duality gap exceeds tolerance");

  return sol;
}

MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& M,
                                     const LpTolerances& tol) {
  const int rows = static_cast<int>(M.size());
  const int cols = static_cast<int>(M[0].size());
  LinearProgram lp;
  for (int r = 0; r < rows; ++r) lp.add_variable(0.0, 0.0, kInf);
  const int v = lp.add_variable(1.0, -kInf, kInf);
  for (int c = 0; c < cols; ++c) {
    LpRow row;
    row.coeffs.assign(rows + 1, 0.0);
    for (int r = 0; r < rows; ++r) row.coeffs[r] = -M[r][c];
    row.coeffs[v] = 1.0;
    row.relation = LpRelation::LessEqual;
    row.rhs = 0.0;
    lp.rows.push_back(row);
  }
  LpRow mass;
  mass.coeffs.assign(rows + 1, 0.0);
  for (int r = 0; r < rows; ++r) mass.coeffs[r] = 1.0;
  mass.relation = LpRelation::Equal;
  mass.rhs = 1.0;
  lp.rows.push_back(mass);

  LpSolution s = solve_lp(lp, tol);
  if (s.status != LpStatus::Optimal)
    throw NumericalFailure("matrix game lp did not solve to optimality");
  MatrixGameSolution out;
  out.value = s.objective;
  out.row_mix.assign(s.x.begin(), s.x.begin() + rows);
  out.col_mix.assign(s.duals.begin(), s.duals.begin() + cols);
  for (double& x : out.row_mix) x = std::max(0.0, x);
  for (double& y2 : out.col_mix) y2 = std::max(0.0, y2);
  double sr = 0.0, sc = 0.0;
  for (double x : out.row_mix) sr += x;
  for (double y2 : out.col_mix) sc += y2;
  for (double& x : out.row_mix) x /= sr;
  for (double& y2 : out.col_mix) y2 /= sc;
  return out;
}

}  // namespace smg
