#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace smg {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LpRelation { LessEqual, Equal };

struct LpRow {
  std::vector<double> coeffs;
  LpRelation relation = LpRelation::LessEqual;
  double rhs = 0.0;
};

// Maximization over variables with individual bounds (+-inf allowed).
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;  // same length as objective
  std::vector<double> upper;
  std::vector<LpRow> rows;

  int add_variable(double obj, double lo, double hi) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    return static_cast<int>(objective.size()) - 1;
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;  // one per row; >= 0 on binding <= rows
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LpTolerances {
  double pivot = 1e-9;
  double feasibility = 1e-8;
  double duality_gap = 1e-7;
};

// Dense two-phase primal simplex, Dantzig pricing with a Bland fallback.
// Deterministic; verifies feasibility and strong duality on every Optimal
// result and throws NumericalFailure when the checks fail.
LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol = {});

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_mix;
  std::vector<double> col_mix;
};

// Value and optimal mixes of the zero-sum game M, row player maximizing.
MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& M,
                                     const LpTolerances& tol = {});

}  // namespace smg
