#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fibo/errors.hpp"

namespace fibo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A constrained test problem with a black-box objective and analytic
/// constraint derivatives. Constraint rows are ordered with all equality
/// constraints first, then all inequalities (c_i(x) <= 0). Simple bounds are
/// folded into the inequality block so the solvers see one uniform interface.
struct ConstrainedProblem {
  std::string name;
  int n = 0;
  std::vector<int> eq_indices;
  std::vector<int> ineq_indices;
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> constraints;
  std::function<Matrix(const Vector&)> jacobian;
  Vector x0;
  std::optional<double> f_star;   // reference optimum
  std::optional<double> f_table;  // reference final objective for FIBO
  std::optional<Vector> x_opt;    // catalogued optimizer, when known in closed form

  int num_constraints() const {
    return static_cast<int>(eq_indices.size() + ineq_indices.size());
  }
};

/// Per-run evaluation counters. Counters only ever increase; f_cap < 0 means
/// no budget is enforced.
struct EvalLedger {
  long f_evals = 0;
  long c_evals = 0;
  long jac_evals = 0;
  double wall_time = 0.0;
  long f_cap = -1;
};

double eval_f(const ConstrainedProblem& problem, EvalLedger& ledger, const Vector& x);
Vector eval_c(const ConstrainedProblem& problem, EvalLedger& ledger, const Vector& x);
Matrix eval_jac(const ConstrainedProblem& problem, EvalLedger& ledger, const Vector& x);

/// Infinity-norm constraint violation: max over |c_i| for equalities and
/// max(0, c_i) for inequalities. Diagnostic path, does not touch any ledger.
double feasibility_error(const ConstrainedProblem& problem, const Vector& x);

/// Looks up a problem in the compiled-in catalogue. Throws UnknownProblem.
ConstrainedProblem get_problem(const std::string& name);

/// Catalogue names in canonical order.
const std::vector<std::string>& catalogue_names();

/// Parses a plain-text manifest of `name=f_star` lines (used to override the
/// compiled-in reference optima from the CLI).
std::map<std::string, double> load_fstar_overrides(const std::string& path);

}  // namespace fibo
