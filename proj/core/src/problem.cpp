#include "fibo/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fibo {

namespace {
void check_dim(const ConstrainedProblem& problem, const Vector& x) {
  if (x.size() != problem.n) throw DimensionMismatch(problem.n, x.size());
}
}  // namespace

double eval_f(const ConstrainedProblem& problem, EvalLedger& ledger, const Vector& x) {
  check_dim(problem, x);
  if (ledger.f_cap >= 0 && ledger.f_evals >= ledger.f_cap)
    throw EvalBudgetExceeded(ledger.f_cap);
  ++ledger.f_evals;
  return problem.objective(x);
}

Vector eval_c(const ConstrainedProblem& problem, EvalLedger& ledger, const Vector& x) {
  check_dim(problem, x);
  ++ledger.c_evals;
  if (problem.num_constraints() == 0) return Vector(0);
  return problem.constraints(x);
}

Matrix eval_jac(const ConstrainedProblem& problem, EvalLedger& ledger, const Vector& x) {
  check_dim(problem, x);
  ++ledger.jac_evals;
  if (problem.num_constraints() == 0) return Matrix(0, problem.n);
  return problem.jacobian(x);
}

double feasibility_error(const ConstrainedProblem& problem, const Vector& x) {
  check_dim(problem, x);
  if (problem.num_constraints() == 0) return 0.0;
  const Vector c = problem.constraints(x);
  double err = 0.0;
  for (int i : problem.eq_indices) err = std::max(err, std::abs(c[i]));
  for (int i : problem.ineq_indices) err = std::max(err, c[i]);
  return std::max(err, 0.0);
}

std::map<std::string, double> load_fstar_overrides(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open f_star manifest: " + path);
  std::map<std::string, double> out;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("malformed manifest line: " + line);
    out[trim(line.substr(0, eq))] = std::stod(line.substr(eq + 1));
  }
  return out;
}

}  // namespace fibo
