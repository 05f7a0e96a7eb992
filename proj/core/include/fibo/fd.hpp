#pragma once

#include <cmath>

#include "fibo/driver.hpp"

namespace fibo {

struct FdOptions {
  double h_scale = std::sqrt(2.220446049250313e-16);  // sqrt(machine epsilon)
  double xtol = 1e-8;
  int max_fevals_factor = 500;
  int lbfgs_memory = 10;
  // Test hook: when set, replaces the forward-difference objective gradient.
  std::function<Vector(const Vector&)> gradient_override;
};

/// Forward-difference objective gradient, reusing the already computed f(x).
/// Costs exactly n additional objective evaluations.
Vector fd_gradient(const ConstrainedProblem& problem, EvalLedger& ledger,
                   const Vector& x, double f_x, double h_scale);

/// The comparator: the embedded NLP solver applied directly to the problem
/// with forward-difference objective gradients and exact constraint
/// derivatives. Starts from problem.x0 as given, without a feasibility phase.
RunResult fd_solve(const ConstrainedProblem& problem, const FdOptions& opts = {});

}  // namespace fibo
