#pragma once

#include <functional>
#include <optional>

#include "fibo/interp.hpp"
#include "fibo/problem.hpp"

namespace fibo {

struct BallConstraint {
  Vector center;
  double radius = 0.0;
};

/// A smooth constrained minimization instance with available derivatives.
/// The optional ball is handled internally as the scaled inequality
/// ||(x - center)/radius||^2 - 1 <= 0.
struct NlpSpec {
  int dim = 0;
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> gradient;
  int n_eq = 0, n_ineq = 0;
  std::function<Vector(const Vector&)> eq, ineq;
  std::function<Matrix(const Vector&)> eq_jac, ineq_jac;
  std::optional<BallConstraint> ball;
  Vector start;
  // Optional multiplier warm start; mu0 includes the ball multiplier last.
  Vector lambda0, mu0;
};

enum class NlpStatus { Optimal, FeasibleProgress, MaxIter, Infeasible };

struct NlpResult {
  Vector x;
  double f = 0.0;
  double feas_err = 0.0;
  NlpStatus status = NlpStatus::MaxIter;
  int outer_iters = 0;
  int inner_iters = 0;
  long c_evals = 0;
  bool xtol_stop = false;
  Vector lambda, mu;
};

struct NlpOptions {
  double rho0 = 10.0;
  double tol_feas = 1e-8;
  double tol_kkt = 1e-6;
  int max_outer = 50;
  int max_inner = 200;
  int lbfgs_memory = 0;  // 0: full BFGS up to dim 50, memory 10 above
  double xtol = 0.0;     // > 0: stop once an accepted step falls below it
  double mu_cap = 1e12;
  double rho_cap = 1e12;
  // Invoked at every accepted inner iterate with (x, objective value).
  std::function<void(const Vector&, double)> iterate_observer;
};

NlpResult solve_nlp(const NlpSpec& spec, const NlpOptions& opts = {});

/// Augmented Lagrangian assembly, exposed for derivative checks. `mu`
/// includes the ball multiplier as its last entry when the spec has a ball.
double aug_lagrangian_value(const NlpSpec& spec, const Vector& x,
                            const Vector& lambda, const Vector& mu, double rho);
Vector aug_lagrangian_grad(const NlpSpec& spec, const Vector& x,
                           const Vector& lambda, const Vector& mu, double rho);

struct SubproblemResult {
  Vector step;
  int iters = 0;
  long c_evals = 0;
  Vector lambda, mu;  // for warm starting the next call
};

/// Solves the trust-region step subproblem: minimize the quadratic model over
/// steps keeping x_k + s feasible for the problem constraints and ||s|| <=
/// delta. Constraint evaluations tick the problem ledger. Throws NoProgress
/// when the result violates the feasibility, ball, or model-decrease
/// contracts.
SubproblemResult solve_tr_subproblem(const QuadraticModel& model,
                                     const ConstrainedProblem& problem,
                                     const Vector& x_k, double delta,
                                     EvalLedger& ledger,
                                     const Vector& lambda0 = Vector(),
                                     const Vector& mu0 = Vector());

/// Computes a feasible point by minimizing zero subject to the problem
/// constraints. Returns x0 unchanged (one constraint evaluation) when it is
/// already feasible. Throws Infeasible on failure.
Vector find_feasible(const ConstrainedProblem& problem, const Vector& x0,
                     EvalLedger& ledger);

}  // namespace fibo
