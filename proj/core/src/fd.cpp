#include "fibo/fd.hpp"

#include <chrono>
#include <memory>

namespace fibo {

Vector fd_gradient(const ConstrainedProblem& problem, EvalLedger& ledger,
                   const Vector& x, double f_x, double h_scale) {
  const int n = problem.n;
  Vector g(n);
  for (int i = 0; i < n; ++i) {
    const double h = h_scale * std::max(1.0, std::abs(x[i]));
    Vector xp = x;
    xp[i] += h;
    g[i] = (eval_f(problem, ledger, xp) - f_x) / h;
  }
  return g;
}

RunResult fd_solve(const ConstrainedProblem& problem, const FdOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  RunResult res;
  res.ledger.f_cap = static_cast<long>(opts.max_fevals_factor) *
                     std::max(problem.num_constraints(), problem.n);

  // Value cache so the gradient path reuses the objective value computed at
  // the same point by the line search.
  struct FCache {
    Vector x;
    double f = 0.0;
    bool valid = false;
  };
  auto cache = std::make_shared<FCache>();

  NlpSpec spec;
  spec.dim = problem.n;
  spec.objective = [&problem, &res, cache](const Vector& x) {
    const double f = eval_f(problem, res.ledger, x);
    cache->x = x;
    cache->f = f;
    cache->valid = true;
    return f;
  };
  if (opts.gradient_override) {
    spec.gradient = opts.gradient_override;
  } else {
    spec.gradient = [&problem, &res, cache, h = opts.h_scale](const Vector& x) {
      const double f_x = (cache->valid && cache->x == x)
                             ? cache->f
                             : eval_f(problem, res.ledger, x);
      return fd_gradient(problem, res.ledger, x, f_x, h);
    };
  }

  const int n_eq = static_cast<int>(problem.eq_indices.size());
  const int n_ineq = static_cast<int>(problem.ineq_indices.size());
  spec.n_eq = n_eq;
  spec.n_ineq = n_ineq;
  struct CCache {
    Vector x_vals, c;
    Vector x_jac;
    Matrix J;
  };
  auto cc = std::make_shared<CCache>();
  auto values = [&problem, &res, cc](const Vector& x) -> const Vector& {
    if (cc->x_vals.size() == 0 || x != cc->x_vals) {
      cc->c = eval_c(problem, res.ledger, x);
      cc->x_vals = x;
    }
    return cc->c;
  };
  auto jac = [&problem, &res, cc](const Vector& x) -> const Matrix& {
    if (cc->x_jac.size() == 0 || x != cc->x_jac) {
      cc->J = eval_jac(problem, res.ledger, x);
      cc->x_jac = x;
    }
    return cc->J;
  };
  if (n_eq > 0) {
    spec.eq = [values, &problem, n_eq](const Vector& x) {
      const Vector& c = values(x);
      Vector out(n_eq);
      for (int i = 0; i < n_eq; ++i) out[i] = c[problem.eq_indices[static_cast<size_t>(i)]];
      return out;
    };
    spec.eq_jac = [jac, &problem, n_eq](const Vector& x) {
      const Matrix& J = jac(x);
      Matrix out(n_eq, J.cols());
      for (int i = 0; i < n_eq; ++i) out.row(i) = J.row(problem.eq_indices[static_cast<size_t>(i)]);
      return out;
    };
  }
  if (n_ineq > 0) {
    spec.ineq = [values, &problem, n_ineq](const Vector& x) {
      const Vector& c = values(x);
      Vector out(n_ineq);
      for (int i = 0; i < n_ineq; ++i)
        out[i] = c[problem.ineq_indices[static_cast<size_t>(i)]];
      return out;
    };
    spec.ineq_jac = [jac, &problem, n_ineq](const Vector& x) {
      const Matrix& J = jac(x);
      Matrix out(n_ineq, J.cols());
      for (int i = 0; i < n_ineq; ++i)
        out.row(i) = J.row(problem.ineq_indices[static_cast<size_t>(i)]);
      return out;
    };
  }
  spec.start = problem.x0;

  NlpOptions nlp_opts;
  nlp_opts.lbfgs_memory = opts.lbfgs_memory;
  nlp_opts.xtol = opts.xtol;
  nlp_opts.max_outer = 100;
  Vector prev_x = problem.x0;
  nlp_opts.iterate_observer = [&](const Vector& x, double f) {
    IterateRecord rec;
    rec.k = static_cast<int>(res.history.size());
    rec.x = x;
    rec.f = f;
    rec.step_norm = (x - prev_x).norm();
    rec.accepted = true;
    rec.feas_err = feasibility_error(problem, x);
    rec.f_evals_so_far = res.ledger.f_evals;
    rec.c_evals_so_far = res.ledger.c_evals;
    res.history.push_back(rec);
    prev_x = x;
  };

  Termination why = Termination::IterBudget;
  Vector x_final = problem.x0;
  double f_final = 0.0, feas_final = 0.0;
  try {
    const NlpResult nres = solve_nlp(spec, nlp_opts);
    x_final = nres.x;
    f_final = nres.f;
    feas_final = nres.feas_err;
    why = (nres.xtol_stop || nres.status == NlpStatus::Optimal)
              ? Termination::Xtol
              : Termination::IterBudget;
  } catch (const EvalBudgetExceeded&) {
    why = Termination::EvalBudget;
    if (!res.history.empty()) {
      const auto& last = res.history.back();
      x_final = last.x;
      f_final = last.f;
      feas_final = last.feas_err;
    } else {
      x_final = problem.x0;
      f_final = problem.objective(x_final);
      feas_final = feasibility_error(problem, x_final);
    }
  }

  res.x_final = x_final;
  res.f_final = f_final;
  res.feas_final = feas_final;
  res.termination = why;
  res.iters = static_cast<int>(res.history.size());
  res.ledger.wall_time = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t_start)
                             .count();
  return res;
}

}  // namespace fibo
