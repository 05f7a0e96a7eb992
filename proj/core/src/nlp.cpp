#include "fibo/nlp.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <memory>

namespace fibo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ball_value(const BallConstraint& ball, const Vector& x) {
  const Vector d = (x - ball.center) / ball.radius;
  return d.squaredNorm() - 1.0;
}

Vector ball_grad(const BallConstraint& ball, const Vector& x) {
  return 2.0 * (x - ball.center) / (ball.radius * ball.radius);
}

// Inequality vector with the ball row appended last.
Vector ineq_all(const NlpSpec& spec, const Vector& x) {
  const int ni = spec.n_ineq + (spec.ball ? 1 : 0);
  Vector c(ni);
  if (spec.n_ineq > 0) c.head(spec.n_ineq) = spec.ineq(x);
  if (spec.ball) c[ni - 1] = ball_value(*spec.ball, x);
  return c;
}

Matrix ineq_jac_all(const NlpSpec& spec, const Vector& x) {
  const int ni = spec.n_ineq + (spec.ball ? 1 : 0);
  Matrix J(ni, spec.dim);
  if (spec.n_ineq > 0) J.topRows(spec.n_ineq) = spec.ineq_jac(x);
  if (spec.ball) J.row(ni - 1) = ball_grad(*spec.ball, x).transpose();
  return J;
}

double violation(const NlpSpec& spec, const Vector& ce, const Vector& ci) {
  double v = 0.0;
  (void)spec;
  for (long i = 0; i < ce.size(); ++i) v = std::max(v, std::abs(ce[i]));
  for (long i = 0; i < ci.size(); ++i) v = std::max(v, ci[i]);
  return v;
}

double al_from_parts(double f, const Vector& ce, const Vector& ci,
                     const Vector& lambda, const Vector& mu, double rho) {
  double al = f;
  for (long i = 0; i < ce.size(); ++i)
    al += lambda[i] * ce[i] + 0.5 * rho * ce[i] * ce[i];
  for (long i = 0; i < ci.size(); ++i) {
    const double t = std::max(0.0, ci[i] + mu[i] / rho);
    al += 0.5 * rho * t * t - mu[i] * mu[i] / (2.0 * rho);
  }
  return al;
}

// Point-wise evaluation cache. One objective tick and one constraint tick per
// distinct point; the gradient path reuses cached constraint values.
struct Evaluator {
  const NlpSpec& spec;
  long c_evals = 0;
  Vector x;
  bool has_values = false, has_derivs = false;
  double f = 0.0;
  Vector ce, ci;
  Vector gradf;
  Matrix Je, Ji;

  explicit Evaluator(const NlpSpec& s) : spec(s) {}

  void values_at(const Vector& p) {
    if (has_values && p == x) return;
    x = p;
    has_values = false;
    has_derivs = false;
    f = spec.objective(p);
    if (spec.n_eq > 0) ce = spec.eq(p); else ce = Vector(0);
    ci = ineq_all(spec, p);
    if (spec.n_eq + spec.n_ineq > 0) ++c_evals;
    has_values = true;
  }

  void derivs_at(const Vector& p) {
    values_at(p);
    if (has_derivs) return;
    gradf = spec.gradient(p);
    if (spec.n_eq > 0) Je = spec.eq_jac(p); else Je = Matrix(0, spec.dim);
    Ji = ineq_jac_all(spec, p);
    has_derivs = true;
  }
};

Vector al_grad_from_parts(const Evaluator& ev, const Vector& lambda,
                          const Vector& mu, double rho) {
  Vector g = ev.gradf;
  for (long i = 0; i < ev.ce.size(); ++i)
    g += (lambda[i] + rho * ev.ce[i]) * ev.Je.row(i).transpose();
  for (long i = 0; i < ev.ci.size(); ++i) {
    const double coef = std::max(0.0, mu[i] + rho * ev.ci[i]);
    if (coef > 0) g += coef * ev.Ji.row(i).transpose();
  }
  return g;
}

struct InnerOutcome {
  int iters = 0;
  bool xtol_hit = false;
};

// Quasi-Newton minimization of the augmented Lagrangian with Armijo
// backtracking. Leaves the evaluator positioned at the final point.
InnerOutcome minimize_al(Evaluator& ev, Vector& xcur, const Vector& lambda,
                         const Vector& mu, double rho, double gtol,
                         const NlpOptions& opts) {
  const int n = static_cast<int>(xcur.size());
  const bool limited = opts.lbfgs_memory > 0 || n > 50;
  const int mem = opts.lbfgs_memory > 0 ? opts.lbfgs_memory : 10;

  Matrix Hinv = Matrix::Identity(n, n);
  std::deque<std::pair<Vector, Vector>> pairs;  // (s, y) for L-BFGS
  double gamma = 1.0;

  ev.derivs_at(xcur);
  double al = al_from_parts(ev.f, ev.ce, ev.ci, lambda, mu, rho);
  Vector g = al_grad_from_parts(ev, lambda, mu, rho);

  InnerOutcome out;
  bool first = true;
  for (int it = 0; it < opts.max_inner; ++it) {
    if (!g.allFinite()) break;
    if (g.lpNorm<Eigen::Infinity>() <= gtol) break;

    Vector d;
    if (limited) {
      // Two-loop recursion.
      Vector q = g;
      std::vector<double> alpha(pairs.size());
      for (long i = static_cast<long>(pairs.size()) - 1; i >= 0; --i) {
        const auto& [s, y] = pairs[static_cast<size_t>(i)];
        alpha[static_cast<size_t>(i)] = s.dot(q) / y.dot(s);
        q -= alpha[static_cast<size_t>(i)] * y;
      }
      q *= gamma;
      for (size_t i = 0; i < pairs.size(); ++i) {
        const auto& [s, y] = pairs[i];
        const double beta = y.dot(q) / y.dot(s);
        q += (alpha[i] - beta) * s;
      }
      d = -q;
    } else {
      d = -(Hinv * g);
    }
    double gd = g.dot(d);
    if (!(gd < 0)) {
      d = -g;
      gd = g.dot(d);
    }
    if (first) d /= std::max(1.0, d.norm());  // conservative first step

    // Armijo backtracking with halving.
    double t = 1.0;
    bool accepted = false;
    Vector x_t;
    double al_t = 0.0;
    for (int ls = 0; ls < 55; ++ls) {
      x_t = xcur + t * d;
      ev.values_at(x_t);
      al_t = al_from_parts(ev.f, ev.ce, ev.ci, lambda, mu, rho);
      if (std::isfinite(al_t) && al_t <= al + 1e-4 * t * g.dot(d)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    ev.derivs_at(x_t);
    const Vector g_new = al_grad_from_parts(ev, lambda, mu, rho);
    const Vector step = x_t - xcur;
    const Vector yvec = g_new - g;
    const double sy = step.dot(yvec);
    if (std::isfinite(sy) && yvec.allFinite() &&
        sy > 1e-10 * step.norm() * yvec.norm()) {
      if (limited) {
        pairs.emplace_back(step, yvec);
        if (static_cast<int>(pairs.size()) > mem) pairs.pop_front();
        gamma = sy / yvec.squaredNorm();
      } else {
        if (first) Hinv *= sy / yvec.squaredNorm();
        const Vector hy = Hinv * yvec;
        const double yhy = yvec.dot(hy);
        Hinv += ((sy + yhy) / (sy * sy)) * (step * step.transpose()) -
                (hy * step.transpose() + step * hy.transpose()) / sy;
      }
    }
    first = false;

    xcur = x_t;
    al = al_t;
    g = g_new;
    ++out.iters;
    if (opts.iterate_observer) opts.iterate_observer(xcur, ev.f);
    if (opts.xtol > 0 && step.lpNorm<Eigen::Infinity>() < opts.xtol) {
      out.xtol_hit = true;
      break;
    }
  }
  ev.values_at(xcur);
  return out;
}

}  // namespace

double aug_lagrangian_value(const NlpSpec& spec, const Vector& x,
                            const Vector& lambda, const Vector& mu, double rho) {
  const double f = spec.objective(x);
  const Vector ce = spec.n_eq > 0 ? spec.eq(x) : Vector(0);
  const Vector ci = ineq_all(spec, x);
  return al_from_parts(f, ce, ci, lambda, mu, rho);
}

Vector aug_lagrangian_grad(const NlpSpec& spec, const Vector& x,
                           const Vector& lambda, const Vector& mu, double rho) {
  Evaluator ev(spec);
  ev.derivs_at(x);
  return al_grad_from_parts(ev, lambda, mu, rho);
}

NlpResult solve_nlp(const NlpSpec& spec, const NlpOptions& opts) {
  const int ni = spec.n_ineq + (spec.ball ? 1 : 0);
  Vector lambda = spec.lambda0.size() == spec.n_eq && spec.n_eq > 0
                      ? spec.lambda0
                      : Vector::Zero(spec.n_eq);
  Vector mu = spec.mu0.size() == ni && ni > 0 ? spec.mu0 : Vector::Zero(ni);
  for (long i = 0; i < mu.size(); ++i) mu[i] = std::max(0.0, mu[i]);
  double rho = opts.rho0;

  Evaluator ev(spec);
  Vector x = spec.start;
  ev.values_at(x);

  NlpResult res;
  res.x = x;
  res.f = ev.f;
  res.feas_err = violation(spec, ev.ce, ev.ci);
  bool have_best = true;
  double best_feas = res.feas_err, best_f = res.f;

  auto consider = [&](const Vector& p, double f, double feas) {
    const bool better =
        (feas <= opts.tol_feas && (best_feas > opts.tol_feas || f < best_f)) ||
        (best_feas > opts.tol_feas && feas < best_feas);
    if (!have_best || better) {
      res.x = p;
      res.f = f;
      res.feas_err = feas;
      best_feas = feas;
      best_f = f;
      have_best = true;
    }
  };

  double feas_prev = kInf;
  bool optimal = false;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    ++res.outer_iters;
    const double gtol =
        std::max(opts.tol_kkt, std::min(1e-2, 0.1 * feas_prev));
    const InnerOutcome inner = minimize_al(ev, x, lambda, mu, rho, gtol, opts);
    res.inner_iters += inner.iters;

    ev.derivs_at(x);
    const double feas = violation(spec, ev.ce, ev.ci);

    // First-order multiplier update.
    for (long i = 0; i < lambda.size(); ++i)
      lambda[i] = std::clamp(lambda[i] + rho * ev.ce[i], -opts.mu_cap, opts.mu_cap);
    for (long i = 0; i < mu.size(); ++i)
      mu[i] = std::min(std::max(0.0, mu[i] + rho * ev.ci[i]), opts.mu_cap);

    Vector kkt = ev.gradf;
    for (long i = 0; i < lambda.size(); ++i)
      kkt += lambda[i] * ev.Je.row(i).transpose();
    for (long i = 0; i < mu.size(); ++i)
      kkt += mu[i] * ev.Ji.row(i).transpose();

    consider(x, ev.f, feas);

    if (inner.xtol_hit) {
      res.xtol_stop = true;
      consider(x, ev.f, feas);
      break;
    }
    if (feas <= opts.tol_feas && kkt.lpNorm<Eigen::Infinity>() <= opts.tol_kkt) {
      optimal = true;
      break;
    }
    if (feas > 0.25 * feas_prev) rho = std::min(10.0 * rho, opts.rho_cap);
    feas_prev = feas;
  }

  res.c_evals = ev.c_evals;
  res.lambda = lambda;
  res.mu = mu;
  if (optimal)
    res.status = NlpStatus::Optimal;
  else if (res.feas_err <= opts.tol_feas)
    res.status = NlpStatus::FeasibleProgress;
  else if (res.feas_err <= 1e-4)
    res.status = NlpStatus::MaxIter;
  else
    res.status = NlpStatus::Infeasible;
  return res;
}

namespace {

// Shared per-point cache so separate eq/ineq callbacks cost one ledger tick.
struct ConstraintCache {
  const ConstrainedProblem& problem;
  EvalLedger& ledger;
  Vector x_vals, c;
  Vector x_jac;
  Matrix J;

  ConstraintCache(const ConstrainedProblem& p, EvalLedger& l)
      : problem(p), ledger(l) {}

  const Vector& values(const Vector& x) {
    if (x_vals.size() == 0 || x != x_vals) {
      c = eval_c(problem, ledger, x);
      x_vals = x;
    }
    return c;
  }
  const Matrix& jac(const Vector& x) {
    if (x_jac.size() == 0 || x != x_jac) {
      J = eval_jac(problem, ledger, x);
      x_jac = x;
    }
    return J;
  }
};

// Problem constraints re-expressed in step coordinates around x_k.
void attach_problem_constraints(NlpSpec& spec, const ConstrainedProblem& problem,
                                const Vector& x_k,
                                std::shared_ptr<ConstraintCache> cache) {
  const int n_eq = static_cast<int>(problem.eq_indices.size());
  const int n_ineq = static_cast<int>(problem.ineq_indices.size());
  spec.n_eq = n_eq;
  spec.n_ineq = n_ineq;
  if (n_eq > 0) {
    spec.eq = [cache, &problem, x_k, n_eq](const Vector& s) {
      const Vector& c = cache->values(x_k + s);
      Vector out(n_eq);
      for (int i = 0; i < n_eq; ++i) out[i] = c[problem.eq_indices[static_cast<size_t>(i)]];
      return out;
    };
    spec.eq_jac = [cache, &problem, x_k, n_eq](const Vector& s) {
      const Matrix& J = cache->jac(x_k + s);
      Matrix out(n_eq, J.cols());
      for (int i = 0; i < n_eq; ++i) out.row(i) = J.row(problem.eq_indices[static_cast<size_t>(i)]);
      return out;
    };
  }
  if (n_ineq > 0) {
    spec.ineq = [cache, &problem, x_k, n_ineq](const Vector& s) {
      const Vector& c = cache->values(x_k + s);
      Vector out(n_ineq);
      for (int i = 0; i < n_ineq; ++i)
        out[i] = c[problem.ineq_indices[static_cast<size_t>(i)]];
      return out;
    };
    spec.ineq_jac = [cache, &problem, x_k, n_ineq](const Vector& s) {
      const Matrix& J = cache->jac(x_k + s);
      Matrix out(n_ineq, J.cols());
      for (int i = 0; i < n_ineq; ++i)
        out.row(i) = J.row(problem.ineq_indices[static_cast<size_t>(i)]);
      return out;
    };
  }
}

}  // namespace

SubproblemResult solve_tr_subproblem(const QuadraticModel& model,
                                     const ConstrainedProblem& problem,
                                     const Vector& x_k, double delta,
                                     EvalLedger& ledger, const Vector& lambda0,
                                     const Vector& mu0) {
  if (!(delta > 0)) throw InvalidRadius(delta);
  const int n = problem.n;

  NlpSpec spec;
  spec.dim = n;
  spec.objective = [&model](const Vector& s) { return eval_model(model, s); };
  spec.gradient = [&model](const Vector& s) -> Vector { return model.g + model.H * s; };
  auto cache = std::make_shared<ConstraintCache>(problem, ledger);
  attach_problem_constraints(spec, problem, x_k, cache);
  spec.ball = BallConstraint{Vector::Zero(n), delta};
  spec.start = Vector::Zero(n);
  spec.lambda0 = lambda0;
  spec.mu0 = mu0;
  // The ball is recentred every call, so its multiplier never carries over.
  if (spec.mu0.size() == spec.n_ineq + 1) spec.mu0[spec.n_ineq] = 0.0;

  NlpOptions opts;
  const NlpResult res = solve_nlp(spec, opts);

  SubproblemResult out;
  out.step = res.x;
  out.iters = res.inner_iters;
  out.c_evals = res.c_evals;
  out.lambda = res.lambda;
  out.mu = res.mu;

  if (out.step.norm() > delta * (1.0 + 1e-8))
    throw NoProgress("step leaves the trust region");
  if (feasibility_error(problem, x_k + out.step) > 1e-8)
    throw NoProgress("step is not feasible to tolerance");
  const double m_s = eval_model(model, out.step);
  if (m_s > model.c0 + 1e-12 * std::max(1.0, std::abs(model.c0)))
    throw NoProgress("model value did not decrease");
  return out;
}

Vector find_feasible(const ConstrainedProblem& problem, const Vector& x0,
                     EvalLedger& ledger) {
  if (problem.num_constraints() == 0) return x0;
  {
    const Vector c = eval_c(problem, ledger, x0);
    double v = 0.0;
    for (int i : problem.eq_indices) v = std::max(v, std::abs(c[i]));
    for (int i : problem.ineq_indices) v = std::max(v, c[i]);
    if (v <= 1e-8) return x0;
  }

  NlpSpec spec;
  spec.dim = problem.n;
  spec.objective = [](const Vector&) { return 0.0; };
  spec.gradient = [n = problem.n](const Vector&) -> Vector { return Vector::Zero(n); };
  auto cache = std::make_shared<ConstraintCache>(problem, ledger);
  attach_problem_constraints(spec, problem, Vector::Zero(problem.n), cache);
  spec.start = x0;

  NlpOptions opts;
  const NlpResult res = solve_nlp(spec, opts);
  if (res.feas_err > 1e-8) throw Infeasible(res.feas_err);
  return res.x;
}

}  // namespace fibo
