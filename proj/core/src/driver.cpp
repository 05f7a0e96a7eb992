#include "fibo/driver.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "fibo/interp.hpp"

namespace fibo {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::RadiusMin: return "RadiusMin";
    case Termination::EvalBudget: return "EvalBudget";
    case Termination::IterBudget: return "IterBudget";
    case Termination::SingularSystem: return "SingularSystem";
    case Termination::SubproblemFailure: return "SubproblemFailure";
    case Termination::Xtol: return "Xtol";
  }
  return "?";
}

Termination termination_from_string(const std::string& s) {
  for (Termination t : {Termination::RadiusMin, Termination::EvalBudget,
                        Termination::IterBudget, Termination::SingularSystem,
                        Termination::SubproblemFailure, Termination::Xtol})
    if (s == to_string(t)) return t;
  throw Error("unknown termination status: " + s);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void dump_set(std::ostream& out, int k, const InterpolationSet& Y) {
  for (int t = 0; t < Y.size(); ++t) {
    out << k << ',' << t;
    for (long j = 0; j < Y.points[static_cast<size_t>(t)].size(); ++j)
      out << ',' << Y.points[static_cast<size_t>(t)][j];
    out << ',' << Y.values[static_cast<size_t>(t)] << '\n';
  }
}

}  // namespace

RunResult fibo_solve(const ConstrainedProblem& problem, const FiboOptions& opts) {
  const auto t_start = Clock::now();
  RunResult res;
  const long budget =
      static_cast<long>(opts.max_fevals_factor) *
      std::max(problem.num_constraints(), problem.n);
  res.ledger.f_cap = budget;

  auto finish = [&](Termination why) {
    res.termination = why;
    res.iters = res.history.empty() ? 0 : res.history.back().k;
    // Best accepted iterate.
    bool found = false;
    for (const auto& rec : res.history) {
      if (!rec.accepted) continue;
      if (!found || rec.f < res.f_final) {
        res.x_final = rec.x;
        res.f_final = rec.f;
        res.feas_final = rec.feas_err;
        found = true;
      }
    }
    res.ledger.wall_time = seconds_since(t_start);
    return res;
  };

  // Feasibility phase; its cost is kept off the run ledger unless requested.
  Vector x;
  try {
    EvalLedger phase_ledger;
    EvalLedger& fl = opts.count_feasibility_phase ? res.ledger : phase_ledger;
    x = find_feasible(problem, problem.x0, fl);
  } catch (const Infeasible&) {
    return finish(Termination::SubproblemFailure);
  }

  // Initial interpolation set.
  InterpolationSet Y;
  double f_x = 0.0;
  try {
    for (const Vector& p : build_stencil(x, opts.delta0)) {
      if (opts.require_feasible_stencil && feasibility_error(problem, p) > 1e-8)
        throw Error("stencil point infeasible with require_feasible_stencil set");
      Y.points.push_back(p);
      Y.values.push_back(eval_f(problem, res.ledger, p));
    }
    f_x = Y.values[0];
  } catch (const EvalBudgetExceeded&) {
    return finish(Termination::EvalBudget);
  }

  double delta = opts.delta0;
  double feas_x = feasibility_error(problem, x);
  Vector warm_lambda, warm_mu;

  auto record = [&](int k, std::optional<double> rho, double step_norm,
                    bool accepted, int sub_iters) {
    IterateRecord rec;
    rec.k = k;
    rec.x = x;
    rec.f = f_x;
    rec.delta = delta;
    rec.rho = rho;
    rec.step_norm = step_norm;
    rec.accepted = accepted;
    rec.feas_err = feas_x;
    rec.f_evals_so_far = res.ledger.f_evals;
    rec.c_evals_so_far = res.ledger.c_evals;
    rec.sub_iters = sub_iters;
    res.history.push_back(rec);
    if (opts.trace)
      *opts.trace << "k=" << k << " f=" << f_x << " delta=" << delta
                  << " rho=" << (rho ? *rho : std::nan("")) << " accepted="
                  << accepted << " feas=" << feas_x << '\n';
    if (opts.set_dump) dump_set(*opts.set_dump, k, Y);
  };

  record(0, std::nullopt, 0.0, true, 0);

  // Geometry-or-shrink branch taken on every rejection. Throws SingularSystem
  // when the Lagrange system behind the geometry step cannot be formed.
  auto reject_update = [&](bool have_trial, const Vector& trial, double f_trial) {
    if (opts.geometry_enabled &&
        poisedness_measure(Y, x, delta) < opts.poisedness_threshold) {
      improve_geometry(Y, x, delta, problem, res.ledger);
      return;  // radius unchanged
    }
    if (have_trial) {
      try {
        replace_on_reject(Y, x, trial, f_trial);
      } catch (const DuplicatePoint&) {
      }
    }
    delta *= opts.gamma_dec;
  };

  for (int k = 1;; ++k) {
    if (delta < opts.delta_min) return finish(Termination::RadiusMin);
    if (res.ledger.f_evals >= budget) return finish(Termination::EvalBudget);
    if (k > opts.max_iters) return finish(Termination::IterBudget);

    QuadraticModel model;
    try {
      model = fit_model(Y, x);
    } catch (const SingularSystem&) {
      return finish(Termination::SingularSystem);
    }

    SubproblemResult sub;
    const auto t_sub = Clock::now();
    bool sub_ok = true;
    try {
      sub = solve_tr_subproblem(model, problem, x, delta, res.ledger,
                                warm_lambda, warm_mu);
    } catch (const NoProgress&) {
      sub_ok = false;
    }
    res.sub_time_total += seconds_since(t_sub);
    res.sub_iters_total += sub.iters;
    if (sub_ok) {
      warm_lambda = sub.lambda;
      warm_mu = sub.mu;
    }

    if (!sub_ok) {
      try {
        reject_update(false, Vector(), 0.0);
      } catch (const EvalBudgetExceeded&) {
        return finish(Termination::EvalBudget);
      } catch (const SingularSystem&) {
        return finish(Termination::SingularSystem);
      }
      record(k, std::nullopt, 0.0, false, sub.iters);
      continue;
    }

    const Vector& s = sub.step;
    const double predicted = model.c0 - eval_model(model, s);

    // Degenerate predicted reduction: reject without spending an evaluation.
    if (predicted <= 1e-15 * std::max(1.0, std::abs(f_x))) {
      try {
        reject_update(false, Vector(), 0.0);
      } catch (const EvalBudgetExceeded&) {
        return finish(Termination::EvalBudget);
      } catch (const SingularSystem&) {
        return finish(Termination::SingularSystem);
      }
      record(k, std::nullopt, s.norm(), false, sub.iters);
      continue;
    }

    double f_trial;
    try {
      f_trial = eval_f(problem, res.ledger, x + s);
    } catch (const EvalBudgetExceeded&) {
      return finish(Termination::EvalBudget);
    }
    const double rho = (f_x - f_trial) / predicted;

    if (rho >= opts.eta) {
      const Vector trial = x + s;
      try {
        replace_on_accept(Y, trial, f_trial);
      } catch (const DuplicatePoint&) {
      }
      if (s.norm() >= 0.8 * delta) delta *= opts.gamma_inc;
      x = trial;
      f_x = f_trial;
      feas_x = feasibility_error(problem, x);
      record(k, rho, s.norm(), true, sub.iters);
    } else {
      try {
        reject_update(true, x + s, f_trial);
      } catch (const EvalBudgetExceeded&) {
        return finish(Termination::EvalBudget);
      } catch (const SingularSystem&) {
        return finish(Termination::SingularSystem);
      }
      record(k, rho, s.norm(), false, sub.iters);
    }
  }
}

}  // namespace fibo
