#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fibo/nlp.hpp"
#include "oracles.hpp"

using fibo::Matrix;
using fibo::NlpSpec;
using fibo::NlpStatus;
using fibo::Vector;

TEST_CASE("scalar bound-constrained quadratic") {
  // min x^2 s.t. 1 - x <= 0, from x = 3.
  NlpSpec spec;
  spec.dim = 1;
  spec.objective = [](const Vector& x) { return x[0] * x[0]; };
  spec.gradient = [](const Vector& x) { return (Vector(1) << 2 * x[0]).finished(); };
  spec.n_ineq = 1;
  spec.ineq = [](const Vector& x) { return (Vector(1) << 1 - x[0]).finished(); };
  spec.ineq_jac = [](const Vector&) {
    Matrix J(1, 1);
    J << -1;
    return J;
  };
  spec.start = Vector::Constant(1, 3.0);
  const auto res = fibo::solve_nlp(spec);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.f == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.status == NlpStatus::Optimal);
  CHECK(res.feas_err <= 1e-8);
}

TEST_CASE("linear objective on the unit circle") {
  // min x1 + x2 s.t. x1^2 + x2^2 = 1 -> (-sqrt(2)/2, -sqrt(2)/2), f = -sqrt(2).
  NlpSpec spec;
  spec.dim = 2;
  spec.objective = [](const Vector& x) { return x[0] + x[1]; };
  spec.gradient = [](const Vector&) { return (Vector(2) << 1, 1).finished(); };
  spec.n_eq = 1;
  spec.eq = [](const Vector& x) {
    return (Vector(1) << x.squaredNorm() - 1).finished();
  };
  spec.eq_jac = [](const Vector& x) {
    Matrix J(1, 2);
    J.row(0) = 2 * x.transpose();
    return J;
  };
  spec.start = (Vector(2) << 1, 0).finished();
  const auto res = fibo::solve_nlp(spec);
  CHECK(res.f == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-6));
  CHECK(res.x[0] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-5));
  CHECK(res.x[1] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-5));
  CHECK(res.feas_err <= 1e-8);
}

TEST_CASE("two-inequality quadratic against a dense grid") {
  // min (x1-2)^2 + (x2-1)^2 s.t. x1^2 - x2 <= 0, x1 + x2 <= 2.
  NlpSpec spec;
  spec.dim = 2;
  auto f = [](const Vector& x) {
    return (x[0] - 2) * (x[0] - 2) + (x[1] - 1) * (x[1] - 1);
  };
  spec.objective = f;
  spec.gradient = [](const Vector& x) {
    return (Vector(2) << 2 * (x[0] - 2), 2 * (x[1] - 1)).finished();
  };
  spec.n_ineq = 2;
  spec.ineq = [](const Vector& x) {
    return (Vector(2) << x[0] * x[0] - x[1], x[0] + x[1] - 2).finished();
  };
  spec.ineq_jac = [](const Vector& x) {
    Matrix J(2, 2);
    J << 2 * x[0], -1, 1, 1;
    return J;
  };
  spec.start = (Vector(2) << 0, 1).finished();
  const auto res = fibo::solve_nlp(spec);

  double grid_best = 1e300;
  const int N = 601;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double x1 = -3 + 6.0 * i / (N - 1), x2 = -3 + 6.0 * j / (N - 1);
      if (x1 * x1 - x2 > 0 || x1 + x2 - 2 > 0) continue;
      const Vector x = (Vector(2) << x1, x2).finished();
      grid_best = std::min(grid_best, f(x));
    }
  // The grid minimum is an upper bound on the true optimum; the solver must
  // match or beat it, and land within the grid's resolution of it.
  CHECK(res.f <= grid_best + 1e-3);
  CHECK(res.f >= grid_best - 0.05);
  CHECK(res.feas_err <= 1e-8);
}

TEST_CASE("augmented Lagrangian gradient matches central differences") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-1.0, 1.0), up(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    NlpSpec spec;
    spec.dim = 3;
    const auto q = oracles::random_quadratic(3, rng);
    spec.objective = [q](const Vector& x) { return q(x); };
    spec.gradient = [q](const Vector& x) { return Vector(q.g + q.H * x); };
    spec.n_eq = 1;
    spec.eq = [](const Vector& x) {
      return (Vector(1) << x[0] * x[1] - 0.3).finished();
    };
    spec.eq_jac = [](const Vector& x) {
      Matrix J(1, 3);
      J << x[1], x[0], 0;
      return J;
    };
    spec.n_ineq = 1;
    spec.ineq = [](const Vector& x) {
      return (Vector(1) << x.squaredNorm() - 2.0).finished();
    };
    spec.ineq_jac = [](const Vector& x) {
      Matrix J(1, 3);
      J.row(0) = 2 * x.transpose();
      return J;
    };
    fibo::BallConstraint ball;
    ball.center = Vector::Zero(3);
    ball.radius = 1.7;
    spec.ball = ball;

    const Vector x = Vector::NullaryExpr(3, [&] { return u(rng); });
    const Vector lambda = Vector::NullaryExpr(1, [&] { return u(rng); });
    const Vector mu = Vector::NullaryExpr(2, [&] { return up(rng); });
    const double rho = 10.0;
    const Vector g = fibo::aug_lagrangian_grad(spec, x, lambda, mu, rho);
    const Vector gfd = oracles::central_diff_grad(
        [&](const Vector& y) {
          return fibo::aug_lagrangian_value(spec, y, lambda, mu, rho);
        },
        x);
    CHECK((g - gfd).norm() <= 1e-5 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("trust-region step: linear model on a ball") {
  fibo::QuadraticModel model;
  model.c0 = 0.0;
  model.g = (Vector(2) << 1, 0).finished();
  model.H = Matrix::Zero(2, 2);
  const auto toy = oracles::unconstrained(
      2, [](const Vector&) { return 0.0; }, Vector::Zero(2));
  fibo::EvalLedger ledger;
  const auto sub =
      fibo::solve_tr_subproblem(model, toy, Vector::Zero(2), 1.0, ledger);
  CHECK((sub.step - (Vector(2) << -1, 0).finished()).norm() <= 1e-5);
  CHECK(model.c0 - fibo::eval_model(model, sub.step) ==
        doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("trust-region step: active linear constraint") {
  fibo::QuadraticModel model;
  model.c0 = 0.0;
  model.g = (Vector(2) << 1, 0).finished();
  model.H = Matrix::Zero(2, 2);
  fibo::ConstrainedProblem p = oracles::unconstrained(
      2, [](const Vector&) { return 0.0; }, Vector::Zero(2));
  p.ineq_indices = {0};
  p.constraints = [](const Vector& x) {
    return (Vector(1) << -x[0] - 0.3).finished();  // x1 >= -0.3
  };
  p.jacobian = [](const Vector&) {
    Matrix J(1, 2);
    J << -1, 0;
    return J;
  };
  fibo::EvalLedger ledger;
  const auto sub =
      fibo::solve_tr_subproblem(model, p, Vector::Zero(2), 1.0, ledger);
  CHECK(sub.step[0] == doctest::Approx(-0.3).epsilon(1e-5));
  CHECK(std::abs(sub.step[1]) <= 1e-5);
}

TEST_CASE("trust-region step on a fitted HS40 model beats the filtered grid") {
  const auto hs40 = fibo::get_problem("HS40");
  fibo::EvalLedger ledger;
  const Vector x_k = fibo::find_feasible(hs40, hs40.x0, ledger);
  REQUIRE(fibo::feasibility_error(hs40, x_k) <= 1e-8);

  fibo::InterpolationSet Y;
  for (const Vector& p : fibo::build_stencil(x_k, 0.5)) {
    Y.points.push_back(p);
    Y.values.push_back(hs40.objective(p));
  }
  const auto model = fibo::fit_model(Y, x_k);
  const double delta = 0.5;
  const auto sub = fibo::solve_tr_subproblem(model, hs40, x_k, delta, ledger);

  // 41^4 candidate steps filtered by feasibility <= 1e-6; the equality
  // constraints make the filter extremely selective, so the grid minimum is
  // an upper bound the solver must not exceed.
  double grid_best = model.c0;  // s = 0 is feasible
  const int N = 41;
  Vector s(4);
  for (int i0 = 0; i0 < N; ++i0)
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2)
        for (int i3 = 0; i3 < N; ++i3) {
          s << -delta + 2 * delta * i0 / (N - 1), -delta + 2 * delta * i1 / (N - 1),
              -delta + 2 * delta * i2 / (N - 1), -delta + 2 * delta * i3 / (N - 1);
          if (s.norm() > delta) continue;
          if (fibo::feasibility_error(hs40, x_k + s) > 1e-6) continue;
          grid_best = std::min(grid_best, fibo::eval_model(model, s));
        }
  CHECK(fibo::eval_model(model, sub.step) <= grid_best + 1e-3);
  CHECK(fibo::feasibility_error(hs40, x_k + sub.step) <= 1e-8);
  CHECK(sub.step.norm() <= delta * (1 + 1e-8));
}

TEST_CASE("randomized subproblems match the filtered-grid oracle") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    const auto inst = oracles::random_subproblem(rng);
    fibo::EvalLedger ledger;
    const auto sub = fibo::solve_tr_subproblem(inst.model, inst.problem,
                                               inst.x_k, inst.delta, ledger);
    const double nlp_value = fibo::eval_model(inst.model, sub.step);
    const double grid_value = oracles::grid_oracle(inst, 101);
    CHECK(nlp_value <= grid_value + 1e-3);
    CHECK(sub.step.norm() <= inst.delta * (1 + 1e-8));
    CHECK(fibo::feasibility_error(inst.problem, inst.x_k + sub.step) <= 1e-8);
    CHECK(nlp_value <= inst.model.c0 + 1e-12 * std::max(1.0, std::abs(inst.model.c0)));
  }
}

TEST_CASE("feasibility phase") {
  // Already feasible: unchanged point, exactly one constraint evaluation.
  const auto hs22 = fibo::get_problem("HS22");
  fibo::EvalLedger ledger;
  const Vector x_feas = (Vector(2) << 0.5, 0.5).finished();
  REQUIRE(fibo::feasibility_error(hs22, x_feas) <= 1e-8);
  fibo::ConstrainedProblem hs22_from_feas = hs22;
  hs22_from_feas.x0 = x_feas;
  const Vector got = fibo::find_feasible(hs22_from_feas, x_feas, ledger);
  CHECK((got - x_feas).norm() == 0.0);
  CHECK(ledger.c_evals == 1);
  CHECK(ledger.f_evals == 0);

  // Single bound x1 >= 1 from the origin.
  fibo::ConstrainedProblem bound = oracles::unconstrained(
      2, [](const Vector&) { return 0.0; }, Vector::Zero(2));
  bound.ineq_indices = {0};
  bound.constraints = [](const Vector& x) {
    return (Vector(1) << 1 - x[0]).finished();
  };
  bound.jacobian = [](const Vector&) {
    Matrix J(1, 2);
    J << -1, 0;
    return J;
  };
  fibo::EvalLedger ledger2;
  const Vector xb = fibo::find_feasible(bound, Vector::Zero(2), ledger2);
  CHECK(xb[0] >= 1 - 1e-8);

  // HS40 from its standard (infeasible) start.
  const auto hs40 = fibo::get_problem("HS40");
  fibo::EvalLedger ledger3;
  CHECK(fibo::feasibility_error(hs40, hs40.x0) > 1e-8);
  const Vector x40 = fibo::find_feasible(hs40, hs40.x0, ledger3);
  CHECK(fibo::feasibility_error(hs40, x40) <= 1e-8);
}
