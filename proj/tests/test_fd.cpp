#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fibo/fd.hpp"
#include "oracles.hpp"

using fibo::EvalLedger;
using fibo::RunResult;
using fibo::Vector;

TEST_CASE("forward-difference gradient") {
  const double h = std::sqrt(2.220446049250313e-16);

  // Linear function: exact up to round-off, exactly n ticks.
  const Vector a = (Vector(3) << 2, -1, 0.5).finished();
  const auto lin = oracles::unconstrained(
      3, [a](const Vector& x) { return a.dot(x); }, Vector::Zero(3));
  EvalLedger ledger;
  const Vector x = (Vector(3) << 0.3, -2, 5).finished();
  const double fx = lin.objective(x);
  const Vector g = fibo::fd_gradient(lin, ledger, x, fx, h);
  CHECK(ledger.f_evals == 3);
  CHECK((g - a).norm() <= 1e-6);

  // x^2 at x = 1.
  const auto sq = oracles::unconstrained(
      1, [](const Vector& v) { return v[0] * v[0]; }, Vector::Zero(1));
  const Vector one = Vector::Constant(1, 1.0);
  const Vector g2 = fibo::fd_gradient(sq, ledger, one, 1.0, h);
  CHECK(g2[0] == doctest::Approx(2.0).epsilon(1e-6));

  // Rosenbrock at (-1.2, 1) against the analytic gradient.
  auto rosen = [](const Vector& v) {
    return 100 * std::pow(v[1] - v[0] * v[0], 2) + std::pow(1 - v[0], 2);
  };
  const auto rp = oracles::unconstrained(2, rosen, Vector::Zero(2));
  const Vector xr = (Vector(2) << -1.2, 1.0).finished();
  const Vector gr = fibo::fd_gradient(rp, ledger, xr, rosen(xr), h);
  Vector ga(2);
  ga[0] = -400 * xr[0] * (xr[1] - xr[0] * xr[0]) - 2 * (1 - xr[0]);
  ga[1] = 200 * (xr[1] - xr[0] * xr[0]);
  CHECK((gr - ga).norm() <= 1e-6 * ga.norm());
}

TEST_CASE("comparator reaches reference objectives") {
  const RunResult hs22 = fibo::fd_solve(fibo::get_problem("HS22"));
  CHECK(std::abs(hs22.f_final - 1.0) <= 1e-6);

  const RunResult hs64 = fibo::fd_solve(fibo::get_problem("HS64"));
  CHECK(std::abs(hs64.f_final - 6300.0) <= 1.0);
}

TEST_CASE("quadratic started at the minimizer stops immediately") {
  const Vector xstar = (Vector(3) << 0.2, -1, 4).finished();
  const auto toy = oracles::unconstrained(
      3, [xstar](const Vector& x) { return (x - xstar).squaredNorm(); }, xstar);
  const RunResult run = fibo::fd_solve(toy);
  CHECK(run.f_final <= 1e-12);
  // One value plus one forward-difference gradient, with minimal slack for
  // the convergence check.
  CHECK(run.ledger.f_evals <= 3 * (toy.n + 1));
}

TEST_CASE("analytic-gradient hook bounds the FD-induced error") {
  for (const char* name : {"HS22", "HS32", "CB3"}) {
    CAPTURE(name);
    const auto p = fibo::get_problem(name);
    const RunResult fd_run = fibo::fd_solve(p);

    fibo::FdOptions hook;
    if (name == std::string("HS22")) {
      hook.gradient_override = [](const Vector& x) {
        return (Vector(2) << 2 * (x[0] - 2), 2 * (x[1] - 1)).finished();
      };
    } else if (name == std::string("HS32")) {
      hook.gradient_override = [](const Vector& x) {
        const double a = x[0] + 3 * x[1] + x[2], c = x[0] - x[1];
        return (Vector(3) << 2 * a + 8 * c, 6 * a - 8 * c, 2 * a).finished();
      };
    } else {
      hook.gradient_override = [](const Vector&) {
        return (Vector(3) << 0, 0, 1).finished();
      };
    }
    const RunResult exact_run = fibo::fd_solve(p, hook);
    CHECK(std::abs(fd_run.f_final - exact_run.f_final) <=
          1e-4 * std::max(1.0, std::abs(exact_run.f_final)));
  }
}

TEST_CASE("history counters are consistent with the ledger") {
  const RunResult run = fibo::fd_solve(fibo::get_problem("HS23"));
  long prev_f = 0, prev_c = 0;
  for (const auto& rec : run.history) {
    CHECK(rec.accepted);
    CHECK(rec.f_evals_so_far >= prev_f);
    CHECK(rec.c_evals_so_far >= prev_c);
    prev_f = rec.f_evals_so_far;
    prev_c = rec.c_evals_so_far;
  }
  CHECK(prev_f <= run.ledger.f_evals);
  CHECK(prev_c <= run.ledger.c_evals);
  CHECK(run.iters == static_cast<int>(run.history.size()));
}

TEST_CASE("budget exhaustion maps to a status, not a throw") {
  fibo::FdOptions opts;
  opts.max_fevals_factor = 2;  // tiny budget
  const auto p = fibo::get_problem("HS26");
  const RunResult run = fibo::fd_solve(p, opts);
  CHECK(run.termination == fibo::Termination::EvalBudget);
  CHECK(run.ledger.f_evals <= 2L * std::max(p.num_constraints(), p.n));
}
