#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "fibo/nlp.hpp"
#include "fibo/problem.hpp"

namespace fibo {

struct FiboOptions {
  double eta = 0.1;           // acceptance threshold in [0, 1)
  double delta0 = 1.0;        // initial trust region radius
  double gamma_inc = 2.0;
  double gamma_dec = 0.5;
  double delta_min = 1e-8;
  int max_iters = 1000;
  int max_fevals_factor = 500;  // budget = factor * max(m, n)
  double poisedness_threshold = 1e-7;
  bool geometry_enabled = false;
  bool require_feasible_stencil = false;
  bool count_feasibility_phase = false;
  std::ostream* trace = nullptr;     // one line per iteration
  std::ostream* set_dump = nullptr;  // CSV dump of Y_k per iteration
};

struct IterateRecord {
  int k = 0;
  Vector x;
  double f = 0.0;
  double delta = 0.0;
  std::optional<double> rho;
  double step_norm = 0.0;
  bool accepted = false;
  double feas_err = 0.0;
  long f_evals_so_far = 0;
  long c_evals_so_far = 0;
  int sub_iters = 0;
};

enum class Termination {
  RadiusMin,
  EvalBudget,
  IterBudget,
  SingularSystem,
  SubproblemFailure,
  Xtol,
};

const char* to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct RunResult {
  std::vector<IterateRecord> history;
  Vector x_final;
  double f_final = 0.0;
  double feas_final = 0.0;
  Termination termination = Termination::IterBudget;
  EvalLedger ledger;
  int iters = 0;
  long sub_iters_total = 0;
  double sub_time_total = 0.0;
};

/// Runs the interpolation trust-region method with the step computed by the
/// constrained subproblem. Never throws; all failures map to termination
/// statuses.
RunResult fibo_solve(const ConstrainedProblem& problem, const FiboOptions& opts = {});

}  // namespace fibo
