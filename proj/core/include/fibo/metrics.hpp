#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fibo/driver.hpp"
#include "fibo/fd.hpp"

namespace fibo {

/// Count substituted when a solver never reaches an accuracy level.
inline constexpr long kEvalSentinel = 1L << 62;

/// One (problem, solver) row of the results table.
struct BenchRecord {
  std::string problem;
  int n = 0, m = 0;
  std::string solver;  // "FIBO" or "FD"
  long iters = 0, f_evals = 0, c_evals = 0, sub_iters = 0;
  double time_s = 0.0, sub_time_s = 0.0;
  double f_final = 0.0, feas_err = 0.0;
  Termination termination = Termination::IterBudget;
  std::map<double, std::optional<long>> evals_to_tau;   // objective evals
  std::map<double, std::optional<long>> cevals_to_tau;  // constraint evals
};

/// Rounds to 8 significant digits, the precision at which final objective
/// values enter the accuracy ratio.
double round_to_8_digits(double v);

/// log2 of the ratio of optimality gaps, both floored at 1e-8.
double log_ratio_accuracy(double f_fibo, double f_fd, double f_star);

/// Objective evaluations spent when the accepted-iterate objective first
/// drops to f_star + tau * max(1, |f_star|); nullopt when never reached.
std::optional<long> evals_to_tau(const RunResult& run, double f_star, double tau);
std::optional<long> cevals_to_tau(const RunResult& run, double f_star, double tau);

/// log2 eval-count ratios (objective, constraint) at accuracy tau, using the
/// sentinel for absent counts. Throws MismatchedProblem.
std::pair<double, double> eval_log_ratios(const BenchRecord& rec_fibo,
                                          const BenchRecord& rec_fd, double tau);

struct BenchConfig {
  std::vector<double> taus = {1e-1, 1e-3, 1e-5, 1e-7};
  std::string out_dir = ".";
  bool count_feasibility_phase = false;
  std::map<std::string, double> fstar_overrides;
  int jobs = 1;
  FiboOptions fibo;
  FdOptions fd;
};

/// Runs both solvers over the named problems, writes results.csv and the
/// sorted log-ratio data files, and returns all records in catalogue order.
std::vector<BenchRecord> run_benchmark(const std::vector<std::string>& names,
                                       const BenchConfig& config);

BenchRecord make_record(const ConstrainedProblem& problem, const std::string& solver,
                        const RunResult& run, const std::vector<double>& taus,
                        double f_star);

void write_csv(const std::string& path, const std::vector<BenchRecord>& records,
               const std::vector<double>& taus);
std::vector<BenchRecord> read_csv(const std::string& path,
                                  std::vector<double>& taus_out);

/// Recomputes and writes logratio_obj_<tau>.dat / logratio_cons_<tau>.dat
/// (one sorted value per line) from paired records.
void write_log_ratio_files(const std::string& out_dir,
                           const std::vector<BenchRecord>& records,
                           const std::vector<double>& taus);

std::string format_tau(double tau);

}  // namespace fibo
