#include "fibo/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fibo {

double round_to_8_digits(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.7e", v);
  return std::strtod(buf, nullptr);
}

double log_ratio_accuracy(double f_fibo, double f_fd, double f_star) {
  const double gap_fibo = std::max(round_to_8_digits(f_fibo) - f_star, 1e-8);
  const double gap_fd = std::max(round_to_8_digits(f_fd) - f_star, 1e-8);
  return std::log2(gap_fibo / gap_fd);
}

namespace {

std::optional<long> counter_to_tau(const RunResult& run, double f_star, double tau,
                                   bool objective_counter) {
  const double threshold = f_star + tau * std::max(1.0, std::abs(f_star));
  for (const auto& rec : run.history) {
    if (!rec.accepted) continue;
    if (rec.f <= threshold)
      return objective_counter ? rec.f_evals_so_far : rec.c_evals_so_far;
  }
  return std::nullopt;
}

}  // namespace

std::optional<long> evals_to_tau(const RunResult& run, double f_star, double tau) {
  if (!(tau > 0)) throw Error("tau must be positive");
  return counter_to_tau(run, f_star, tau, true);
}

std::optional<long> cevals_to_tau(const RunResult& run, double f_star, double tau) {
  if (!(tau > 0)) throw Error("tau must be positive");
  return counter_to_tau(run, f_star, tau, false);
}

std::pair<double, double> eval_log_ratios(const BenchRecord& rec_fibo,
                                          const BenchRecord& rec_fd, double tau) {
  if (rec_fibo.problem != rec_fd.problem)
    throw MismatchedProblem(rec_fibo.problem, rec_fd.problem);
  auto count = [tau](const BenchRecord& rec,
                     const std::map<double, std::optional<long>>& m) {
    const auto it = m.find(tau);
    if (it == m.end())
      throw Error("tau " + format_tau(tau) + " not recorded for " + rec.problem);
    return it->second.value_or(kEvalSentinel);
  };
  const double obj = std::log2(static_cast<double>(count(rec_fibo, rec_fibo.evals_to_tau))) -
                     std::log2(static_cast<double>(count(rec_fd, rec_fd.evals_to_tau)));
  const double cons =
      std::log2(static_cast<double>(count(rec_fibo, rec_fibo.cevals_to_tau))) -
      std::log2(static_cast<double>(count(rec_fd, rec_fd.cevals_to_tau)));
  return {obj, cons};
}

BenchRecord make_record(const ConstrainedProblem& problem, const std::string& solver,
                        const RunResult& run, const std::vector<double>& taus,
                        double f_star) {
  BenchRecord rec;
  rec.problem = problem.name;
  rec.n = problem.n;
  rec.m = problem.num_constraints();
  rec.solver = solver;
  rec.iters = run.iters;
  rec.f_evals = run.ledger.f_evals;
  rec.c_evals = run.ledger.c_evals;
  rec.sub_iters = run.sub_iters_total;
  rec.time_s = run.ledger.wall_time;
  rec.sub_time_s = run.sub_time_total;
  rec.f_final = run.f_final;
  rec.feas_err = run.feas_final;
  rec.termination = run.termination;
  for (double tau : taus) {
    rec.evals_to_tau[tau] = evals_to_tau(run, f_star, tau);
    rec.cevals_to_tau[tau] = cevals_to_tau(run, f_star, tau);
  }
  return rec;
}

std::string format_tau(double tau) {
  const int e = static_cast<int>(std::lround(std::log10(tau)));
  if (std::abs(std::pow(10.0, e) - tau) <= 1e-12 * tau)
    return "1e" + std::to_string(e);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return buf;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<BenchRecord>& records,
               const std::vector<double>& taus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "problem,n,m,solver,iters,f_evals,c_evals,sub_iters,time_s,sub_time_s,"
         "f_final,feas_err,termination";
  for (double tau : taus) out << ",evals_tau_" << format_tau(tau);
  out << '\n';
  for (const auto& rec : records) {
    out << rec.problem << ',' << rec.n << ',' << rec.m << ',' << rec.solver << ','
        << rec.iters << ',' << rec.f_evals << ',' << rec.c_evals << ','
        << rec.sub_iters << ',' << fmt_double(rec.time_s) << ','
        << fmt_double(rec.sub_time_s) << ',' << fmt_double(rec.f_final) << ','
        << fmt_double(rec.feas_err) << ',' << to_string(rec.termination);
    for (double tau : taus) {
      const auto& v = rec.evals_to_tau.at(tau);
      out << ',';
      if (v)
        out << *v;
      else
        out << "INF";
    }
    out << '\n';
  }
}

std::vector<BenchRecord> read_csv(const std::string& path,
                                  std::vector<double>& taus_out) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV: " + path);
  const auto header = split_csv_line(line);
  taus_out.clear();
  constexpr int kFixed = 13;
  for (size_t i = kFixed; i < header.size(); ++i) {
    const std::string prefix = "evals_tau_";
    if (header[i].rfind(prefix, 0) != 0) throw Error("bad CSV header: " + header[i]);
    taus_out.push_back(std::strtod(header[i].substr(prefix.size()).c_str(), nullptr));
  }
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw Error("bad CSV row: " + line);
    BenchRecord rec;
    rec.problem = f[0];
    rec.n = std::stoi(f[1]);
    rec.m = std::stoi(f[2]);
    rec.solver = f[3];
    rec.iters = std::stol(f[4]);
    rec.f_evals = std::stol(f[5]);
    rec.c_evals = std::stol(f[6]);
    rec.sub_iters = std::stol(f[7]);
    rec.time_s = std::strtod(f[8].c_str(), nullptr);
    rec.sub_time_s = std::strtod(f[9].c_str(), nullptr);
    rec.f_final = std::strtod(f[10].c_str(), nullptr);
    rec.feas_err = std::strtod(f[11].c_str(), nullptr);
    rec.termination = termination_from_string(f[12]);
    for (size_t i = 0; i < taus_out.size(); ++i) {
      const std::string& v = f[kFixed + i];
      if (v == "INF")
        rec.evals_to_tau[taus_out[i]] = std::nullopt;
      else
        rec.evals_to_tau[taus_out[i]] = std::stol(v);
      // Per-tau constraint counts are not persisted; fall back to the run
      // total so ratio recomputation from a CSV stays well-defined.
      rec.cevals_to_tau[taus_out[i]] = rec.c_evals;
    }
    out.push_back(rec);
  }
  return out;
}

void write_log_ratio_files(const std::string& out_dir,
                           const std::vector<BenchRecord>& records,
                           const std::vector<double>& taus) {
  std::map<std::string, const BenchRecord*> fibo_recs, fd_recs;
  for (const auto& rec : records) {
    if (rec.solver == "FIBO") fibo_recs[rec.problem] = &rec;
    if (rec.solver == "FD") fd_recs[rec.problem] = &rec;
  }
  for (double tau : taus) {
    std::vector<double> obj, cons;
    for (const auto& [name, fibo_rec] : fibo_recs) {
      const auto it = fd_recs.find(name);
      if (it == fd_recs.end()) continue;
      const auto [o, c] = eval_log_ratios(*fibo_rec, *it->second, tau);
      obj.push_back(o);
      cons.push_back(c);
    }
    std::sort(obj.begin(), obj.end());
    std::sort(cons.begin(), cons.end());
    for (const auto& [suffix, data] :
         {std::pair{std::string("obj"), obj}, {std::string("cons"), cons}}) {
      const auto path = std::filesystem::path(out_dir) /
                        ("logratio_" + suffix + "_" + format_tau(tau) + ".dat");
      std::ofstream out(path);
      if (!out) throw Error("cannot write " + path.string());
      for (double v : data) out << fmt_double(v) << '\n';
    }
  }
}

std::vector<BenchRecord> run_benchmark(const std::vector<std::string>& names,
                                       const BenchConfig& config) {
  struct Pair {
    BenchRecord fibo, fd;
  };
  std::vector<Pair> pairs(names.size());

  auto run_one = [&](size_t idx) {
    ConstrainedProblem problem = get_problem(names[idx]);
    const auto ov = config.fstar_overrides.find(problem.name);
    if (ov != config.fstar_overrides.end()) problem.f_star = ov->second;
    const double f_star = problem.f_star.value_or(0.0);

    FiboOptions fopts = config.fibo;
    fopts.count_feasibility_phase = config.count_feasibility_phase;
    const RunResult fibo_run = fibo_solve(problem, fopts);
    pairs[idx].fibo = make_record(problem, "FIBO", fibo_run, config.taus, f_star);

    const RunResult fd_run = fd_solve(problem, config.fd);
    pairs[idx].fd = make_record(problem, "FD", fd_run, config.taus, f_star);
  };

  if (config.jobs <= 1) {
    for (size_t i = 0; i < names.size(); ++i) run_one(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    const int jobs = std::min<int>(config.jobs, static_cast<int>(names.size()));
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < names.size(); i = next.fetch_add(1))
          run_one(i);
      });
    for (auto& t : workers) t.join();
  }

  std::vector<BenchRecord> records;
  for (const auto& p : pairs) {
    records.push_back(p.fibo);
    records.push_back(p.fd);
  }

  std::filesystem::create_directories(config.out_dir);
  write_csv((std::filesystem::path(config.out_dir) / "results.csv").string(),
            records, config.taus);
  write_log_ratio_files(config.out_dir, records, config.taus);
  return records;
}

}  // namespace fibo
