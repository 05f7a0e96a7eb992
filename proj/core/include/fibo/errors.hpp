#pragma once

#include <stdexcept>
#include <string>

namespace fibo {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
  DimensionMismatch(long expected, long got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

class EvalBudgetExceeded : public Error {
public:
  explicit EvalBudgetExceeded(long cap)
      : Error("objective evaluation budget exhausted (cap " + std::to_string(cap) + ")") {}
};

class UnknownProblem : public Error {
public:
  explicit UnknownProblem(const std::string& name)
      : Error("unknown problem: " + name) {}
};

class InvalidRadius : public Error {
public:
  explicit InvalidRadius(double delta)
      : Error("trust region radius must be positive, got " + std::to_string(delta)) {}
};

class SingularSystem : public Error {
public:
  explicit SingularSystem(double cond)
      : Error("singular interpolation system (condition estimate " +
              std::to_string(cond) + ")") {}
};

class DuplicatePoint : public Error {
public:
  DuplicatePoint() : Error("point already present in interpolation set") {}
};

class NoProgress : public Error {
public:
  explicit NoProgress(const std::string& why)
      : Error("subproblem made no usable progress: " + why) {}
};

class Infeasible : public Error {
public:
  explicit Infeasible(double feas_err)
      : Error("no feasible point found (violation " + std::to_string(feas_err) + ")") {}
};

class MismatchedProblem : public Error {
public:
  MismatchedProblem(const std::string& a, const std::string& b)
      : Error("records refer to different problems: " + a + " vs " + b) {}
};

}  // namespace fibo
