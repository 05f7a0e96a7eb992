#include <cmath>
#include <limits>

#include "fibo/problem.hpp"

// Hock-Schittkowski / CUTEst problem transcriptions. General constraints are
// written in the c(x) <= 0 (or = 0) convention with the equality block first;
// simple bounds become inequality rows a - x_j <= 0 and x_j - b <= 0.

namespace fibo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Builder {
  std::string name;
  int n = 0;
  std::function<double(const Vector&)> objective;
  // General constraints: equalities then inequalities, before bounds.
  int n_eq = 0, n_ineq = 0;
  std::function<Vector(const Vector&)> cons;
  std::function<Matrix(const Vector&)> jac;
  Vector lo, hi;  // empty, or per-coordinate bounds (+-inf where absent)
  Vector x0;
  std::optional<double> f_star, f_table;
  std::optional<Vector> x_opt;

  ConstrainedProblem build() const {
    ConstrainedProblem p;
    p.name = name;
    p.n = n;
    p.objective = objective;
    p.x0 = x0;
    p.f_star = f_star;
    p.f_table = f_table;
    p.x_opt = x_opt;

    std::vector<std::pair<int, double>> lo_rows, hi_rows;
    if (lo.size() > 0) {
      for (int j = 0; j < n; ++j) {
        if (lo[j] > -kInf) lo_rows.emplace_back(j, lo[j]);
        if (hi[j] < kInf) hi_rows.emplace_back(j, hi[j]);
      }
    }
    const int m_gen = n_eq + n_ineq;
    const int m = m_gen + static_cast<int>(lo_rows.size() + hi_rows.size());
    for (int i = 0; i < n_eq; ++i) p.eq_indices.push_back(i);
    for (int i = n_eq; i < m; ++i) p.ineq_indices.push_back(i);

    auto cons_gen = cons;
    auto jac_gen = jac;
    const int nn = n;
    p.constraints = [cons_gen, lo_rows, hi_rows, m_gen, m](const Vector& x) {
      Vector c(m);
      if (m_gen > 0) c.head(m_gen) = cons_gen(x);
      int r = m_gen;
      for (const auto& [j, a] : lo_rows) c[r++] = a - x[j];
      for (const auto& [j, b] : hi_rows) c[r++] = x[j] - b;
      return c;
    };
    p.jacobian = [jac_gen, lo_rows, hi_rows, m_gen, m, nn](const Vector& x) {
      Matrix J = Matrix::Zero(m, nn);
      if (m_gen > 0) J.topRows(m_gen) = jac_gen(x);
      int r = m_gen;
      for (const auto& [j, a] : lo_rows) { (void)a; J(r++, j) = -1.0; }
      for (const auto& [j, b] : hi_rows) { (void)b; J(r++, j) = 1.0; }
      return J;
    };
    return p;
  }
};

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<long>(v.size()));
  int i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

ConstrainedProblem make_hs22() {
  Builder b;
  b.name = "HS22";
  b.n = 2;
  b.objective = [](const Vector& x) {
    return (x[0] - 2) * (x[0] - 2) + (x[1] - 1) * (x[1] - 1);
  };
  b.n_ineq = 2;
  b.cons = [](const Vector& x) {
    return vec({x[0] + x[1] - 2, x[0] * x[0] - x[1]});
  };
  b.jac = [](const Vector& x) {
    Matrix J(2, 2);
    J << 1, 1, 2 * x[0], -1;
    return J;
  };
  b.x0 = vec({2, 2});
  b.f_star = 1.0;
  b.f_table = 1.0;
  b.x_opt = vec({1, 1});
  return b.build();
}

ConstrainedProblem make_hs23() {
  Builder b;
  b.name = "HS23";
  b.n = 2;
  b.objective = [](const Vector& x) { return x[0] * x[0] + x[1] * x[1]; };
  b.n_ineq = 5;
  b.cons = [](const Vector& x) {
    return vec({1 - x[0] - x[1],
                1 - x[0] * x[0] - x[1] * x[1],
                9 - 9 * x[0] * x[0] - x[1] * x[1],
                x[1] - x[0] * x[0],
                x[0] - x[1] * x[1]});
  };
  b.jac = [](const Vector& x) {
    Matrix J(5, 2);
    J << -1, -1,
        -2 * x[0], -2 * x[1],
        -18 * x[0], -2 * x[1],
        -2 * x[0], 1,
        1, -2 * x[1];
    return J;
  };
  b.lo = vec({-50, -50});
  b.hi = vec({50, 50});
  b.x0 = vec({3, 1});
  b.f_star = 2.0;
  b.f_table = 2.0;
  b.x_opt = vec({1, 1});
  return b.build();
}

ConstrainedProblem make_hs26() {
  Builder b;
  b.name = "HS26";
  b.n = 3;
  b.objective = [](const Vector& x) {
    const double a = x[0] - x[1], c = x[1] - x[2];
    return a * a + c * c * c * c;
  };
  b.n_eq = 1;
  b.cons = [](const Vector& x) {
    return vec({(1 + x[1] * x[1]) * x[0] + std::pow(x[2], 4) - 3});
  };
  b.jac = [](const Vector& x) {
    Matrix J(1, 3);
    J << 1 + x[1] * x[1], 2 * x[0] * x[1], 4 * std::pow(x[2], 3);
    return J;
  };
  b.x0 = vec({-2.6, 2, 2});
  b.f_star = 0.0;
  b.f_table = 7.103e-10;
  b.x_opt = vec({1, 1, 1});
  return b.build();
}

ConstrainedProblem make_hs32() {
  Builder b;
  b.name = "HS32";
  b.n = 3;
  b.objective = [](const Vector& x) {
    const double a = x[0] + 3 * x[1] + x[2], c = x[0] - x[1];
    return a * a + 4 * c * c;
  };
  b.n_eq = 1;
  b.n_ineq = 1;
  b.cons = [](const Vector& x) {
    return vec({x[0] + x[1] + x[2] - 1,
                3 + std::pow(x[0], 3) - 6 * x[1] - 4 * x[2]});
  };
  b.jac = [](const Vector& x) {
    Matrix J(2, 3);
    J << 1, 1, 1, 3 * x[0] * x[0], -6, -4;
    return J;
  };
  b.lo = vec({0, 0, 0});
  b.hi = vec({kInf, kInf, kInf});
  b.x0 = vec({0.1, 0.7, 0.2});
  b.f_star = 1.0;
  b.f_table = 1.0;
  b.x_opt = vec({0, 0, 1});
  return b.build();
}

ConstrainedProblem make_hs34() {
  Builder b;
  b.name = "HS34";
  b.n = 3;
  b.objective = [](const Vector& x) { return -x[0]; };
  b.n_ineq = 2;
  b.cons = [](const Vector& x) {
    return vec({std::exp(x[0]) - x[1], std::exp(x[1]) - x[2]});
  };
  b.jac = [](const Vector& x) {
    Matrix J(2, 3);
    J << std::exp(x[0]), -1, 0, 0, std::exp(x[1]), -1;
    return J;
  };
  b.lo = vec({0, 0, 0});
  b.hi = vec({100, 100, 10});
  b.x0 = vec({0, 1.05, 2.9});
  b.f_star = -std::log(std::log(10.0));
  b.f_table = -0.834;
  b.x_opt = vec({std::log(std::log(10.0)), std::log(10.0), 10});
  return b.build();
}

ConstrainedProblem make_hs40() {
  Builder b;
  b.name = "HS40";
  b.n = 4;
  b.objective = [](const Vector& x) { return -x[0] * x[1] * x[2] * x[3]; };
  b.n_eq = 3;
  b.cons = [](const Vector& x) {
    return vec({std::pow(x[0], 3) + x[1] * x[1] - 1,
                x[0] * x[0] * x[3] - x[2],
                x[3] * x[3] - x[1]});
  };
  b.jac = [](const Vector& x) {
    Matrix J(3, 4);
    J << 3 * x[0] * x[0], 2 * x[1], 0, 0,
        2 * x[0] * x[3], 0, -1, x[0] * x[0],
        0, -1, 0, 2 * x[3];
    return J;
  };
  b.x0 = vec({0.8, 0.8, 0.8, 0.8});
  b.f_star = -0.25;
  b.f_table = -0.25;
  b.x_opt = vec({std::pow(2.0, -1.0 / 3.0), std::pow(2.0, -0.5),
                 std::pow(2.0, -11.0 / 12.0), std::pow(2.0, -0.25)});
  return b.build();
}

ConstrainedProblem make_hs50() {
  Builder b;
  b.name = "HS50";
  b.n = 5;
  b.objective = [](const Vector& x) {
    const double a = x[0] - x[1], c = x[1] - x[2], d = x[2] - x[3], e = x[3] - x[4];
    return a * a + c * c + d * d * d * d + e * e;
  };
  b.n_eq = 3;
  b.cons = [](const Vector& x) {
    return vec({x[0] + 2 * x[1] + 3 * x[2] - 6,
                x[1] + 2 * x[2] + 3 * x[3] - 6,
                x[2] + 2 * x[3] + 3 * x[4] - 6});
  };
  b.jac = [](const Vector&) {
    Matrix J(3, 5);
    J << 1, 2, 3, 0, 0, 0, 1, 2, 3, 0, 0, 0, 1, 2, 3;
    return J;
  };
  b.x0 = vec({35, -31, 11, 5, -5});
  b.f_star = 0.0;
  b.f_table = 1.056;
  b.x_opt = vec({1, 1, 1, 1, 1});
  return b.build();
}

ConstrainedProblem make_hs64() {
  Builder b;
  b.name = "HS64";
  b.n = 3;
  b.objective = [](const Vector& x) {
    return 5 * x[0] + 50000 / x[0] + 20 * x[1] + 72000 / x[1] + 10 * x[2] +
           144000 / x[2];
  };
  b.n_ineq = 1;
  b.cons = [](const Vector& x) {
    return vec({4 / x[0] + 32 / x[1] + 120 / x[2] - 1});
  };
  b.jac = [](const Vector& x) {
    Matrix J(1, 3);
    J << -4 / (x[0] * x[0]), -32 / (x[1] * x[1]), -120 / (x[2] * x[2]);
    return J;
  };
  b.lo = vec({1e-5, 1e-5, 1e-5});
  b.hi = vec({kInf, kInf, kInf});
  b.x0 = vec({1, 1, 1});
  b.f_star = 6299.842428;
  b.f_table = 6300.0;
  b.x_opt = vec({108.7347175, 85.12613942, 204.3247078});
  return b.build();
}

ConstrainedProblem make_hs66() {
  Builder b;
  b.name = "HS66";
  b.n = 3;
  b.objective = [](const Vector& x) { return 0.2 * x[2] - 0.8 * x[0]; };
  b.n_ineq = 2;
  b.cons = [](const Vector& x) {
    return vec({std::exp(x[0]) - x[1], std::exp(x[1]) - x[2]});
  };
  b.jac = [](const Vector& x) {
    Matrix J(2, 3);
    J << std::exp(x[0]), -1, 0, 0, std::exp(x[1]), -1;
    return J;
  };
  b.lo = vec({0, 0, 0});
  b.hi = vec({100, 100, 10});
  b.x0 = vec({0, 1.05, 2.9});
  b.f_star = 0.5181632741;
  b.f_table = 0.5182;
  b.x_opt = vec({0.1841264879, 1.202167873, 3.327322322});
  return b.build();
}

ConstrainedProblem make_hs72() {
  Builder b;
  b.name = "HS72";
  b.n = 4;
  b.objective = [](const Vector& x) {
    return 1 + x[0] + x[1] + x[2] + x[3];
  };
  b.n_ineq = 2;
  b.cons = [](const Vector& x) {
    return vec({4 / x[0] + 2.25 / x[1] + 1 / x[2] + 0.25 / x[3] - 0.0401,
                0.16 / x[0] + 0.36 / x[1] + 0.64 / x[2] + 0.64 / x[3] - 0.010085});
  };
  b.jac = [](const Vector& x) {
    auto sq = [](double v) { return v * v; };
    Matrix J(2, 4);
    J << -4 / sq(x[0]), -2.25 / sq(x[1]), -1 / sq(x[2]), -0.25 / sq(x[3]),
        -0.16 / sq(x[0]), -0.36 / sq(x[1]), -0.64 / sq(x[2]), -0.64 / sq(x[3]);
    return J;
  };
  b.lo = vec({0.001, 0.001, 0.001, 0.001});
  b.hi = vec({4e5, 3e5, 2e5, 1e5});
  b.x0 = vec({1, 1, 1, 1});
  b.f_star = 727.67936;
  b.f_table = 727.7;
  return b.build();
}

ConstrainedProblem make_hs75() {
  const double a = 0.48;
  Builder b;
  b.name = "HS75";
  b.n = 4;
  b.objective = [](const Vector& x) {
    return 3 * x[0] + 1e-6 * std::pow(x[0], 3) + 2 * x[1] +
           (2e-6 / 3) * std::pow(x[1], 3);
  };
  b.n_eq = 3;
  b.n_ineq = 2;
  b.cons = [a](const Vector& x) {
    return vec({1000 * std::sin(-x[2] - 0.25) + 1000 * std::sin(-x[3] - 0.25) +
                    894.8 - x[0],
                1000 * std::sin(x[2] - 0.25) +
                    1000 * std::sin(x[2] - x[3] - 0.25) + 894.8 - x[1],
                1000 * std::sin(x[3] - 0.25) +
                    1000 * std::sin(x[3] - x[2] - 0.25) + 1294.8,
                x[2] - x[3] - a,
                x[3] - x[2] - a});
  };
  b.jac = [](const Vector& x) {
    Matrix J = Matrix::Zero(5, 4);
    J(0, 0) = -1;
    J(0, 2) = -1000 * std::cos(-x[2] - 0.25);
    J(0, 3) = -1000 * std::cos(-x[3] - 0.25);
    J(1, 1) = -1;
    J(1, 2) = 1000 * std::cos(x[2] - 0.25) + 1000 * std::cos(x[2] - x[3] - 0.25);
    J(1, 3) = -1000 * std::cos(x[2] - x[3] - 0.25);
    J(2, 2) = -1000 * std::cos(x[3] - x[2] - 0.25);
    J(2, 3) = 1000 * std::cos(x[3] - 0.25) + 1000 * std::cos(x[3] - x[2] - 0.25);
    J(3, 2) = 1;
    J(3, 3) = -1;
    J(4, 2) = -1;
    J(4, 3) = 1;
    return J;
  };
  b.lo = vec({0, 0, -a, -a});
  b.hi = vec({1200, 1200, a, a});
  b.x0 = vec({0, 0, 0, 0});
  b.f_star = 5174.412695;
  b.f_table = 5174.0;
  return b.build();
}

// CB3 in its smooth minimax reformulation: minimize the bound variable x3
// over the epigraph of the three branch functions.
ConstrainedProblem make_cb3() {
  Builder b;
  b.name = "CB3";
  b.n = 3;
  b.objective = [](const Vector& x) { return x[2]; };
  b.n_ineq = 3;
  b.cons = [](const Vector& x) {
    return vec({std::pow(x[0], 4) + x[1] * x[1] - x[2],
                (2 - x[0]) * (2 - x[0]) + (2 - x[1]) * (2 - x[1]) - x[2],
                2 * std::exp(x[1] - x[0]) - x[2]});
  };
  b.jac = [](const Vector& x) {
    Matrix J(3, 3);
    J << 4 * std::pow(x[0], 3), 2 * x[1], -1,
        -2 * (2 - x[0]), -2 * (2 - x[1]), -1,
        -2 * std::exp(x[1] - x[0]), 2 * std::exp(x[1] - x[0]), -1;
    return J;
  };
  b.x0 = vec({2, 2, 2});
  b.f_star = 2.0;
  b.f_table = 2.0;
  b.x_opt = vec({1, 1, 2});
  return b.build();
}

ConstrainedProblem make_twobars() {
  Builder b;
  b.name = "TWOBARS";
  b.n = 2;
  b.objective = [](const Vector& x) {
    return x[0] * std::sqrt(1 + x[1] * x[1]);
  };
  b.n_ineq = 2;
  b.cons = [](const Vector& x) {
    const double w = 0.124 * std::sqrt(1 + x[1] * x[1]);
    return vec({w * (8 / x[0] + 1 / (x[0] * x[1])) - 1,
                w * (8 / x[0] - 1 / (x[0] * x[1])) - 1});
  };
  b.jac = [](const Vector& x) {
    const double r = std::sqrt(1 + x[1] * x[1]);
    const double w = 0.124 * r;
    const double dw = 0.124 * x[1] / r;
    const double p = 8 / x[0] + 1 / (x[0] * x[1]);
    const double q = 8 / x[0] - 1 / (x[0] * x[1]);
    Matrix J(2, 2);
    J(0, 0) = w * (-8 / (x[0] * x[0]) - 1 / (x[0] * x[0] * x[1]));
    J(0, 1) = dw * p + w * (-1 / (x[0] * x[1] * x[1]));
    J(1, 0) = w * (-8 / (x[0] * x[0]) + 1 / (x[0] * x[0] * x[1]));
    J(1, 1) = dw * q + w * (1 / (x[0] * x[1] * x[1]));
    return J;
  };
  b.lo = vec({0.2, 0.1});
  b.hi = vec({4, 1.6});
  b.x0 = vec({1, 1});
  b.f_star = 1.5086545482;
  b.f_table = 1.509;
  return b.build();
}

}  // namespace

const std::vector<std::string>& catalogue_names() {
  static const std::vector<std::string> names = {
      "HS22", "HS23", "HS26", "HS32", "HS34", "HS40", "HS50",
      "HS64", "HS66", "HS72", "HS75", "CB3",  "TWOBARS"};
  return names;
}

ConstrainedProblem get_problem(const std::string& name) {
  using Factory = ConstrainedProblem (*)();
  static const std::map<std::string, Factory> factories = {
      {"HS22", make_hs22}, {"HS23", make_hs23}, {"HS26", make_hs26},
      {"HS32", make_hs32}, {"HS34", make_hs34}, {"HS40", make_hs40},
      {"HS50", make_hs50}, {"HS64", make_hs64}, {"HS66", make_hs66},
      {"HS72", make_hs72}, {"HS75", make_hs75}, {"CB3", make_cb3},
      {"TWOBARS", make_twobars}};
  const auto it = factories.find(name);
  if (it == factories.end()) throw UnknownProblem(name);
  return it->second();
}

}  // namespace fibo
