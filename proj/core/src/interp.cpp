#include "fibo/interp.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace fibo {

namespace {

// Column layout of the monomial basis: 1, s_1..s_n, then s_i s_j for i <= j.
int basis_size(int n) { return (n + 1) * (n + 2) / 2; }

Eigen::RowVectorXd basis_row(const Vector& s) {
  const int n = static_cast<int>(s.size());
  Eigen::RowVectorXd row(basis_size(n));
  row[0] = 1.0;
  for (int i = 0; i < n; ++i) row[1 + i] = s[i];
  int c = 1 + n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) row[c++] = s[i] * s[j];
  return row;
}

QuadraticModel coeffs_to_model(double c0, const Vector& coef, int n) {
  QuadraticModel m;
  m.c0 = c0;
  m.g = coef.head(n);
  m.H = Matrix::Zero(n, n);
  int c = n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (i == j) {
        m.H(i, i) = 2.0 * coef[c];
      } else {
        m.H(i, j) = m.H(j, i) = coef[c];
      }
      ++c;
    }
  return m;
}

Matrix full_basis_matrix(const InterpolationSet& Y, const Vector& x_k, double scale) {
  const int n = static_cast<int>(x_k.size());
  const int p = Y.size();
  Matrix A(p, basis_size(n));
  for (int t = 0; t < p; ++t)
    A.row(t) = basis_row((Y.points[t] - x_k) / scale);
  return A;
}

}  // namespace

int full_set_size(int n) { return (n + 1) * (n + 2) / 2; }

int InterpolationSet::contains(const Vector& x, double tol) const {
  for (int t = 0; t < size(); ++t) {
    const double scale = std::max(1.0, x.norm());
    if ((points[t] - x).norm() <= tol * scale) return t;
  }
  return -1;
}

std::vector<Vector> build_stencil(const Vector& x_center, double delta0) {
  if (!(delta0 > 0)) throw InvalidRadius(delta0);
  const int n = static_cast<int>(x_center.size());
  std::vector<Vector> pts;
  pts.reserve(full_set_size(n));
  pts.push_back(x_center);
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = delta0;
    pts.push_back(x_center + e);
    pts.push_back(x_center - e);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Vector e = Vector::Zero(n);
      e[i] = delta0;
      e[j] = delta0;
      pts.push_back(x_center + e);
    }
  return pts;
}

QuadraticModel fit_model(const InterpolationSet& Y, const Vector& x_k) {
  const int n = static_cast<int>(x_k.size());
  const int p = Y.size();
  const int center = Y.contains(x_k);
  if (center < 0) throw Error("fit_model: x_k is not an interpolation point");
  const double f_center = Y.values[static_cast<size_t>(center)];

  // Pinning c0 = f(x_k) reduces the system to p-1 equations in the linear
  // and quadratic coefficients. Shifts are normalized by the set radius so
  // the condition estimate measures geometry, not scale spread.
  double radius = 0.0;
  for (int t = 0; t < p; ++t)
    radius = std::max(radius, (Y.points[t] - x_k).norm());
  if (!(radius > 0)) throw SingularSystem(std::numeric_limits<double>::infinity());

  Matrix B(p - 1, basis_size(n) - 1);
  Vector rhs(p - 1);
  int r = 0;
  for (int t = 0; t < p; ++t) {
    if (t == center) continue;
    const Eigen::RowVectorXd row = basis_row((Y.points[t] - x_k) / radius);
    B.row(r) = row.tail(basis_size(n) - 1);
    rhs[r] = Y.values[static_cast<size_t>(t)] - f_center;
    ++r;
  }

  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()[0];
  const double smin = svd.singularValues()[svd.singularValues().size() - 1];
  if (!(smin > 0) || smax / smin > 1e14)
    throw SingularSystem(smin > 0 ? smax / smin : std::numeric_limits<double>::infinity());

  const Vector coef = svd.solve(rhs);
  QuadraticModel model = coeffs_to_model(f_center, coef, n);
  model.g /= radius;
  model.H /= radius * radius;
  return model;
}

double eval_model(const QuadraticModel& model, const Vector& s) {
  if (s.size() != model.g.size())
    throw DimensionMismatch(model.g.size(), s.size());
  return model.c0 + model.g.dot(s) + 0.5 * s.dot(model.H * s);
}

double poisedness_measure(const InterpolationSet& Y, const Vector& x_k, double delta) {
  if (!(delta > 0)) throw InvalidRadius(delta);
  const Matrix A = full_basis_matrix(Y, x_k, delta);
  Eigen::JacobiSVD<Matrix> svd(A);
  const double smax = svd.singularValues()[0];
  const double smin = svd.singularValues()[svd.singularValues().size() - 1];
  if (!(smax > 0)) return 0.0;
  return smin / smax;
}

void replace_on_accept(InterpolationSet& Y, const Vector& x_new, double f_new) {
  if (Y.contains(x_new) >= 0) throw DuplicatePoint();
  int worst = 0;
  double worst_d = -1.0;
  for (int t = 0; t < Y.size(); ++t) {
    const double d = (Y.points[t] - x_new).norm();
    if (d > worst_d) {
      worst_d = d;
      worst = t;
    }
  }
  Y.points[static_cast<size_t>(worst)] = x_new;
  Y.values[static_cast<size_t>(worst)] = f_new;
}

void replace_on_reject(InterpolationSet& Y, const Vector& x_k, const Vector& trial,
                       double f_trial) {
  if (Y.contains(trial) >= 0) throw DuplicatePoint();
  const int center = Y.contains(x_k);
  int worst = -1;
  double worst_d = -1.0;
  for (int t = 0; t < Y.size(); ++t) {
    if (t == center) continue;
    const double d = (Y.points[t] - x_k).norm();
    if (d > worst_d) {
      worst_d = d;
      worst = t;
    }
  }
  Y.points[static_cast<size_t>(worst)] = trial;
  Y.values[static_cast<size_t>(worst)] = f_trial;
}

QuadraticModel lagrange_polynomial(const InterpolationSet& Y, const Vector& x_k,
                                   int index) {
  const int n = static_cast<int>(x_k.size());
  const Matrix A = full_basis_matrix(Y, x_k, 1.0);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()[0];
  const double smin = svd.singularValues()[svd.singularValues().size() - 1];
  if (!(smin > 0) || smax / smin > 1e14)
    throw SingularSystem(smin > 0 ? smax / smin : std::numeric_limits<double>::infinity());
  Vector e = Vector::Zero(Y.size());
  e[index] = 1.0;
  const Vector coef = svd.solve(e);
  return coeffs_to_model(coef[0], coef.tail(basis_size(n) - 1), n);
}

namespace {

// Projected gradient ascent of sign * l(s) on the ball ||s|| <= delta.
double ascend_abs(const QuadraticModel& l, double delta, Vector& s, double sign) {
  auto value = [&](const Vector& v) { return sign * eval_model(l, v); };
  double t = delta;
  double best = value(s);
  for (int it = 0; it < 80 && t > 1e-12 * delta; ++it) {
    Vector grad = sign * (l.g + l.H * s);
    Vector cand = s + t * grad;
    if (cand.norm() > delta) cand *= delta / cand.norm();
    const double v = value(cand);
    if (v > best + 1e-14 * std::abs(best)) {
      best = v;
      s = cand;
      t *= 1.2;
    } else {
      t *= 0.5;
    }
  }
  return best;
}

}  // namespace

void improve_geometry(InterpolationSet& Y, const Vector& x_k, double delta,
                      const ConstrainedProblem& problem, EvalLedger& ledger) {
  const int n = static_cast<int>(x_k.size());
  const int center = Y.contains(x_k);
  int worst = -1;
  double worst_d = -1.0;
  for (int t = 0; t < Y.size(); ++t) {
    if (t == center) continue;
    const double d = (Y.points[t] - x_k).norm();
    if (d > worst_d) {
      worst_d = d;
      worst = t;
    }
  }

  const QuadraticModel l = lagrange_polynomial(Y, x_k, worst);

  // Multistart projected ascent of |l| from the 2n axis points.
  Vector best_s = Vector::Zero(n);
  double best_val = -1.0;
  for (int i = 0; i < n; ++i) {
    for (double dir : {1.0, -1.0}) {
      for (double sign : {1.0, -1.0}) {
        Vector s = Vector::Zero(n);
        s[i] = dir * delta;
        const double v = ascend_abs(l, delta, s, sign);
        if (v > best_val) {
          best_val = v;
          best_s = s;
        }
      }
    }
  }

  const Vector x_new = x_k + best_s;
  if (Y.contains(x_new) >= 0) return;  // nothing better than an existing point
  const double f_new = eval_f(problem, ledger, x_new);
  Y.points[static_cast<size_t>(worst)] = x_new;
  Y.values[static_cast<size_t>(worst)] = f_new;
}

}  // namespace fibo
