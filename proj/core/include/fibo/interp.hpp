#pragma once

#include <vector>

#include "fibo/problem.hpp"

namespace fibo {

/// Full quadratic interpolation set: exactly (n+1)(n+2)/2 points with cached
/// objective values.
struct InterpolationSet {
  std::vector<Vector> points;
  std::vector<double> values;

  int size() const { return static_cast<int>(points.size()); }
  int contains(const Vector& x, double tol = 1e-14) const;  // index or -1
};

/// m(s) = c0 + g's + s'Hs/2, centered at the current iterate.
struct QuadraticModel {
  double c0 = 0.0;
  Vector g;
  Matrix H;
};

int full_set_size(int n);

/// Stencil of (n+1)(n+2)/2 points: center, center +- delta e_i, and
/// center + delta (e_i + e_j) for i < j.
std::vector<Vector> build_stencil(const Vector& x_center, double delta0);

/// Solves the dense interpolation system in the monomial basis centered at
/// x_k. Requires x_k to be one of the interpolation points; c0 is pinned to
/// the stored value there. Throws SingularSystem when the basis matrix
/// condition estimate exceeds 1e14.
QuadraticModel fit_model(const InterpolationSet& Y, const Vector& x_k);

double eval_model(const QuadraticModel& model, const Vector& s);

/// Reciprocal condition number of the basis matrix on points shifted by x_k
/// and scaled by 1/delta. In [0, 1]; larger means better poised.
double poisedness_measure(const InterpolationSet& Y, const Vector& x_k, double delta);

/// Evicts the point farthest from x_new (lowest index on ties) and inserts
/// (x_new, f_new).
void replace_on_accept(InterpolationSet& Y, const Vector& x_new, double f_new);

/// Evicts the point farthest from x_k, never x_k itself, and inserts the
/// rejected trial point.
void replace_on_reject(InterpolationSet& Y, const Vector& x_k, const Vector& trial,
                       double f_trial);

/// Lagrange polynomial of point `index` of Y, expressed as a quadratic in the
/// step relative to x_k. Test and geometry-phase helper.
QuadraticModel lagrange_polynomial(const InterpolationSet& Y, const Vector& x_k,
                                   int index);

/// Replaces the point of Y farthest from x_k by an approximate maximizer of
/// the absolute Lagrange polynomial of the evicted point over the ball of
/// radius delta, evaluating the objective there (ledger ticks).
void improve_geometry(InterpolationSet& Y, const Vector& x_k, double delta,
                      const ConstrainedProblem& problem, EvalLedger& ledger);

}  // namespace fibo
