#pragma once

#include <vector>

#include "wpt/pt_smooth.hpp"

namespace wpt {

/// Space-time test function f sampled on the geodesic's time grid.
struct SpaceTimeTest {
  std::vector<GridField> values;
  /// d f / dt on the same nodes. Left empty, it is taken by second-order
  /// finite differences of `values`.
  std::vector<GridField> time_derivative;
};

/// LHS - RHS of the weak parallel transport identity for the triple:
///   int <grad f(1), grad eta1> d mu_1 - int <grad f(0), grad eta0> d mu_0
///   - int_0^1 int (<grad d_t f, grad eta> + Hess f(grad eta, grad phi)) d mu_t dt,
/// with the time integral by the trapezoidal rule.
double weak_residual(const SmoothGeodesic &g, const TransportTriple &triple, const SpaceTimeTest &f);

struct SuiteRow {
  int kx = 0;
  int ky = 0;
  bool sine = false;  // sin or cos of 2 pi (kx x + ky y)
  int degree = 0;     // time factor t^degree
  double residual = 0.0;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  double max_residual = 0.0;
};

/// weak_residual over f = t^d h for every Fourier mode h with wave vector in
/// a half plane and |k|_inf <= max_frequency, and every d <= time_degree.
SuiteResult residual_suite(const SmoothGeodesic &g, const TransportTriple &triple, int max_frequency,
                           int time_degree);

}  // namespace wpt
