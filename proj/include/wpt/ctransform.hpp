#pragma once

#include <vector>

#include "wpt/manifold.hpp"

namespace wpt {

/// Values of a function on a finite sample (the carrier) of a submanifold S.
struct DiscreteFunctionOnS {
  Manifold manifold;
  std::vector<ManifoldPoint> carrier;
  std::vector<double> values;

  [[nodiscard]] int size() const { return static_cast<int>(carrier.size()); }
  [[nodiscard]] DiscreteFunctionOnS scaled(double s) const;
  void validate() const;
};

/// psi^c(x) = min_s psi(s) + d(s,x)^2/2 over the carrier, at each eval point.
std::vector<double> c_transform_of_psi(const DiscreteFunctionOnS &psi, const std::vector<ManifoldPoint> &eval_points);

/// eta^c(s) = max_x eta(x) - d(s,x)^2/2 over the given points of M.
DiscreteFunctionOnS c_transform_of_eta(const Manifold &manifold, const std::vector<ManifoldPoint> &points,
                                       const std::vector<double> &eta,
                                       const std::vector<ManifoldPoint> &carrier);

/// Largest distance from a probe point to its nearest neighbour in the probe.
double probe_mesh(const Manifold &manifold, const std::vector<ManifoldPoint> &probe);

struct CConvexityVerdict {
  bool c_convex = false;
  double max_gap = 0.0;  // max_s |F(s) - (F^c)^c(s)|
  double mesh = 0.0;
};

CConvexityVerdict is_c_convex(const DiscreteFunctionOnS &F, const std::vector<ManifoldPoint> &probe, double tol);

struct ScaleResult {
  double epsilon = 0.0;
  int depth = 0;  // number of is_c_convex evaluations
};

/// Largest tested epsilon in (0, 1] with epsilon * F c-convex on the probe:
/// halving from 1 until success, then bisection. Throws NotFound if 2^-20 fails.
ScaleResult scale_to_c_convex(const DiscreteFunctionOnS &F, const std::vector<ManifoldPoint> &probe, double tol,
                              int bisection_steps = 30);

/// Tests F(s) + <w, w'> <= F(s') + tol |w'| for every carrier point
/// s' = exp_s(w') with 0 < |w'| <= radius.
bool subdifferential_check(const DiscreteFunctionOnS &F, int s_index, const TangentVec &w, double tol,
                           double radius);

}  // namespace wpt
