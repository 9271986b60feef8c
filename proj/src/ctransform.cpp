#include "wpt/ctransform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wpt {

DiscreteFunctionOnS DiscreteFunctionOnS::scaled(double s) const {
  DiscreteFunctionOnS out = *this;
  for (double &v : out.values) v *= s;
  return out;
}

void DiscreteFunctionOnS::validate() const {
  if (carrier.size() != values.size())
    throw Error(ErrorCode::InvalidArgument, "DiscreteFunctionOnS: carrier and values differ in length");
  if (carrier.empty()) throw Error(ErrorCode::InvalidArgument, "DiscreteFunctionOnS: empty carrier");
}

std::vector<double> c_transform_of_psi(const DiscreteFunctionOnS &psi, const std::vector<ManifoldPoint> &eval_points) {
  psi.validate();
  std::vector<double> out(eval_points.size());
  const long n = static_cast<long>(eval_points.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < psi.size(); ++s) {
      const double d = psi.manifold.dist(psi.carrier[s], eval_points[k]);
      const double c = 0.5 * d * d;
      // Rounded down so that subtracting c again never exceeds psi(s).
      double v = psi.values[s] + c;
      while (v - c > psi.values[s]) v = std::nextafter(v, -std::numeric_limits<double>::infinity());
      best = std::min(best, v);
    }
    out[k] = best;
  }
  return out;
}

DiscreteFunctionOnS c_transform_of_eta(const Manifold &manifold, const std::vector<ManifoldPoint> &points,
                                       const std::vector<double> &eta,
                                       const std::vector<ManifoldPoint> &carrier) {
  if (points.size() != eta.size() || points.empty())
    throw Error(ErrorCode::InvalidArgument, "c_transform_of_eta: points and values differ in length");
  DiscreteFunctionOnS out{manifold, carrier, std::vector<double>(carrier.size())};
  const long n = static_cast<long>(carrier.size());
#pragma omp parallel for schedule(static)
  for (long s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < points.size(); ++k) {
      const double d = manifold.dist(carrier[s], points[k]);
      best = std::max(best, eta[k] - 0.5 * d * d);
    }
    out.values[s] = best;
  }
  return out;
}

double probe_mesh(const Manifold &manifold, const std::vector<ManifoldPoint> &probe) {
  double mesh = 0.0;
  for (size_t p = 0; p < probe.size(); ++p) {
    double nearest = std::numeric_limits<double>::infinity();
    for (size_t q = 0; q < probe.size(); ++q)
      if (q != p) nearest = std::min(nearest, manifold.dist(probe[p], probe[q]));
    if (std::isfinite(nearest)) mesh = std::max(mesh, nearest);
  }
  return mesh;
}

CConvexityVerdict is_c_convex(const DiscreteFunctionOnS &F, const std::vector<ManifoldPoint> &probe, double tol) {
  F.validate();
  const auto Fc = c_transform_of_psi(F, probe);
  const auto Fcc = c_transform_of_eta(F.manifold, probe, Fc, F.carrier);
  CConvexityVerdict v;
  for (int s = 0; s < F.size(); ++s) v.max_gap = std::max(v.max_gap, std::abs(F.values[s] - Fcc.values[s]));
  v.c_convex = v.max_gap <= tol;
  v.mesh = probe_mesh(F.manifold, probe);
  return v;
}

ScaleResult scale_to_c_convex(const DiscreteFunctionOnS &F, const std::vector<ManifoldPoint> &probe, double tol,
                              int bisection_steps) {
  ScaleResult r;
  auto passes = [&](double eps) {
    ++r.depth;
    return is_c_convex(F.scaled(eps), probe, tol).c_convex;
  };
  if (passes(1.0)) {
    r.epsilon = 1.0;
    return r;
  }
  double hi = 1.0;
  double lo = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double eps = std::ldexp(1.0, -k);
    if (passes(eps)) {
      lo = eps;
      break;
    }
    hi = eps;
  }
  if (lo == 0.0) throw Error(ErrorCode::NotFound, "epsilon * F is not c-convex on the probe even at 2^-20");
  for (int k = 0; k < bisection_steps; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) lo = mid;
    else hi = mid;
  }
  r.epsilon = lo;
  return r;
}

bool subdifferential_check(const DiscreteFunctionOnS &F, int s_index, const TangentVec &w, double tol,
                           double radius) {
  F.validate();
  if (s_index < 0 || s_index >= F.size()) throw Error(ErrorCode::InvalidArgument, "subdifferential_check: bad index");
  const ManifoldPoint &s = F.carrier[s_index];
  for (int k = 0; k < F.size(); ++k) {
    if (k == s_index) continue;
    if (F.manifold.dist(s, F.carrier[k]) > radius) continue;
    const TangentVec wp = F.manifold.log(s, F.carrier[k]);
    const double len = wp.norm();
    if (len == 0.0) continue;
    if (F.values[s_index] + w.components.dot(wp.components) > F.values[k] + tol * len) return false;
  }
  return true;
}

}  // namespace wpt
