#pragma once

#include "wpt/manifold.hpp"
#include "wpt/ot.hpp"

namespace wpt {

/// Probability measure on the tangent space at one point.
struct TangentMeasure {
  ManifoldPoint base;
  VectorMeasure fiber;
};

/// Geodesic t -> exp(start, t v), t in [0, 1].
struct DeltaGeodesic {
  Manifold manifold;
  TangentVec velocity;  // based at the start point

  [[nodiscard]] ManifoldPoint at(double t) const;
  /// Velocity at time t, based at at(t).
  [[nodiscard]] TangentVec velocity_at(double t) const;
};

/// One Petrunin step on the segment starting at the base of segment_velocity:
/// pushes nu (based at exp of that velocity) through the inverse of d exp.
TangentMeasure petrunin_delta_step(const Manifold &m, const TangentVec &segment_velocity, const TangentMeasure &nu);

/// Composition of Q steps over the segments [i/Q, (i+1)/Q].
TangentMeasure petrunin_delta_transport(const DeltaGeodesic &g, const TangentMeasure &nu1, int Q);

/// Pushforward of nu1 under reverse parallel transport from g(1) to g(0).
TangentMeasure exact_delta_transport(const DeltaGeodesic &g, const TangentMeasure &nu1);

/// W2 in the flat metric of the shared tangent space. Throws BaseMismatch.
double tangent_w2(const Manifold &m, const TangentMeasure &a, const TangentMeasure &b, const OtOptions &opt = {});

}  // namespace wpt
