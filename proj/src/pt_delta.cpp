#include "wpt/pt_delta.hpp"

namespace wpt {

namespace {

void require_interior(const DeltaGeodesic &g) {
  if (g.velocity.norm() >= g.manifold.injectivity_radius() - kCutLocusMargin)
    throw Error(ErrorCode::CutLocus, "geodesic is not inside a minimizing geodesic");
}

}  // namespace

ManifoldPoint DeltaGeodesic::at(double t) const {
  return manifold.exp({velocity.base, t * velocity.components});
}

TangentVec DeltaGeodesic::velocity_at(double t) const {
  return manifold.transport_along_geodesic({velocity.base, t * velocity.components}, velocity);
}

TangentMeasure petrunin_delta_step(const Manifold &m, const TangentVec &segment_velocity, const TangentMeasure &nu) {
  nu.fiber.validate();
  TangentMeasure out{segment_velocity.base, nu.fiber};
  for (Vec3 &w : out.fiber.vectors) w = m.dexp_inverse(segment_velocity, {nu.base, w}).components;
  return out;
}

TangentMeasure petrunin_delta_transport(const DeltaGeodesic &g, const TangentMeasure &nu1, int Q) {
  if (Q < 1) throw Error(ErrorCode::InvalidArgument, "petrunin_delta_transport: Q must be positive");
  require_interior(g);
  if (g.manifold.dist(nu1.base, g.at(1.0)) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "nu1 must be based at the endpoint of the geodesic");
  TangentMeasure nu = nu1;
  for (int i = Q - 1; i >= 0; --i) {
    TangentVec v = g.velocity_at(static_cast<double>(i) / Q);
    v.components /= Q;
    // Re-anchor at the computed segment endpoint so the base check sees no drift.
    nu.base = g.manifold.exp(v);
    nu = petrunin_delta_step(g.manifold, v, nu);
  }
  return nu;
}

TangentMeasure exact_delta_transport(const DeltaGeodesic &g, const TangentMeasure &nu1) {
  require_interior(g);
  const TangentVec back{nu1.base, -g.velocity_at(1.0).components};
  if (g.manifold.dist(nu1.base, g.at(1.0)) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "nu1 must be based at the endpoint of the geodesic");
  TangentMeasure out{g.velocity.base, nu1.fiber};
  for (Vec3 &w : out.fiber.vectors) w = g.manifold.transport_along_geodesic(back, {nu1.base, w}).components;
  return out;
}

double tangent_w2(const Manifold &m, const TangentMeasure &a, const TangentMeasure &b, const OtOptions &opt) {
  if (m.dist(a.base, b.base) > 1e-10) throw Error(ErrorCode::BaseMismatch, "tangent measures at different points");
  return wasserstein2_flat(a.fiber, b.fiber, opt);
}

}  // namespace wpt
