#pragma once

#include <Eigen/Dense>

#include "wpt/errors.hpp"

namespace wpt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Chart coordinates of a point. Torus: (x, y, 0) with each coordinate in
// [0, period); sphere: unit 3-vector; cylinder: (arc angle in
// [0, circumference), height, 0).
struct ManifoldPoint {
  Vec3 coords = Vec3::Zero();
};

// A tangent vector together with its base point. Torus and cylinder use the
// flat chart frame (unused trailing components are zero); the sphere uses
// ambient components orthogonal to the base.
struct TangentVec {
  ManifoldPoint base;
  Vec3 components = Vec3::Zero();

  [[nodiscard]] double norm() const { return components.norm(); }
};

enum class ManifoldKind { FlatTorus, Sphere2, Cylinder };

/// Closed-form Riemannian model: flat torus T^1 / T^2, the unit sphere S^2,
/// or the flat cylinder S^1 x R. All geodesic quantities are evaluated in
/// closed form; nothing here integrates ODEs.
class Manifold {
 public:
  static Manifold flat_torus(int dim, Vec2 periods = Vec2(1.0, 1.0));
  static Manifold sphere();
  static Manifold cylinder(double circumference);

  [[nodiscard]] ManifoldKind kind() const { return kind_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const Vec2 &periods() const { return periods_; }
  [[nodiscard]] double circumference() const { return periods_.x(); }
  [[nodiscard]] bool is_compact() const { return kind_ != ManifoldKind::Cylinder; }

  /// Largest r such that log is defined on the open ball of radius r.
  [[nodiscard]] double injectivity_radius() const;
  /// Radius beyond which d exp_p is singular (infinite for flat models).
  [[nodiscard]] double conjugate_radius() const;

  /// Canonical representative of a chart coordinate triple.
  [[nodiscard]] ManifoldPoint point(const Vec3 &raw) const;
  [[nodiscard]] ManifoldPoint point(double a, double b = 0.0) const;
  /// Tangent vector at p; sphere components are projected onto T_pS^2.
  [[nodiscard]] TangentVec tangent(const ManifoldPoint &p, const Vec3 &raw) const;

  [[nodiscard]] ManifoldPoint exp(const TangentVec &v) const;
  /// Throws CutLocus if q lies within 1e-9 of the cut locus of p.
  [[nodiscard]] TangentVec log(const ManifoldPoint &p, const ManifoldPoint &q) const;
  [[nodiscard]] double dist(const ManifoldPoint &p, const ManifoldPoint &q) const;

  /// Parallel transport of w along t -> exp(p, t v) to t = 1.
  [[nodiscard]] TangentVec transport_along_geodesic(const TangentVec &v,
                                                    const TangentVec &w) const;
  /// Velocity at t = 1 of t -> exp(p, t v).
  [[nodiscard]] TangentVec geodesic_velocity(const TangentVec &v) const;
  /// d(exp_p)_v (w), based at exp(p, v).
  [[nodiscard]] TangentVec dexp(const TangentVec &v, const TangentVec &w) const;
  /// Inverse of dexp at v applied to u in T_{exp(p,v)}M. Throws ConjugatePoint.
  [[nodiscard]] TangentVec dexp_inverse(const TangentVec &v, const TangentVec &u) const;

  [[nodiscard]] double inner(const TangentVec &a, const TangentVec &b) const;

  friend bool operator==(const Manifold &a, const Manifold &b) {
    return a.kind_ == b.kind_ && a.dim_ == b.dim_ && a.periods_ == b.periods_;
  }

 private:
  Manifold(ManifoldKind kind, int dim, Vec2 periods) : kind_(kind), dim_(dim), periods_(periods) {}

  void require_same_base(const TangentVec &a, const TangentVec &b, const char *op) const;
  [[nodiscard]] double wrap_displacement(double d, double period) const;

  ManifoldKind kind_;
  int dim_;
  Vec2 periods_;  // torus periods; cylinder stores its circumference in x
};

/// Tolerance below the cut locus at which log refuses to answer.
inline constexpr double kCutLocusMargin = 1e-9;

}  // namespace wpt
