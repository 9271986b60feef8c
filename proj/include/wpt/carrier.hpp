#pragma once

#include <vector>

#include "wpt/grid.hpp"
#include "wpt/manifold.hpp"

namespace wpt {

enum class CarrierKind { PointSet, TorusCircle, TorusLoop, CylinderGraph, TorusGrid };

/// Finite sample of a submanifold S of M. One-dimensional carriers are
/// closed curves whose points are stored in parametrization order.
class Carrier {
 public:
  /// Isolated points (dim S = 0).
  static Carrier point_set(const Manifold &m, std::vector<ManifoldPoint> points);
  /// Round circle of the given radius in T^2, n equispaced samples.
  static Carrier torus_circle(const Manifold &torus, const Vec2 &center, double radius, int n);
  /// Horizontal closed geodesic y = y0 of T^2, n equispaced samples.
  static Carrier torus_loop(const Manifold &torus, double y0, int n);
  /// Graph {(x, F(x))} in the cylinder with F sampled at n equispaced angles.
  static Carrier cylinder_graph(const Manifold &cylinder, std::vector<double> heights);
  /// Every node of a periodic grid covering T^2 (S = M).
  static Carrier torus_grid(const Manifold &torus, const PeriodicGrid &grid);

  [[nodiscard]] const Manifold &manifold() const { return manifold_; }
  [[nodiscard]] CarrierKind kind() const { return kind_; }
  [[nodiscard]] const std::vector<ManifoldPoint> &points() const { return points_; }
  [[nodiscard]] int size() const { return static_cast<int>(points_.size()); }
  [[nodiscard]] int dim() const;
  [[nodiscard]] int codim() const { return manifold_.dim() - dim(); }

  /// Unit tangent of a curve carrier at sample k.
  [[nodiscard]] Vec3 unit_tangent(int k) const;
  /// Unit normal of a codimension-one carrier at sample k.
  [[nodiscard]] Vec3 unit_normal(int k) const;
  /// Arc length from sample k to sample k+1 (cyclically) for curve carriers.
  [[nodiscard]] double segment_length(int k) const;
  [[nodiscard]] double total_length() const;

  /// Central-difference gradient of f along S at every sample, as ambient
  /// chart components. Zero for point sets.
  [[nodiscard]] std::vector<Vec3> tangential_gradient(const std::vector<double> &f) const;

  friend bool operator==(const Carrier &a, const Carrier &b);

 private:
  Carrier(Manifold m, CarrierKind kind) : manifold_(m), kind_(kind) {}

  Manifold manifold_;
  CarrierKind kind_;
  std::vector<ManifoldPoint> points_;
  std::vector<double> heights_;  // cylinder graph
  Vec2 center_ = Vec2::Zero();   // torus circle
  double radius_ = 0.0;
  PeriodicGrid grid_;
};

/// Splits v at carrier sample k into its parts tangent and normal to S.
struct TangentNormal {
  Vec3 tangential;
  Vec3 normal;
};
TangentNormal tangential_normal_split(const Carrier &S, int k, const Vec3 &v);

}  // namespace wpt
