#pragma once

#include <vector>

#include "wpt/manifold.hpp"
#include "wpt/network_simplex.hpp"

namespace wpt {

/// Weighted point cloud on a manifold; weights are positive and sum to one.
class ParticleMeasure {
 public:
  ParticleMeasure(Manifold manifold, std::vector<ManifoldPoint> points, std::vector<double> weights);
  static ParticleMeasure uniform(Manifold manifold, std::vector<ManifoldPoint> points);
  static ParticleMeasure delta(Manifold manifold, const ManifoldPoint &p);

  [[nodiscard]] const Manifold &manifold() const { return manifold_; }
  [[nodiscard]] const std::vector<ManifoldPoint> &points() const { return points_; }
  [[nodiscard]] const std::vector<double> &weights() const { return weights_; }
  [[nodiscard]] int size() const { return static_cast<int>(points_.size()); }

 private:
  Manifold manifold_;
  std::vector<ManifoldPoint> points_;
  std::vector<double> weights_;
};

/// Optimal plan between two particle measures for the cost d^2/2.
struct Coupling {
  ParticleMeasure source;
  ParticleMeasure target;
  std::vector<TransportEntry> plan;
  double cost = 0.0;
  long pivots = 0;

  [[nodiscard]] std::vector<double> dense() const;
  /// Largest marginal violation (rows against source, columns against target).
  [[nodiscard]] double marginal_error() const;
};

struct OtOptions {
  int size_cap = 4096;
};

/// Cost matrix C_ij = d(x_i, y_j)^2 / 2, row-major.
std::vector<double> half_squared_distance_matrix(const ParticleMeasure &mu, const ParticleMeasure &nu);

Coupling solve_exact_ot(const ParticleMeasure &mu, const ParticleMeasure &nu, const OtOptions &opt = {});
double wasserstein2(const ParticleMeasure &mu, const ParticleMeasure &nu, const OtOptions &opt = {});
/// Particles exp(x_i, t log(x_i, y_j)) with weight P_ij. Throws CutLocus.
ParticleMeasure displacement_interpolation(const Coupling &c, double t);

/// Weighted cloud of vectors in a flat fiber (a tangent or normal space).
struct VectorMeasure {
  std::vector<Vec3> vectors;
  std::vector<double> weights;

  static VectorMeasure delta(const Vec3 &v) { return {{v}, {1.0}}; }
  [[nodiscard]] int size() const { return static_cast<int>(vectors.size()); }
  void validate() const;
};

/// W2 in the Euclidean metric of the fiber, by exact LP.
double wasserstein2_flat(const VectorMeasure &a, const VectorMeasure &b, const OtOptions &opt = {});
/// W2 between measures on a line via the sorted-quantile formula.
double wasserstein2_line(std::vector<double> xa, std::vector<double> wa, std::vector<double> xb,
                         std::vector<double> wb);

}  // namespace wpt
