#pragma once

#include <vector>

#include "wpt/carrier.hpp"
#include "wpt/grid.hpp"
#include "wpt/ot.hpp"

namespace wpt {

/// Element of the tangent cone at a measure mu with full support on a
/// carrier S: a potential f on S (tangential part grad_S f) plus one
/// probability measure on the normal space at every sample.
class ConeElement {
 public:
  ConeElement(Carrier carrier, std::vector<double> weights, std::vector<double> potential,
              std::vector<VectorMeasure> fibers);
  /// The cone vertex: zero potential, every fiber the delta at 0.
  static ConeElement vertex(Carrier carrier, std::vector<double> weights);

  [[nodiscard]] const Carrier &carrier() const { return carrier_; }
  [[nodiscard]] const std::vector<double> &weights() const { return weights_; }
  /// Stored centered: sum_s mu(s) f(s) = 0.
  [[nodiscard]] const std::vector<double> &potential() const { return potential_; }
  [[nodiscard]] const std::vector<VectorMeasure> &fibers() const { return fibers_; }

  /// Radial rescaling by lambda >= 0 (potential and every fiber vector).
  [[nodiscard]] ConeElement scaled(double lambda) const;

 private:
  Carrier carrier_;
  std::vector<double> weights_;
  std::vector<double> potential_;
  std::vector<VectorMeasure> fibers_;
};

struct ConeDistance {
  double distance = 0.0;
  double tangential_sq = 0.0;  // sum mu |grad f_a - grad f_b|^2
  double normal_sq = 0.0;      // sum mu W2^2(fiber_a, fiber_b)
  /// sum mu <grad f_a, grad f_b> + normal_sq, the inner-product form of the
  /// tangential term. Diagnostic only.
  double literal_inner_form = 0.0;
};

/// Throws BaseMismatch unless both elements sit over the same carrier and weights.
ConeDistance cone_distance(const ConeElement &a, const ConeElement &b, const OtOptions &opt = {});

struct GradientProjection {
  GridField potential;       // mean zero, Nyquist free
  GridVectorField gradient;  // spectral gradient of the potential
  int iterations = 0;
  double relative_residual = 0.0;
};

/// L^2(rho)-orthogonal projection of V onto gradient fields, by solving
/// div(rho grad g) = div(rho V) with preconditioned conjugate gradients.
/// Throws SolverDiverged if the relative residual stays above 1e-10.
GradientProjection project_gradient(const GridField &rho, const GridVectorField &V);

}  // namespace wpt
