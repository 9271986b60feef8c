#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "wpt/grid.hpp"
#include "wpt/tangent_cone.hpp"

namespace wpt {

/// State of the geodesic at one time t. Every field lives on the Eulerian
/// grid; `preimage` holds the Lagrangian label x0 of each node y, i.e.
/// y = x0 + t * v0(x0) with v0 the initial velocity.
struct GeodesicSlice {
  double t = 0.0;
  GridField rho;             // mean one
  GridField phi;             // periodic part of the potential, with int phi d mu_t = 0
  GridVectorField velocity;  // grad phi_t at the nodes, carried from the labels
  std::vector<Vec2> preimage;
  GridField jacobian;  // det(I + t Hess phi0) at the labels
  double continuity_residual = 0.0;  // sup |d_t rho + div(rho grad phi_t)|
  double hj_residual = 0.0;          // sup |grad_spectral phi_t - velocity|
  double c2_norm = 0.0;              // sup|phi| + sup|grad phi| + sup|Hess phi|
};

struct GeodesicDiagnostics {
  double continuity_residual = 0.0;
  double hj_residual = 0.0;
  double c2_norm = 0.0;
  double min_jacobian = 0.0;  // over t in [0, 1] and the grid
};

/// Wasserstein geodesic on the flat 2-torus generated by the potential
/// phi0(x) = a.x + p(x) with p periodic: mu_t = (x -> x + t grad phi0(x))_* mu_0.
class SmoothGeodesic {
 public:
  SmoothGeodesic(const GridField &rho0, const GridField &phi0_periodic, int K, const Vec2 &drift);

  [[nodiscard]] const PeriodicGrid &grid() const { return grid_; }
  [[nodiscard]] int steps() const { return K_; }
  [[nodiscard]] double time(int k) const { return static_cast<double>(k) / K_; }
  [[nodiscard]] const Vec2 &drift() const { return drift_; }
  [[nodiscard]] const SpectralInterpolant &initial_potential() const { return phi0_; }
  [[nodiscard]] const GeodesicSlice &slice(int k) const { return slices_.at(k); }
  [[nodiscard]] const GeodesicDiagnostics &diagnostics() const { return diag_; }

  /// Slice at an arbitrary time in [0, 1].
  [[nodiscard]] GeodesicSlice compute_slice(double t) const;
  /// Lagrangian labels x0 with x0 + t v0(x0) = y. Throws MapDegenerate if
  /// Newton's method fails.
  [[nodiscard]] std::vector<Vec2> labels(std::span<const Vec2> y, double t) const;

 private:
  PeriodicGrid grid_;
  int K_;
  Vec2 drift_;
  SpectralInterpolant rho0_;
  SpectralInterpolant phi0_;
  std::vector<GeodesicSlice> slices_;
  GeodesicDiagnostics diag_;
};

/// Throws MapDegenerate if det(I + t Hess phi0) <= 0.1 somewhere for t <= 1.
SmoothGeodesic build_geodesic(const GridField &rho0, const GridField &phi0_periodic, int K,
                              const Vec2 &drift = Vec2::Zero());

/// Potentials eta(t_k) on the time grid of a geodesic plus the endpoint potentials.
struct TransportTriple {
  std::vector<GridField> eta;
  GridField eta0;
  GridField eta1;
};

struct PdeOptions {
  int substeps = 1;  // RK4 steps per geodesic time step
};

/// Backward RK4 integration of the parallel transport equation from
/// eta(1) = eta1, fixing constants by mean-centering against dvol.
TransportTriple solve_pt_pde(const SmoothGeodesic &g, const GridField &eta1, const PdeOptions &opt = {});

/// int <grad eta, grad eta_bar> d mu_{t_k}.
double pairing(const SmoothGeodesic &g, const GridField &eta, const GridField &eta_bar, int k);
/// L^2(mu_{t_k}) norm of grad eta.
double gradient_norm(const SmoothGeodesic &g, const GridField &eta, int k);

// --- Petrunin discretization -------------------------------------------------

/// A gradient field with its potential.
struct PotentialField {
  GridField potential;
  GridVectorField gradient;
};

struct InvertResult {
  PotentialField sigma;
  int iterations = 0;
  double residual = 0.0;         // ||A sigma - target|| in L^2(mu_{i,1})
  double contraction = 0.0;      // ||(AB - I) target|| / ||target||
};

struct PetruninRecord {
  TransportTriple triple;
  std::vector<double> norm_ratio;  // ||V_Q(t_k)|| / ||grad eta1|| per time node
  double drift = 0.0;              // sup_k |norm_ratio - 1|
  int max_inner_iterations = 0;
  double max_contraction = 0.0;
};

/// The Q-segment subdivision of a geodesic, with slices at the segment
/// nodes cached on first use. Segment i covers [i/Q, (i+1)/Q].
class PetruninScheme {
 public:
  PetruninScheme(const SmoothGeodesic &g, int Q);

  [[nodiscard]] const SmoothGeodesic &geodesic() const { return *g_; }
  [[nodiscard]] int segments() const { return Q_; }
  /// Slice at i/Q.
  [[nodiscard]] const GeodesicSlice &node(int i) const;

  /// W_sigma(u) on the grid at time (i+u)/Q: grad sigma carried along the
  /// flow F_{i,u} (d exp is the identity on the flat torus).
  [[nodiscard]] GridVectorField push_field_W(int i, const GridField &sigma, double u) const;
  /// Same, using an already computed slice at time (i+u)/Q.
  [[nodiscard]] GridVectorField push_field_W(int i, const GridField &sigma, const GeodesicSlice &at) const;
  /// L_sigma(u): projection of W onto gradients in L^2(mu_{i,u}).
  [[nodiscard]] PotentialField project_L(int i, double u, const GridVectorField &W) const;
  [[nodiscard]] PotentialField apply_A(int i, const GridField &sigma) const;
  /// grad(f o F_{i,1}) on mu_{i,0}.
  [[nodiscard]] PotentialField apply_B(int i, const GridField &f) const;
  /// Neumann-series solve of A sigma = target (target given by its potential).
  /// Throws NotContractive or MaxIterations.
  [[nodiscard]] InvertResult invert_A(int i, const GridField &target, double tol, int max_iterations = 100) const;
  [[nodiscard]] InvertResult invert_A(int i, const GridVectorField &target, double tol,
                                      int max_iterations = 100) const;
  /// max over the samples of ||(A_i B_i - I) grad f|| / ||grad f|| in L^2(mu_{i,1}).
  [[nodiscard]] double sample_AB_minus_I(int i, std::span<const GridField> samples) const;

 private:
  [[nodiscard]] const GeodesicSlice &slice_at(int i, double u, GeodesicSlice &scratch) const;

  const SmoothGeodesic *g_;
  int Q_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::unique_ptr<GeodesicSlice>> nodes_;
};

/// Backward recursion over the segments starting from the last one, then
/// V_Q(t_k) = L_{sigma_i}(Q t_k - i) on the geodesic's time grid.
PetruninRecord petrunin_transport(const SmoothGeodesic &g, const GridField &eta1, int Q, double tol = 1e-10);

}  // namespace wpt
