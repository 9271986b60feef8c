#pragma once

#include <functional>
#include <vector>

#include "wpt/carrier.hpp"
#include "wpt/ctransform.hpp"
#include "wpt/ot.hpp"

namespace wpt {

/// Outcome of the gradient test for a vector field along a closed curve.
struct TangentialGradientVerdict {
  bool is_gradient = false;
  double loop_integral = 0.0;     // closed-loop integral of <v, tau> ds
  std::vector<double> potential;  // cumulative integral, mu-mean zero
};

/// Tests whether the tangential parts of `vectors` (one per carrier sample)
/// form a gradient along the closed curve S: |loop integral| <= tol. The
/// potential is returned in either case.
TangentialGradientVerdict tangential_gradient_check(const Carrier &S, const std::vector<Vec3> &vectors,
                                                    const std::vector<double> &weights, double tol);

struct CylinderReport {
  int n = 0;
  double lp_cost = 0.0;
  double vertical_cost = 0.0;  // 1/2 sum w_i F_i^2
  bool plan_is_vertical = false;
  long pivots = 0;
  std::vector<Vec3> velocities;  // barycentric initial velocity per particle
  std::vector<double> recovered;  // potential on S from the tangential velocities
  std::vector<double> expected;   // -F^2/2, centered the same way
  double max_potential_error = 0.0;
  double loop_integral = 0.0;
  double max_tangential = 0.0;  // sup |v_T|
};

/// Transport from mu0 on the graph of F in the cylinder of circumference
/// 2 pi down to its vertical projection on the base circle. mu0 has weights
/// proportional to 1 + cos(x)/4 at the equispaced angles x_i.
CylinderReport cylinder_example(const std::vector<double> &F, const OtOptions &opt = {});
CylinderReport cylinder_example(const std::function<double(double)> &F, int n, const OtOptions &opt = {});

struct SubmanifoldGeodesicOptions {
  double t_max = 0.0;  // <= 0: 0.2 * injectivity radius / max speed
  int steps = 4;       // measures at t_max * k / steps, k = 0..steps
  /// When nonempty, f is first scaled by scale_to_c_convex on this probe.
  std::vector<ManifoldPoint> probe;
  double c_convex_tol = 1e-9;
  OtOptions ot;
};

struct SubmanifoldGeodesic {
  std::vector<double> times;
  std::vector<ParticleMeasure> measures;
  std::vector<Vec3> velocities;  // particle velocities, source-major
  std::vector<int> source;       // carrier sample of each particle
  double epsilon = 1.0;          // scale applied to f
  double t_max = 0.0;
  /// max_k |W2(mu_0, mu_tk) - t_k W2(mu_0, mu_tmax) / t_max|
  double constant_speed_error = 0.0;
  /// max_k (cost of (x, exp_x(t_k v)) - LP optimum), relative to the optimum
  double direct_coupling_gap = 0.0;
};

/// Particle flow mu_t = pi_*(E_t)_* nu for nu with tangential part grad_S f
/// and normal parts from `normal_fibers` (one measure per carrier sample, in
/// ambient chart components). Throws CutLocus if a ray reaches the cut locus
/// before t_max.
SubmanifoldGeodesic geodesic_from_submanifold(const Carrier &S, const std::vector<double> &weights,
                                              const std::vector<double> &f,
                                              const std::vector<VectorMeasure> &normal_fibers,
                                              const SubmanifoldGeodesicOptions &opt = {});

struct LevelReport {
  double t = 0.0;
  double loop_integral = 0.0;           // of V_tan over the level circle
  double decomposition_residual = 0.0;  // sup |V - grad phi - |grad phi|/|grad T| grad T|
  double max_multiplier_residual = 0.0; // sup |<grad phi, grad T> - 1 + |grad phi||grad T||
  double mean_eta = 0.0;                // mean of -|grad phi|/|grad T|
  double mean_half_speed_sq = 0.0;      // mean of |V|^2 / 2
  double mean_half_ratio = 0.0;         // mean of |grad phi| / (2 |grad T|)
};

struct ElReport {
  int rays = 0;
  double max_speed_deviation = 0.0;
  std::vector<LevelReport> levels;
};

/// Transport between measures on the horizontal circles y = y0 and y = y1 of
/// the 2-torus, with level function T = (y - y0) / (y1 - y0) (y1 - y0 taken
/// as the shortest representative). Rays come from an exact OT solve.
ElReport el_diagnostics(const ParticleMeasure &mu0, const ParticleMeasure &mu1, const std::vector<double> &levels,
                        const OtOptions &opt = {});

}  // namespace wpt
