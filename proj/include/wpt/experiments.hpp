#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wpt/pt_delta.hpp"
#include "wpt/pt_smooth.hpp"
#include "wpt/tangent_cone.hpp"

namespace wpt {

// Scenario builders shared by the command-line runner and the acceptance suite.

using Rng = std::mt19937_64;

/// Geodesic from the uniform density on the unit torus (n x n grid, K steps)
/// with potential epsilon * cos(2 pi x) plus the affine part drift . x.
SmoothGeodesic cosine_geodesic(int n, int K, double epsilon, const Vec2 &drift = Vec2::Zero());

/// sin(2 pi x) + cos(2 pi y) + cos(2 pi (x + y)) / 2, scaled to unit gradient
/// norm in L^2(mu_1).
GridField reference_eta1(const SmoothGeodesic &g);

/// Two further endpoint potentials, cos(2 pi (x - y)) and
/// sin(4 pi y) + 0.3 cos(2 pi x), for pairing checks against reference_eta1.
std::vector<GridField> reference_companions(const SmoothGeodesic &g);

/// max_k |P(t_k) - P(1)| / (||grad a(1)|| ||grad b(1)||) with
/// P(t) = int <grad a, grad b> d mu_t.
double pairing_drift(const SmoothGeodesic &g, const TransportTriple &a, const TransportTriple &b);

/// Trapezoidal int_0^1 ||grad eta(t)||^2_{mu_t} dt.
double transport_energy(const SmoothGeodesic &g, const TransportTriple &triple);

/// Sphere geodesic from the north pole towards (1, 0, 0) with the given length.
DeltaGeodesic sphere_meridian(double length);

/// count vectors at `base` with i.i.d. normal chart components of standard
/// deviation `spread` (projected to the tangent space), uniform weights.
TangentMeasure random_tangent_measure(const Manifold &m, const ManifoldPoint &base, int count, double spread,
                                      Rng &rng);

/// count uniformly distributed points with uniform weights.
ParticleMeasure random_uniform_measure(const Manifold &m, int count, Rng &rng);

/// Cone element over a circle carrier: random low-mode potential and
/// fibers of fiber_size random normal vectors.
ConeElement random_cone_element(const Carrier &S, const std::vector<double> &weights, int fiber_size, Rng &rng);

/// Quantile points of the density 1 + amplitude cos(2 pi x) on [0, 1).
std::vector<double> cosine_quantiles(int n, double amplitude);

}  // namespace wpt
