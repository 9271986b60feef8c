#include "wpt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wpt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

SmoothGeodesic cosine_geodesic(int n, int K, double epsilon, const Vec2 &drift) {
  const PeriodicGrid G{n, n};
  const GridField rho0(G, 1.0);
  const GridField phi0 = sample(G, [&](double x, double) { return epsilon * std::cos(kTwoPi * x); });
  return build_geodesic(rho0, phi0, K, drift);
}

GridField reference_eta1(const SmoothGeodesic &g) {
  const GridField eta = sample(g.grid(), [](double x, double y) {
    return std::sin(kTwoPi * x) + std::cos(kTwoPi * y) + 0.5 * std::cos(kTwoPi * (x + y));
  });
  return (1.0 / gradient_norm(g, eta, g.steps())) * eta;
}

std::vector<GridField> reference_companions(const SmoothGeodesic &g) {
  return {sample(g.grid(), [](double x, double y) { return std::cos(kTwoPi * (x - y)); }),
          sample(g.grid(), [](double x, double y) { return std::sin(2.0 * kTwoPi * y) + 0.3 * std::cos(kTwoPi * x); })};
}

double pairing_drift(const SmoothGeodesic &g, const TransportTriple &a, const TransportTriple &b) {
  const int K = g.steps();
  const double p1 = pairing(g, a.eta[K], b.eta[K], K);
  const double scale = gradient_norm(g, a.eta[K], K) * gradient_norm(g, b.eta[K], K);
  double drift = 0.0;
  for (int k = 0; k <= K; ++k) drift = std::max(drift, std::abs(pairing(g, a.eta[k], b.eta[k], k) - p1));
  return drift / scale;
}

double transport_energy(const SmoothGeodesic &g, const TransportTriple &triple) {
  const int K = g.steps();
  double e = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double n = gradient_norm(g, triple.eta[k], k);
    e += (k == 0 || k == K ? 0.5 : 1.0) * n * n;
  }
  return e / K;
}

DeltaGeodesic sphere_meridian(double length) {
  const Manifold S = Manifold::sphere();
  const ManifoldPoint north = S.point(Vec3(0.0, 0.0, 1.0));
  return {S, S.tangent(north, Vec3(length, 0.0, 0.0))};
}

TangentMeasure random_tangent_measure(const Manifold &m, const ManifoldPoint &base, int count, double spread,
                                      Rng &rng) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "random_tangent_measure: count must be positive");
  std::normal_distribution<double> normal(0.0, spread);
  TangentMeasure nu{base, {}};
  for (int k = 0; k < count; ++k) {
    Vec3 v;
    for (int c = 0; c < 3; ++c) v[c] = normal(rng);
    nu.fiber.vectors.push_back(m.tangent(base, v).components);
    nu.fiber.weights.push_back(1.0 / count);
  }
  return nu;
}

ParticleMeasure random_uniform_measure(const Manifold &m, int count, Rng &rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ManifoldPoint> pts;
  for (int k = 0; k < count; ++k) {
    switch (m.kind()) {
      case ManifoldKind::Sphere2: {
        const double z = 2.0 * unit(rng) - 1.0, th = kTwoPi * unit(rng), r = std::sqrt(1.0 - z * z);
        pts.push_back(m.point(Vec3(r * std::cos(th), r * std::sin(th), z)));
        break;
      }
      case ManifoldKind::FlatTorus:
        pts.push_back(m.point(m.periods().x() * unit(rng), m.dim() == 2 ? m.periods().y() * unit(rng) : 0.0));
        break;
      case ManifoldKind::Cylinder:
        pts.push_back(m.point(m.circumference() * unit(rng), 2.0 * unit(rng) - 1.0));
        break;
    }
  }
  return ParticleMeasure::uniform(m, std::move(pts));
}

ConeElement random_cone_element(const Carrier &S, const std::vector<double> &weights, int fiber_size, Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = 0.1 * normal(rng), b = 0.1 * normal(rng), c = 0.05 * normal(rng);
  const int n = S.size();
  std::vector<double> f(n);
  std::vector<VectorMeasure> fibers(n);
  for (int k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    f[k] = a * std::cos(th) + b * std::sin(th) + c * std::cos(2.0 * th);
    const Vec3 nrm = S.codim() == 1 ? S.unit_normal(k) : Vec3::Zero();
    for (int j = 0; j < fiber_size; ++j) {
      fibers[k].vectors.push_back(0.1 * normal(rng) * nrm);
      fibers[k].weights.push_back(1.0 / fiber_size);
    }
  }
  return ConeElement(S, weights, std::move(f), std::move(fibers));
}

std::vector<double> cosine_quantiles(int n, double amplitude) {
  if (!(std::abs(amplitude) < 1.0)) throw Error(ErrorCode::InvalidArgument, "cosine_quantiles: |amplitude| must be < 1");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    const double q = (i + 0.5) / n;
    double s = q;
    for (int it = 0; it < 60; ++it) {
      const double cdf = s + amplitude / kTwoPi * std::sin(kTwoPi * s) - q;
      s -= cdf / (1.0 + amplitude * std::cos(kTwoPi * s));
    }
    x[i] = s;
  }
  return x;
}

}  // namespace wpt
