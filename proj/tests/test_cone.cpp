#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wpt/experiments.hpp"
#include "wpt/tangent_cone.hpp"

using namespace wpt;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

struct CircleBase {
  Carrier S = Carrier::torus_circle(Manifold::flat_torus(2), Vec2(0.5, 0.5), 0.25, 16);
  std::vector<double> w = std::vector<double>(16, 1.0 / 16);
};

GridField random_band_limited(const PeriodicGrid &G, Rng &rng, int modes = 3) {
  std::normal_distribution<double> n(0.0, 1.0);
  GridField f(G);
  for (int kx = -modes; kx <= modes; ++kx)
    for (int ky = 0; ky <= modes; ++ky) {
      const double a = n(rng), b = n(rng);
      for (int p = 0; p < G.size(); ++p) {
        const Vec2 x = G.node(p);
        const double th = kTwoPi * (kx * x.x() + ky * x.y());
        f[p] += (a * std::cos(th) + b * std::sin(th)) / (1 + kx * kx + ky * ky);
      }
    }
  return f;
}

GridField positive_density(const PeriodicGrid &G) {
  GridField rho = sample(G, [](double x, double y) {
    return 1.0 + 0.4 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y) + 0.2 * std::cos(kTwoPi * 2 * y);
  });
  return (1.0 / mean(rho)) * rho;
}

}  // namespace

TEST_CASE("cone distance basics") {
  CircleBase b;
  Rng rng(1);
  const ConeElement a = random_cone_element(b.S, b.w, 3, rng);
  CHECK(cone_distance(a, a).distance == 0.0);

  // Equal potentials, delta fibers: Euclidean distance of the sections.
  std::vector<VectorMeasure> f1, f2;
  double expected = 0.0;
  for (int k = 0; k < b.S.size(); ++k) {
    const Vec3 n = b.S.unit_normal(k);
    const double s1 = 0.1 * std::sin(k), s2 = -0.05 * std::cos(2 * k);
    f1.push_back(VectorMeasure::delta(s1 * n));
    f2.push_back(VectorMeasure::delta(s2 * n));
    expected += b.w[k] * (s1 - s2) * (s1 - s2);
  }
  const std::vector<double> pot(b.S.size(), 0.0);
  const ConeDistance d = cone_distance(ConeElement(b.S, b.w, pot, f1), ConeElement(b.S, b.w, pot, f2));
  CHECK(d.distance * d.distance == doctest::Approx(expected).epsilon(1e-12));
  CHECK(d.tangential_sq == 0.0);
}

TEST_CASE("point carrier reproduces the fiber W2") {
  // Oracle: the same vectors as points of a huge flat torus, solved by the generic LP path.
  const Manifold T = Manifold::flat_torus(2);
  const Manifold big = Manifold::flat_torus(2, Vec2(1000.0, 1000.0));
  const Carrier P = Carrier::point_set(T, {T.point(0.3, 0.4)});
  Rng rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    VectorMeasure a, b;
    std::vector<ManifoldPoint> pa, pb;
    for (int k = 0; k < 6; ++k) {
      a.vectors.emplace_back(n(rng), n(rng), 0.0);
      b.vectors.emplace_back(n(rng), n(rng), 0.0);
      a.weights.push_back(1.0 / 6);
      b.weights.push_back(1.0 / 6);
      pa.push_back(big.point(a.vectors.back().x() + 500, a.vectors.back().y() + 500));
      pb.push_back(big.point(b.vectors.back().x() + 500, b.vectors.back().y() + 500));
    }
    const ConeDistance d = cone_distance(ConeElement(P, {1.0}, {0.0}, {a}), ConeElement(P, {1.0}, {0.0}, {b}));
    CHECK(std::abs(d.distance - wasserstein2(ParticleMeasure::uniform(big, pa), ParticleMeasure::uniform(big, pb))) <
          1e-10);
  }
}

TEST_CASE("cone distance is a metric with radial homothety") {
  CircleBase b;
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const ConeElement x = random_cone_element(b.S, b.w, 3, rng), y = random_cone_element(b.S, b.w, 3, rng),
                      z = random_cone_element(b.S, b.w, 3, rng);
    const double xy = cone_distance(x, y).distance, yx = cone_distance(y, x).distance;
    CHECK(std::abs(xy - yx) <= 1e-8);
    CHECK(cone_distance(x, z).distance <= xy + cone_distance(y, z).distance + 1e-8);
    CHECK(xy > 0.0);

    const ConeElement o = ConeElement::vertex(b.S, b.w);
    const double d1 = cone_distance(o, x).distance;
    for (double lambda : {0.5, 2.0, 3.7})
      CHECK(std::abs(cone_distance(o, x.scaled(lambda)).distance - lambda * d1) <= 1e-10);
  }
}

TEST_CASE("cone element validation") {
  CircleBase b;
  const std::vector<double> pot(16, 0.0);
  std::vector<VectorMeasure> tangent_fibers(16);
  for (int k = 0; k < 16; ++k) tangent_fibers[k] = VectorMeasure::delta(0.2 * b.S.unit_tangent(k));
  CHECK_THROWS_AS(ConeElement(b.S, b.w, pot, tangent_fibers), Error);

  std::vector<double> zero_weight = b.w;
  zero_weight[0] = 0.0;
  zero_weight[1] *= 2.0;
  CHECK_THROWS_AS(ConeElement::vertex(b.S, zero_weight), Error);

  const Carrier other = Carrier::torus_circle(Manifold::flat_torus(2), Vec2(0.5, 0.5), 0.2, 16);
  try {
    (void)cone_distance(ConeElement::vertex(b.S, b.w), ConeElement::vertex(other, b.w));
    FAIL("expected BaseMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::BaseMismatch);
  }
}

TEST_CASE("tangential/normal split") {
  CircleBase b;
  Rng rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < b.S.size(); ++k) {
    const TangentNormal t = tangential_normal_split(b.S, k, 0.7 * b.S.unit_tangent(k));
    CHECK(t.normal.norm() < 1e-15);
    const TangentNormal m = tangential_normal_split(b.S, k, -0.4 * b.S.unit_normal(k));
    CHECK(m.tangential.norm() < 1e-15);
    const Vec3 v(n(rng), n(rng), 0.0);
    const TangentNormal r = tangential_normal_split(b.S, k, v);
    CHECK(std::abs(v.squaredNorm() - r.tangential.squaredNorm() - r.normal.squaredNorm()) < 1e-12);
    CHECK(std::abs(r.tangential.dot(r.normal)) < 1e-15);
  }
}

TEST_CASE("gradient projection") {
  const PeriodicGrid G{32, 32};
  Rng rng(9);

  const GridField u = mean_centered(random_band_limited(G, rng));
  const GradientProjection same = project_gradient(positive_density(G), gradient(u));
  CHECK(max_abs(same.potential - u) < 1e-9);

  GridVectorField rot(G);
  for (int p = 0; p < G.size(); ++p) rot.x[p] = -std::sin(kTwoPi * G.node(p).y());
  const GradientProjection zero = project_gradient(GridField(G, 1.0), rot);
  CHECK(weighted_norm(GridField(G, 1.0), zero.gradient) < 1e-9);

  const GridField rho = positive_density(G);
  GridVectorField W(G);
  const GridField a = random_band_limited(G, rng), c = random_band_limited(G, rng);
  const GridField s1 = random_band_limited(G, rng), s2 = random_band_limited(G, rng);
  GridVectorField V = gradient(a);
  for (int p = 0; p < G.size(); ++p) {
    V.x[p] += std::sin(kTwoPi * G.node(p).y()) * s1[p];
    W.y[p] = std::cos(kTwoPi * G.node(p).x()) * s2[p];
  }
  W = W + gradient(c);
  const GradientProjection pv = project_gradient(rho, V), pw = project_gradient(rho, W);
  for (int trial = 0; trial < 10; ++trial) {
    const GridVectorField gh = gradient(random_band_limited(G, rng));
    CHECK(std::abs(weighted_inner(rho, V - pv.gradient, gh)) <= 1e-8);
  }
  CHECK(std::abs(weighted_inner(rho, pv.gradient, W) - weighted_inner(rho, V, pw.gradient)) <= 1e-8);
  const GradientProjection twice = project_gradient(rho, pv.gradient);
  CHECK(weighted_norm(rho, twice.gradient - pv.gradient) <= 1e-9);
}
