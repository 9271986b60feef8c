#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wpt/experiments.hpp"
#include "wpt/pt_delta.hpp"

using namespace wpt;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> sorted_norms(const TangentMeasure &nu) {
  std::vector<double> n;
  for (const Vec3 &v : nu.fiber.vectors) n.push_back(v.norm());
  std::sort(n.begin(), n.end());
  return n;
}

}  // namespace

TEST_CASE("flat torus steps and transports are the identity") {
  const Manifold T = Manifold::flat_torus(2);
  const DeltaGeodesic g{T, T.tangent(T.point(0.1, 0.2), Vec3(0.3, -0.2, 0))};
  Rng rng(5);
  const TangentMeasure nu = random_tangent_measure(T, g.at(1.0), 10, 0.5, rng);
  const TangentMeasure step = petrunin_delta_step(T, g.velocity, nu);
  CHECK(step.fiber.vectors == nu.fiber.vectors);
  CHECK(step.fiber.weights == nu.fiber.weights);
  for (int Q : {1, 3, 8}) CHECK(petrunin_delta_transport(g, nu, Q).fiber.vectors == nu.fiber.vectors);
  CHECK(exact_delta_transport(g, nu).fiber.vectors == nu.fiber.vectors);
  CHECK(T.dist(petrunin_delta_transport(g, nu, 4).base, g.at(0.0)) < 1e-15);
}

TEST_CASE("sphere step inverts d exp") {
  const Manifold S = Manifold::sphere();
  const TangentVec seg = S.tangent(S.point(Vec3(0, 0, 1)), Vec3(kPi / 2, 0, 0));
  const TangentMeasure nu{S.exp(seg), VectorMeasure::delta(Vec3(0, 2.0 / kPi, 0))};
  const TangentMeasure back = petrunin_delta_step(S, seg, nu);
  CHECK(back.fiber.vectors[0].norm() == doctest::Approx(1.0).epsilon(1e-14));

  const TangentMeasure zero{S.exp(seg), VectorMeasure::delta(Vec3::Zero())};
  CHECK(petrunin_delta_step(S, seg, zero).fiber.vectors[0].norm() == 0.0);

  const TangentVec long_seg = S.tangent(S.point(Vec3(0, 0, 1)), Vec3(kPi, 0, 0));
  CHECK_THROWS_AS((void)petrunin_delta_step(S, long_seg, TangentMeasure{S.exp(long_seg), VectorMeasure::delta(Vec3(0, 1, 0))}),
                  Error);
}

TEST_CASE("exact transport is an isometric pushforward") {
  const DeltaGeodesic g = sphere_meridian(kPi / 2);
  const TangentMeasure zero{g.at(1.0), VectorMeasure::delta(Vec3::Zero())};
  CHECK(exact_delta_transport(g, zero).fiber.vectors[0].norm() == 0.0);

  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const TangentMeasure a = random_tangent_measure(g.manifold, g.at(1.0), 8, 0.4, rng);
    const TangentMeasure b = random_tangent_measure(g.manifold, g.at(1.0), 8, 0.4, rng);
    const TangentMeasure ea = exact_delta_transport(g, a), eb = exact_delta_transport(g, b);
    CHECK(g.manifold.dist(ea.base, g.at(0.0)) < 1e-14);
    const auto na = sorted_norms(a), nea = sorted_norms(ea);
    for (size_t k = 0; k < na.size(); ++k) CHECK(std::abs(na[k] - nea[k]) < 1e-14);
    CHECK(std::abs(tangent_w2(g.manifold, ea, eb) - tangent_w2(g.manifold, a, b)) <= 1e-10);
  }

  const TangentMeasure a = random_tangent_measure(g.manifold, g.at(1.0), 4, 0.4, rng);
  try {
    (void)tangent_w2(g.manifold, a, exact_delta_transport(g, a));
    FAIL("expected BaseMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::BaseMismatch);
  }
}

TEST_CASE("Petrunin composition converges at first order on the sphere") {
  const DeltaGeodesic g = sphere_meridian(kPi / 2);
  Rng rng(7);
  const TangentMeasure nu = random_tangent_measure(g.manifold, g.at(1.0), 32, 0.3, rng);
  const TangentMeasure exact = exact_delta_transport(g, nu);
  double speed = 0.0;
  for (const Vec3 &v : nu.fiber.vectors) speed += v.norm() / 32;
  std::vector<double> err;
  for (int Q : {16, 32, 64, 128}) err.push_back(tangent_w2(g.manifold, petrunin_delta_transport(g, nu, Q), exact));
  CHECK(err.back() <= 1e-2 * speed);
  for (size_t k = 1; k < err.size(); ++k) {
    CHECK(err[k] / err[k - 1] >= 0.3);
    CHECK(err[k] / err[k - 1] <= 0.7);
  }
}
