#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "wpt/experiments.hpp"
#include "wpt/ot.hpp"

using namespace wpt;

namespace {

double brute_force_assignment(const ParticleMeasure &mu, const ParticleMeasure &nu) {
  const auto c = half_squared_distance_matrix(mu, nu);
  const int n = mu.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += c[i * n + perm[i]];
    best = std::min(best, s / n);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("two deltas") {
  const Manifold T = Manifold::flat_torus(2);
  const auto p = T.point(0.1, 0.2), q = T.point(0.4, 0.6);
  const Coupling c = solve_exact_ot(ParticleMeasure::delta(T, p), ParticleMeasure::delta(T, q));
  REQUIRE(c.plan.size() == 1);
  CHECK(c.plan[0].mass == 1.0);
  CHECK(c.cost == doctest::Approx(0.5 * 0.25).epsilon(1e-14));
  CHECK(wasserstein2(ParticleMeasure::delta(T, p), ParticleMeasure::delta(T, q)) == doctest::Approx(0.5));
}

TEST_CASE("identical measures give the diagonal plan") {
  const Manifold T = Manifold::flat_torus(2);
  const auto mu = ParticleMeasure::uniform(T, {T.point(0, 0), T.point(0.5, 0), T.point(0, 0.5), T.point(0.5, 0.5)});
  const Coupling c = solve_exact_ot(mu, mu);
  CHECK(c.cost == 0.0);
  for (const auto &e : c.plan)
    if (e.mass > 0.0) CHECK(e.source == e.target);
  CHECK(wasserstein2(mu, mu) == 0.0);
}

TEST_CASE("split to two points") {
  const Manifold T = Manifold::flat_torus(2);
  const auto mu = ParticleMeasure::delta(T, T.point(0, 0));
  const auto nu = ParticleMeasure::uniform(T, {T.point(0.25, 0), T.point(-0.25, 0)});
  CHECK(wasserstein2(mu, nu) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("network simplex matches brute-force assignment") {
  Rng rng(2024);
  const Manifold T = Manifold::flat_torus(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = random_uniform_measure(T, 8, rng), nu = random_uniform_measure(T, 8, rng);
    const Coupling c = solve_exact_ot(mu, nu);
    CHECK(std::abs(c.cost - brute_force_assignment(mu, nu)) <= 1e-12);
    CHECK(c.marginal_error() <= 1e-10);
  }
}

TEST_CASE("W2 metric axioms on random 16-point measures") {
  Rng rng(99);
  for (const Manifold &m : {Manifold::flat_torus(2), Manifold::sphere()})
    for (int trial = 0; trial < 10; ++trial) {
      const auto a = random_uniform_measure(m, 16, rng), b = random_uniform_measure(m, 16, rng),
                 c = random_uniform_measure(m, 16, rng);
      const double ab = wasserstein2(a, b), ba = wasserstein2(b, a), bc = wasserstein2(b, c), ac = wasserstein2(a, c);
      CHECK(std::abs(ab - ba) <= 1e-9);
      CHECK(ac <= ab + bc + 1e-9);
      CHECK(ab > 0.0);
    }
}

TEST_CASE("displacement interpolation") {
  const Manifold T = Manifold::flat_torus(2);
  const auto p = T.point(0.1, 0.1), q = T.point(0.3, 0.5);
  const Coupling d = solve_exact_ot(ParticleMeasure::delta(T, p), ParticleMeasure::delta(T, q));
  CHECK(T.dist(displacement_interpolation(d, 0.5).points()[0], T.point(0.2, 0.3)) < 1e-15);

  Rng rng(8);
  const auto mu = random_uniform_measure(T, 12, rng), nu = random_uniform_measure(T, 12, rng);
  const Coupling c = solve_exact_ot(mu, nu);
  const ParticleMeasure at0 = displacement_interpolation(c, 0.0);
  CHECK(wasserstein2(at0, mu) < 1e-12);
  const double total = wasserstein2(mu, nu);
  for (double t : {0.25, 0.5, 0.75}) CHECK(std::abs(wasserstein2(mu, displacement_interpolation(c, t)) - t * total) <= 1e-8);
}

TEST_CASE("size cap") {
  Rng rng(1);
  const Manifold T = Manifold::flat_torus(2);
  const auto mu = random_uniform_measure(T, 20, rng);
  try {
    (void)solve_exact_ot(mu, mu, OtOptions{10});
    FAIL("expected SizeCapExceeded");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::SizeCapExceeded);
  }
}

TEST_CASE("fiber W2 helpers") {
  const VectorMeasure a{{Vec3(0, 0, 0), Vec3(1, 0, 0)}, {0.5, 0.5}};
  const VectorMeasure b{{Vec3(0, 1, 0), Vec3(1, 1, 0)}, {0.5, 0.5}};
  CHECK(wasserstein2_flat(a, b) == doctest::Approx(1.0));
  CHECK(wasserstein2_line({0.0, 1.0}, {0.5, 0.5}, {2.0}, {1.0}) == doctest::Approx(std::sqrt(2.5)));
}
