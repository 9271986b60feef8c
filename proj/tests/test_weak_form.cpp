#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wpt/experiments.hpp"
#include "wpt/weak_form.hpp"

using namespace wpt;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

template <typename F>
SpaceTimeTest space_time(const SmoothGeodesic &g, F &&f) {
  SpaceTimeTest out;
  for (int k = 0; k <= g.steps(); ++k) {
    const double t = g.time(k);
    out.values.push_back(sample(g.grid(), [&](double x, double y) { return f(x, y, t); }));
  }
  return out;
}

TransportTriple zero_triple(const SmoothGeodesic &g) {
  return {std::vector<GridField>(g.steps() + 1, GridField(g.grid())), GridField(g.grid()), GridField(g.grid())};
}

}  // namespace

TEST_CASE("trivial inputs have zero residual") {
  const SmoothGeodesic g = cosine_geodesic(32, 40, 0.01);
  const TransportTriple pde = solve_pt_pde(g, reference_eta1(g));
  CHECK(weak_residual(g, pde, space_time(g, [](double, double, double) { return 2.5; })) == 0.0);
  const SpaceTimeTest f = space_time(g, [](double x, double y, double t) { return std::sin(kTwoPi * (x + 2 * y)) * t; });
  CHECK(weak_residual(g, zero_triple(g), f) == 0.0);
}

TEST_CASE("translation geodesic satisfies the identity") {
  const SmoothGeodesic g = cosine_geodesic(32, 100, 0.0, Vec2(0.2, 0.1));
  const TransportTriple pde = solve_pt_pde(g, reference_eta1(g));
  for (int d = 0; d <= 2; ++d) {
    const SpaceTimeTest f = space_time(g, [&](double x, double y, double t) {
      return std::cos(kTwoPi * (x - y)) * std::pow(t, d) + std::sin(kTwoPi * y);
    });
    CHECK(std::abs(weak_residual(g, pde, f)) <= 1e-5);
  }
}

TEST_CASE("corrupted initial potential is detected") {
  const SmoothGeodesic g = cosine_geodesic(32, 100, 0.01);
  TransportTriple t = solve_pt_pde(g, reference_eta1(g));
  const SpaceTimeTest f = space_time(g, [](double x, double, double t) { return std::cos(kTwoPi * x) * (1.0 - t); });
  CHECK(std::abs(weak_residual(g, t, f)) <= 1e-4);
  t.eta0 = t.eta0 + sample(g.grid(), [](double x, double) { return 0.1 * std::cos(kTwoPi * x); });
  CHECK(std::abs(weak_residual(g, t, f)) >= 0.1);
}

TEST_CASE("residual is linear in the test function") {
  const SmoothGeodesic g = cosine_geodesic(32, 40, 0.01);
  const TransportTriple pde = solve_pt_pde(g, reference_eta1(g));
  TransportTriple off = pde;
  off.eta0 = off.eta0 + sample(g.grid(), [](double x, double y) { return 0.2 * std::sin(kTwoPi * (x + y)); });
  const SpaceTimeTest a = space_time(g, [](double x, double y, double t) { return std::sin(kTwoPi * (x + y)) * (1 - t); });
  const SpaceTimeTest b = space_time(g, [](double x, double, double t) { return std::cos(kTwoPi * x) * t * t; });
  SpaceTimeTest c;
  for (int k = 0; k <= g.steps(); ++k) c.values.push_back(a.values[k] + 2.0 * b.values[k]);
  const double ra = weak_residual(g, off, a), rb = weak_residual(g, off, b), rc = weak_residual(g, off, c);
  CHECK(std::abs(rc - (ra + 2.0 * rb)) <= 1e-10 * (std::abs(ra) + std::abs(rb) + 1.0));
}

TEST_CASE("explicit time derivative agrees with finite differences") {
  const SmoothGeodesic g = cosine_geodesic(32, 100, 0.01);
  const TransportTriple pde = solve_pt_pde(g, reference_eta1(g));
  SpaceTimeTest f = space_time(g, [](double x, double y, double t) { return std::cos(kTwoPi * (x + y)) * t * t; });
  const double fd = weak_residual(g, pde, f);
  f.time_derivative = space_time(g, [](double x, double y, double t) { return std::cos(kTwoPi * (x + y)) * 2 * t; }).values;
  CHECK(std::abs(weak_residual(g, pde, f) - fd) <= 1e-5);
}

TEST_CASE("Fourier suite on the PDE solution") {
  const SmoothGeodesic g = cosine_geodesic(32, 100, 0.01);
  const SuiteResult r = residual_suite(g, solve_pt_pde(g, reference_eta1(g)), 2, 1);
  CHECK(r.rows.size() > 10);
  CHECK(r.max_residual <= 1e-4);

  TransportTriple bad = solve_pt_pde(g, reference_eta1(g));
  bad.eta0 = bad.eta0 + sample(g.grid(), [](double, double y) { return 0.1 * std::sin(kTwoPi * y); });
  CHECK(residual_suite(g, bad, 2, 1).max_residual >= 0.1);
}
