#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wpt/experiments.hpp"
#include "wpt/hypersurface.hpp"

using namespace wpt;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> cylinder_weights(int n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += w[i] = 1.0 + 0.25 * std::cos(2.0 * kPi * i / n);
  for (double &x : w) x /= total;
  return w;
}

}  // namespace

TEST_CASE("tangential gradient check on a circle") {
  const Manifold T = Manifold::flat_torus(2);
  const int n = 128;
  const Carrier S = Carrier::torus_circle(T, Vec2(0.5, 0.5), 0.25, n);
  const std::vector<double> w(n, 1.0 / n);

  std::vector<Vec3> rotation(n);
  for (int k = 0; k < n; ++k) rotation[k] = S.unit_tangent(k);
  const TangentialGradientVerdict curl = tangential_gradient_check(S, rotation, w, 1e-3);
  CHECK_FALSE(curl.is_gradient);
  CHECK(std::abs(std::abs(curl.loop_integral) - kPi / 2) < 1e-3);

  std::vector<double> f(n);
  for (int k = 0; k < n; ++k) f[k] = 0.1 * std::cos(2.0 * kPi * k / n) + 0.05 * std::sin(4.0 * kPi * k / n);
  const auto grad = S.tangential_gradient(f);
  std::vector<Vec3> v(grad.begin(), grad.end());
  for (int k = 0; k < n; ++k) v[k] += 0.3 * S.unit_normal(k);
  const TangentialGradientVerdict ok = tangential_gradient_check(S, v, w, 1e-10);
  CHECK(ok.is_gradient);
  double fm = 0.0, err = 0.0;
  for (double x : f) fm += x / n;
  for (int k = 0; k < n; ++k) err = std::max(err, std::abs(ok.potential[k] - (f[k] - fm)));
  CHECK(err < 1e-3);

  const TangentialGradientVerdict normal_only =
      tangential_gradient_check(S, std::vector<Vec3>(n, Vec3::Zero()), w, 0.0);
  CHECK(normal_only.is_gradient);
  for (double p : normal_only.potential) CHECK(p == 0.0);
}

TEST_CASE("cylinder graph to base circle") {
  const auto F = [](double x) { return 1.0 + 0.3 * std::sin(x); };
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {64, 128, 256}) {
    const CylinderReport r = cylinder_example(F, n);
    CHECK(r.plan_is_vertical);
    CHECK(std::abs(r.lp_cost - r.vertical_cost) <= 1e-12);
    CHECK(r.max_potential_error <= 1e-3);
    CHECK(r.max_potential_error < prev);
    CHECK(std::abs(r.loop_integral) < 1e-12);
    prev = r.max_potential_error;
  }
  const CylinderReport flat = cylinder_example([](double) { return 0.7; }, 64);
  CHECK(flat.max_tangential < 1e-12);
  CHECK(flat.max_potential_error < 1e-12);
  CHECK_THROWS_AS((void)cylinder_example(std::vector<double>{}), Error);
}

TEST_CASE("random graphs project vertically") {
  Rng rng(31);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> F(64);
    for (double &h : F) h = u(rng);
    const CylinderReport r = cylinder_example(F);
    CHECK(std::abs(r.lp_cost - r.vertical_cost) <= 1e-12);
  }
}

TEST_CASE("normal flow from the base circle reaches the graph") {
  const Manifold C = Manifold::cylinder(2.0 * kPi);
  const int n = 128;
  const std::vector<double> zero(n, 0.0), w = cylinder_weights(n);
  std::vector<VectorMeasure> fibers;
  std::vector<ManifoldPoint> top;
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * kPi * i / n, h = 1.0 + 0.3 * std::sin(x);
    fibers.push_back(VectorMeasure::delta(Vec3(0, h, 0)));
    top.push_back(C.point(x, h));
  }
  SubmanifoldGeodesicOptions opt;
  opt.t_max = 1.0;
  const SubmanifoldGeodesic g = geodesic_from_submanifold(Carrier::cylinder_graph(C, zero), w, zero, fibers, opt);
  REQUIRE(g.measures.size() == 5);
  CHECK(wasserstein2(g.measures.back(), ParticleMeasure(C, top, w)) < 1e-12);
  CHECK(g.constant_speed_error < 1e-10);
  CHECK(g.direct_coupling_gap < 1e-10);

  // Tangential fibers are rejected.
  std::vector<VectorMeasure> bad = fibers;
  bad[3] = VectorMeasure::delta(Vec3(0.1, 0, 0));
  CHECK_THROWS_AS((void)geodesic_from_submanifold(Carrier::cylinder_graph(C, zero), w, zero, bad, opt), Error);
}

TEST_CASE("round trip on a torus circle recovers f") {
  const Manifold T = Manifold::flat_torus(2);
  const int n = 256;
  const Carrier S = Carrier::torus_circle(T, Vec2(0.5, 0.5), 0.25, n);
  std::vector<double> f(n);
  const std::vector<double> u(n, 1.0 / n);
  std::vector<VectorMeasure> nf;
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * kPi * k / n;
    f[k] = 0.02 * std::cos(2 * th) + 0.01 * std::sin(th);
    nf.push_back(VectorMeasure::delta(0.05 * (1 + 0.5 * std::cos(th)) * S.unit_normal(k)));
  }
  const SubmanifoldGeodesic g = geodesic_from_submanifold(S, u, f, nf);
  CHECK(g.t_max > 0.0);
  CHECK(g.constant_speed_error < 1e-10);
  CHECK(g.direct_coupling_gap < 1e-10);

  const Coupling c = solve_exact_ot(ParticleMeasure(T, S.points(), u), g.measures.back());
  std::vector<Vec3> v(n, Vec3::Zero());
  for (const auto &e : c.plan)
    v[e.source] += e.mass * T.log(S.points()[e.source], c.target.points()[e.target]).components / g.t_max / u[e.source];
  const TangentialGradientVerdict ver = tangential_gradient_check(S, v, u, 1e-3);
  CHECK(ver.is_gradient);
  double fm = 0.0, err = 0.0;
  for (double x : f) fm += x / n;
  for (int k = 0; k < n; ++k) err = std::max(err, std::abs(ver.potential[k] - (f[k] - fm)));
  CHECK(err < 1e-4);
}

TEST_CASE("level set diagnostics between two circles") {
  const Manifold T = Manifold::flat_torus(2);
  const int n = 256;
  const std::vector<double> q = cosine_quantiles(n, 0.5);
  std::vector<ManifoldPoint> a, b;
  for (double x : q) {
    a.push_back(T.point(x, 0.2));
    b.push_back(T.point(x + 0.25, 0.6));
  }
  const ParticleMeasure mu0 = ParticleMeasure::uniform(T, a), mu1 = ParticleMeasure::uniform(T, b);
  const ElReport r = el_diagnostics(mu0, mu1, {0.25, 0.5, 0.75});
  CHECK(r.rays == n);
  CHECK(r.max_speed_deviation < 1e-12);
  REQUIRE(r.levels.size() == 3);
  for (const LevelReport &L : r.levels) {
    CHECK(std::abs(L.loop_integral) <= 1e-3);
    CHECK(L.decomposition_residual <= 1e-3);
    CHECK(L.mean_eta < 0.0);
  }

  // A rigid vertical shift has no tangential part at all.
  for (auto &p : b) p = T.point(p.coords.x() - 0.25, 0.6);
  const ElReport v = el_diagnostics(mu0, ParticleMeasure::uniform(T, b), {0.5});
  CHECK(std::abs(v.levels[0].loop_integral) < 1e-12);
  CHECK_THROWS_AS((void)el_diagnostics(mu0, mu1, {1.5}), Error);
}
