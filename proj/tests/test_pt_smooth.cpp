#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wpt/experiments.hpp"
#include "wpt/pt_smooth.hpp"

using namespace wpt;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

// L^2(dx) distance after removing the means.
double centered_l2(const GridField &a, const GridField &b) { return l2_norm(mean_centered(a) - mean_centered(b)); }

// f(x + shift) sampled at the nodes.
GridField shifted(const GridField &f, const Vec2 &shift) {
  const SpectralInterpolant s(f);
  GridField out(f.grid);
  for (int p = 0; p < f.grid.size(); ++p) out[p] = s.value(f.grid.node(p) + shift);
  return out;
}

}  // namespace

TEST_CASE("translation geodesic moves the density and the potentials rigidly") {
  const PeriodicGrid G{32, 32};
  const Vec2 a(0.3, -0.15);
  const GridField rho0 = sample(G, [](double x, double y) { return 1.0 + 0.3 * std::cos(kTwoPi * x) * std::sin(kTwoPi * y); });
  const SmoothGeodesic g = build_geodesic(rho0, GridField(G), 20, a);
  CHECK(g.diagnostics().min_jacobian == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(max_abs(g.slice(20).rho - shifted(rho0, -a)) < 1e-10);

  const GridField eta1 = reference_eta1(g);
  const GridField expected = shifted(eta1, a);
  const TransportTriple pde = solve_pt_pde(g, eta1);
  CHECK(centered_l2(pde.eta0, expected) <= 1e-6);
  for (int Q : {1, 4}) CHECK(centered_l2(petrunin_transport(g, eta1, Q).triple.eta0, expected) <= 1e-8);
}

TEST_CASE("pairing on the static geodesic") {
  const SmoothGeodesic g = cosine_geodesic(32, 10, 0.0);
  const GridField c = sample(g.grid(), [](double x, double) { return std::cos(kTwoPi * x); });
  CHECK(pairing(g, c, c, 0) == doctest::Approx(kTwoPi * kTwoPi / 2).epsilon(1e-12));
  CHECK(gradient_norm(g, c, 10) == doctest::Approx(kTwoPi / std::sqrt(2.0)).epsilon(1e-12));
  const GridField s = sample(g.grid(), [](double, double y) { return std::sin(kTwoPi * y); });
  CHECK(std::abs(pairing(g, c, s, 5)) < 1e-12);
}

TEST_CASE("constant endpoint potential transports to zero") {
  const SmoothGeodesic g = cosine_geodesic(32, 20, 0.01);
  const GridField one(g.grid(), 3.0);
  const TransportTriple pde = solve_pt_pde(g, one);
  for (const GridField &e : pde.eta) CHECK(max_abs(e) < 1e-12);
  const PetruninRecord pet = petrunin_transport(g, one, 4);
  CHECK(max_abs(pet.triple.eta0) < 1e-12);
}

TEST_CASE("geodesic construction") {
  const SmoothGeodesic g = cosine_geodesic(32, 20, 0.01);
  CHECK(g.diagnostics().continuity_residual < 1e-3);
  CHECK(g.diagnostics().hj_residual < 1e-6);
  CHECK(g.diagnostics().min_jacobian > 0.5);
  for (int k = 0; k <= 20; k += 5) CHECK(std::abs(mean(g.slice(k).rho) - 1.0) < 1e-12);

  try {
    (void)cosine_geodesic(32, 20, 0.1);
    FAIL("expected MapDegenerate");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::MapDegenerate);
  }
}

TEST_CASE("PDE transport preserves pairings and converges in K") {
  const SmoothGeodesic g = cosine_geodesic(32, 100, 0.01);
  const GridField eta1 = reference_eta1(g);
  const TransportTriple a = solve_pt_pde(g, eta1);
  for (const GridField &c : reference_companions(g)) CHECK(pairing_drift(g, a, solve_pt_pde(g, c)) <= 1e-6);

  const SmoothGeodesic fine = cosine_geodesic(32, 200, 0.01);
  CHECK(centered_l2(solve_pt_pde(fine, reference_eta1(fine)).eta0, a.eta0) <= 1e-6);
}

TEST_CASE("Petrunin segment operators") {
  const SmoothGeodesic g = cosine_geodesic(32, 20, 0.01);
  const PetruninScheme scheme(g, 4);
  const GridField sigma = sample(g.grid(), [](double x, double y) { return std::sin(kTwoPi * (x + y)) + 0.2 * std::cos(kTwoPi * y); });

  const GridVectorField W0 = scheme.push_field_W(1, sigma, 0.0);
  const GridVectorField grad = gradient(sigma);
  CHECK(weighted_norm(scheme.node(1).rho, W0 - grad) < 1e-9);

  const GridField target = reference_eta1(g);
  const InvertResult inv = scheme.invert_A(2, target, 1e-11);
  CHECK(inv.iterations > 0);
  CHECK(inv.contraction < 1.0);
  const PotentialField back = scheme.apply_A(2, inv.sigma.potential);
  CHECK(weighted_norm(scheme.node(3).rho, back.gradient - gradient(target)) < 1e-9);
}

TEST_CASE("Petrunin transport converges to the PDE solution") {
  const SmoothGeodesic g = cosine_geodesic(32, 40, 0.01);
  const GridField eta1 = reference_eta1(g);
  const TransportTriple pde = solve_pt_pde(g, eta1);
  double prev = std::numeric_limits<double>::infinity();
  for (int Q : {4, 8, 16}) {
    const PetruninRecord r = petrunin_transport(g, eta1, Q);
    const double err = std::sqrt(weighted_inner(g.slice(0).rho, gradient(r.triple.eta0 - pde.eta0),
                                                gradient(r.triple.eta0 - pde.eta0)));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 5e-2);
}
