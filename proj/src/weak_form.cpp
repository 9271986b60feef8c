#include "wpt/weak_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wpt {

namespace {

void require_triple(const SmoothGeodesic &g, const TransportTriple &triple) {
  if (static_cast<int>(triple.eta.size()) != g.steps() + 1)
    throw Error(ErrorCode::ResolutionMismatch, "triple and geodesic have different time grids");
  for (const auto &e : triple.eta) require_same_grid(g.grid(), e.grid, "weak_residual");
  require_same_grid(g.grid(), triple.eta0.grid, "weak_residual");
  require_same_grid(g.grid(), triple.eta1.grid, "weak_residual");
}

double trapezoid(const std::vector<double> &y, double h) {
  double s = 0.5 * (y.front() + y.back());
  for (size_t k = 1; k + 1 < y.size(); ++k) s += y[k];
  return s * h;
}

std::vector<GridField> finite_difference_in_time(const std::vector<GridField> &f, double h) {
  const int n = static_cast<int>(f.size());
  std::vector<GridField> out(n, GridField(f.front().grid));
  for (int k = 0; k < n; ++k)
    for (size_t p = 0; p < f[k].v.size(); ++p) {
      double d;
      if (n < 3) d = (f[n - 1].v[p] - f[0].v[p]) / (h * (n - 1));
      else if (k == 0) d = (-3.0 * f[0].v[p] + 4.0 * f[1].v[p] - f[2].v[p]) / (2.0 * h);
      else if (k == n - 1) d = (3.0 * f[n - 1].v[p] - 4.0 * f[n - 2].v[p] + f[n - 3].v[p]) / (2.0 * h);
      else d = (f[k + 1].v[p] - f[k - 1].v[p]) / (2.0 * h);
      out[k].v[p] = d;
    }
  return out;
}

}  // namespace

double weak_residual(const SmoothGeodesic &g, const TransportTriple &triple, const SpaceTimeTest &f) {
  require_triple(g, triple);
  const int K = g.steps();
  if (static_cast<int>(f.values.size()) != K + 1)
    throw Error(ErrorCode::ResolutionMismatch, "test function and geodesic have different time grids");
  for (const auto &v : f.values) require_same_grid(g.grid(), v.grid, "weak_residual");
  const double h = 1.0 / K;
  const std::vector<GridField> dtf =
      f.time_derivative.empty() ? finite_difference_in_time(f.values, h) : f.time_derivative;
  if (static_cast<int>(dtf.size()) != K + 1)
    throw Error(ErrorCode::ResolutionMismatch, "time derivative has the wrong number of nodes");

  const double lhs = weighted_inner(g.slice(K).rho, gradient(f.values[K]), gradient(triple.eta1)) -
                     weighted_inner(g.slice(0).rho, gradient(f.values[0]), gradient(triple.eta0));
  std::vector<double> integrand(K + 1);
  for (int k = 0; k <= K; ++k) {
    const GeodesicSlice &s = g.slice(k);
    const GridVectorField ge = gradient(triple.eta[k]);
    const GridField hq = grid_hessian_quadratic(f.values[k], ge, s.velocity);
    integrand[k] = weighted_inner(s.rho, gradient(dtf[k]), ge) + weighted_inner(s.rho, hq, GridField(g.grid(), 1.0));
  }
  return lhs - trapezoid(integrand, h);
}

SuiteResult residual_suite(const SmoothGeodesic &g, const TransportTriple &triple, int max_frequency,
                           int time_degree) {
  require_triple(g, triple);
  if (max_frequency < 1 || time_degree < 0)
    throw Error(ErrorCode::InvalidArgument, "residual_suite: need max_frequency >= 1 and time_degree >= 0");
  const int K = g.steps();
  const PeriodicGrid &grid = g.grid();
  const int n = grid.size();
  const double h = 1.0 / K;
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<GridVectorField> ge(K + 1);
  for (int k = 0; k <= K; ++k) ge[k] = gradient(triple.eta[k]);
  const GridVectorField ge0 = gradient(triple.eta0);
  const GridVectorField ge1 = gradient(triple.eta1);

  struct Mode {
    int kx, ky;
    bool sine;
  };
  std::vector<Mode> modes;
  for (int ky = 0; ky <= max_frequency; ++ky)
    for (int kx = -max_frequency; kx <= max_frequency; ++kx) {
      if (ky == 0 && kx <= 0) continue;
      modes.push_back({kx, ky, false});
      modes.push_back({kx, ky, true});
    }

  SuiteResult out;
  out.rows.resize(modes.size() * (time_degree + 1));
#pragma omp parallel for schedule(dynamic)
  for (long m = 0; m < static_cast<long>(modes.size()); ++m) {
    const Mode &md = modes[m];
    const double wx = two_pi * md.kx / grid.lx, wy = two_pi * md.ky / grid.ly;
    // h = cos(theta) or sin(theta); grad h = h' (wx, wy), Hess h = -h (w w^T).
    std::vector<double> hp(n), hv(n);
    for (int p = 0; p < n; ++p) {
      const Vec2 x = grid.node(p);
      const double th = wx * x.x() + wy * x.y();
      hv[p] = md.sine ? std::sin(th) : std::cos(th);
      hp[p] = md.sine ? std::cos(th) : -std::sin(th);
    }
    auto grad_pair = [&](const GridField &rho, const GridVectorField &e) {
      double s = 0.0;
      for (int p = 0; p < n; ++p) s += rho[p] * hp[p] * (wx * e.x[p] + wy * e.y[p]);
      return s * grid.cell_area();
    };
    std::vector<double> a(K + 1), b(K + 1);
    for (int k = 0; k <= K; ++k) {
      const GeodesicSlice &s = g.slice(k);
      a[k] = grad_pair(s.rho, ge[k]);
      double sb = 0.0;
      for (int p = 0; p < n; ++p) {
        const double we = wx * ge[k].x[p] + wy * ge[k].y[p];
        const double wv = wx * s.velocity.x[p] + wy * s.velocity.y[p];
        sb -= s.rho[p] * hv[p] * we * wv;
      }
      b[k] = sb * grid.cell_area();
    }
    const double a1 = grad_pair(g.slice(K).rho, ge1);
    const double a0 = grad_pair(g.slice(0).rho, ge0);
    for (int d = 0; d <= time_degree; ++d) {
      std::vector<double> integrand(K + 1);
      for (int k = 0; k <= K; ++k) {
        const double t = g.time(k);
        const double dt_factor = d == 0 ? 0.0 : d * std::pow(t, d - 1);
        integrand[k] = dt_factor * a[k] + std::pow(t, d) * b[k];
      }
      const double boundary = a1 - (d == 0 ? a0 : 0.0);
      out.rows[m * (time_degree + 1) + d] = {md.kx, md.ky, md.sine, d, boundary - trapezoid(integrand, h)};
    }
  }
  for (const auto &r : out.rows) out.max_residual = std::max(out.max_residual, std::abs(r.residual));
  return out;
}

}  // namespace wpt
