#include "wpt/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace wpt {

namespace {

double weighted_mean(const std::vector<double> &f, const std::vector<double> &w) {
  double s = 0.0, m = 0.0;
  for (size_t k = 0; k < f.size(); ++k) {
    s += w[k] * f[k];
    m += w[k];
  }
  return s / m;
}

void center(std::vector<double> &f, const std::vector<double> &w) {
  const double m = weighted_mean(f, w);
  for (double &x : f) x -= m;
}

// Mass-weighted mean velocity of each source under the plan.
std::vector<Vec3> barycentric_velocities(const Coupling &c) {
  const Manifold &M = c.source.manifold();
  std::vector<Vec3> v(c.source.size(), Vec3::Zero());
  for (const auto &e : c.plan) {
    if (e.mass <= 0.0) continue;
    v[e.source] += e.mass * M.log(c.source.points()[e.source], c.target.points()[e.target]).components;
  }
  for (int i = 0; i < c.source.size(); ++i) v[i] /= c.source.weights()[i];
  return v;
}

double wrap_forward(double d, double period) {
  d = std::fmod(d, period);
  return d < 0.0 ? d + period : d;
}

}  // namespace

TangentialGradientVerdict tangential_gradient_check(const Carrier &S, const std::vector<Vec3> &vectors,
                                                    const std::vector<double> &weights, double tol) {
  if (S.dim() != 1) throw Error(ErrorCode::InvalidArgument, "tangential_gradient_check: carrier is not a curve");
  const int n = S.size();
  if (static_cast<int>(vectors.size()) != n || static_cast<int>(weights.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "tangential_gradient_check: sizes differ from the carrier");
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = vectors[k].dot(S.unit_tangent(k));

  TangentialGradientVerdict out;
  out.potential.assign(n, 0.0);
  for (int k = 0; k + 1 < n; ++k) out.potential[k + 1] = out.potential[k] + 0.5 * (g[k] + g[k + 1]) * S.segment_length(k);
  out.loop_integral = out.potential[n - 1] + 0.5 * (g[n - 1] + g[0]) * S.segment_length(n - 1);
  out.is_gradient = std::abs(out.loop_integral) <= tol;
  center(out.potential, weights);
  return out;
}

CylinderReport cylinder_example(const std::vector<double> &F, const OtOptions &opt) {
  const int n = static_cast<int>(F.size());
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "cylinder_example: need at least 3 samples");
  for (double h : F)
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "cylinder_example: F must be positive");
  const double C = 2.0 * std::numbers::pi;
  const Manifold M = Manifold::cylinder(C);

  std::vector<ManifoldPoint> top, bottom;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    const double x = C * i / n;
    top.push_back(M.point(x, F[i]));
    bottom.push_back(M.point(x, 0.0));
    w[i] = 1.0 + 0.25 * std::cos(x);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double &x : w) x /= total;

  const ParticleMeasure mu0(M, top, w), mu1(M, bottom, w);
  const Coupling c = solve_exact_ot(mu0, mu1, opt);

  CylinderReport r;
  r.n = n;
  r.lp_cost = c.cost;
  r.pivots = c.pivots;
  for (int i = 0; i < n; ++i) r.vertical_cost += 0.5 * w[i] * F[i] * F[i];
  r.plan_is_vertical = std::all_of(c.plan.begin(), c.plan.end(),
                                   [](const TransportEntry &e) { return e.mass <= 1e-15 || e.source == e.target; });
  r.velocities = barycentric_velocities(c);

  const Carrier S = Carrier::cylinder_graph(M, F);
  const auto verdict = tangential_gradient_check(S, r.velocities, w, std::numeric_limits<double>::infinity());
  r.recovered = verdict.potential;
  r.loop_integral = verdict.loop_integral;
  r.expected.resize(n);
  for (int i = 0; i < n; ++i) r.expected[i] = -0.5 * F[i] * F[i];
  center(r.expected, w);
  for (int i = 0; i < n; ++i) {
    r.max_potential_error = std::max(r.max_potential_error, std::abs(r.recovered[i] - r.expected[i]));
    r.max_tangential =
        std::max(r.max_tangential, tangential_normal_split(S, i, r.velocities[i]).tangential.norm());
  }
  return r;
}

CylinderReport cylinder_example(const std::function<double(double)> &F, int n, const OtOptions &opt) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "cylinder_example: need at least 3 samples");
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) h[i] = F(2.0 * std::numbers::pi * i / n);
  return cylinder_example(h, opt);
}

SubmanifoldGeodesic geodesic_from_submanifold(const Carrier &S, const std::vector<double> &weights,
                                              const std::vector<double> &f,
                                              const std::vector<VectorMeasure> &normal_fibers,
                                              const SubmanifoldGeodesicOptions &opt) {
  const int n = S.size();
  if (static_cast<int>(weights.size()) != n || static_cast<int>(f.size()) != n ||
      static_cast<int>(normal_fibers.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "geodesic_from_submanifold: sizes differ from the carrier");
  if (opt.steps < 1) throw Error(ErrorCode::InvalidArgument, "geodesic_from_submanifold: steps must be positive");
  const Manifold &M = S.manifold();
  const ParticleMeasure mu0(M, S.points(), weights);

  SubmanifoldGeodesic out;
  std::vector<double> fs = f;
  if (!opt.probe.empty()) {
    out.epsilon = scale_to_c_convex(DiscreteFunctionOnS{M, S.points(), f}, opt.probe, opt.c_convex_tol).epsilon;
    for (double &x : fs) x *= out.epsilon;
  }
  const auto grad = S.tangential_gradient(fs);

  std::vector<double> pw;
  double max_speed = 0.0;
  for (int k = 0; k < n; ++k) {
    const VectorMeasure &fiber = normal_fibers[k];
    fiber.validate();
    for (int j = 0; j < fiber.size(); ++j) {
      const Vec3 &u = fiber.vectors[j];
      if (tangential_normal_split(S, k, u).tangential.norm() > 1e-9 * (1.0 + u.norm()))
        throw Error(ErrorCode::InvalidArgument, "geodesic_from_submanifold: fiber vector is not normal");
      const Vec3 v = M.tangent(S.points()[k], grad[k] + u).components;
      out.velocities.push_back(v);
      out.source.push_back(k);
      pw.push_back(weights[k] * fiber.weights[j]);
      max_speed = std::max(max_speed, v.norm());
    }
  }
  out.t_max = opt.t_max > 0.0 ? opt.t_max
              : max_speed > 0.0 ? 0.2 * M.injectivity_radius() / max_speed
                                : 1.0;

  const int P = static_cast<int>(out.velocities.size());
  for (int p = 0; p < P; ++p) {
    const ManifoldPoint &x = S.points()[out.source[p]];
    const TangentVec tv = M.tangent(x, out.t_max * out.velocities[p]);
    const TangentVec back = M.log(x, M.exp(tv));
    if ((back.components - tv.components).norm() > 1e-9 * (1.0 + tv.norm()))
      throw Error(ErrorCode::CutLocus, "geodesic_from_submanifold: a ray leaves the injectivity domain");
  }

  for (int k = 0; k <= opt.steps; ++k) {
    const double t = out.t_max * k / opt.steps;
    std::vector<ManifoldPoint> pts(P);
    for (int p = 0; p < P; ++p) pts[p] = M.exp(M.tangent(S.points()[out.source[p]], t * out.velocities[p]));
    out.times.push_back(t);
    out.measures.emplace_back(M, std::move(pts), pw);
  }

  std::vector<double> w2(opt.steps + 1, 0.0), gap(opt.steps + 1, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int k = 1; k <= opt.steps; ++k) {
    const Coupling c = solve_exact_ot(mu0, out.measures[k], opt.ot);
    const double t = out.times[k];
    double direct = 0.0;
    for (int p = 0; p < P; ++p) direct += 0.5 * pw[p] * t * t * out.velocities[p].squaredNorm();
    w2[k] = std::sqrt(2.0 * std::max(c.cost, 0.0));
    gap[k] = c.cost > 0.0 ? (direct - c.cost) / c.cost : direct;
  }
  for (int k = 1; k <= opt.steps; ++k) {
    out.constant_speed_error =
        std::max(out.constant_speed_error, std::abs(w2[k] - out.times[k] * w2[opt.steps] / out.t_max));
    out.direct_coupling_gap = std::max(out.direct_coupling_gap, gap[k]);
  }
  return out;
}

ElReport el_diagnostics(const ParticleMeasure &mu0, const ParticleMeasure &mu1, const std::vector<double> &levels,
                        const OtOptions &opt) {
  const Manifold &M = mu0.manifold();
  if (M.kind() != ManifoldKind::FlatTorus || M.dim() != 2)
    throw Error(ErrorCode::InvalidArgument, "el_diagnostics requires the 2-torus");
  auto level_of = [](const ParticleMeasure &mu) {
    const double y = mu.points().front().coords.y();
    for (const auto &p : mu.points())
      if (std::abs(p.coords.y() - y) > 1e-12)
        throw Error(ErrorCode::InvalidArgument, "el_diagnostics: support is not a horizontal circle");
    return y;
  };
  const double y0 = level_of(mu0), y1 = level_of(mu1);
  if (M.dist(M.point(0.0, y0), M.point(0.0, y1)) < 1e-9)
    throw Error(ErrorCode::InvalidArgument, "el_diagnostics: the circles coincide");

  const Coupling c = solve_exact_ot(mu0, mu1, opt);
  struct Ray {
    double x, mass;
    Vec3 v;
  };
  std::vector<Ray> rays;
  for (const auto &e : c.plan)
    if (e.mass > 0.0) {
      const ManifoldPoint &p = mu0.points()[e.source];
      rays.push_back({p.coords.x(), e.mass, M.log(p, mu1.points()[e.target]).components});
    }

  ElReport out;
  out.rays = static_cast<int>(rays.size());
  const ManifoldPoint origin = M.point(0.0, y0);
  for (const Ray &r : rays)
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
      const Vec3 vel = M.geodesic_velocity(M.tangent(origin, t * r.v)).components / t;
      out.max_speed_deviation = std::max(out.max_speed_deviation, std::abs(vel.norm() - r.v.norm()));
    }

  const double lx = M.periods().x();
  for (double t : levels) {
    if (t < 0.0 || t > 1.0) throw Error(ErrorCode::InvalidArgument, "el_diagnostics: levels must lie in [0, 1]");
    const int m = static_cast<int>(rays.size());
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> z(m);
    for (int k = 0; k < m; ++k) z[k] = wrap_forward(rays[k].x + t * rays[k].v.x(), lx);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return z[a] < z[b]; });

    LevelReport L;
    L.t = t;
    std::vector<double> gap(m);
    for (int k = 0; k < m; ++k) {
      const int a = order[k], b = order[(k + 1) % m];
      gap[k] = k + 1 < m ? z[b] - z[a] : z[b] + lx - z[a];
      L.loop_integral += 0.5 * (rays[a].v.x() + rays[b].v.x()) * gap[k];
    }
    double mass = 0.0;
    for (int k = 0; k < m; ++k) {
      const Ray &r = rays[order[k]];
      const double vm = rays[order[(k + m - 1) % m]].v.x(), vp = rays[order[(k + 1) % m]].v.x();
      const double hm = gap[(k + m - 1) % m], hp = gap[k];
      // Derivative of the trapezoidal antiderivative of V_tan at this node.
      const double p = hm + hp > 0.0 ? (hm * 0.5 * (r.v.x() + vp) + hp * 0.5 * (vm + r.v.x())) / (hm + hp) : r.v.x();
      const double dy = r.v.y();
      const double a = (dy * dy - p * p) / (2.0 * dy);
      const double gphi = std::hypot(p, a);
      const double gT = 1.0 / std::abs(dy);
      const Vec2 predicted(p, a + gphi / gT * (1.0 / dy));
      L.decomposition_residual = std::max(L.decomposition_residual, (Vec2(r.v.x(), r.v.y()) - predicted).norm());
      L.max_multiplier_residual = std::max(L.max_multiplier_residual, std::abs(a / dy - 1.0 + gphi * gT));
      L.mean_eta += r.mass * (-gphi / gT);
      L.mean_half_speed_sq += r.mass * 0.5 * r.v.squaredNorm();
      L.mean_half_ratio += r.mass * 0.5 * gphi / gT;
      mass += r.mass;
    }
    L.mean_eta /= mass;
    L.mean_half_speed_sq /= mass;
    L.mean_half_ratio /= mass;
    out.levels.push_back(L);
  }
  return out;
}

}  // namespace wpt
