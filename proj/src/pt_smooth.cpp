#include "wpt/pt_smooth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace wpt {

namespace {

constexpr double kMinJacobian = 0.1;

std::vector<Vec2> grid_nodes(const PeriodicGrid &g) {
  std::vector<Vec2> out(g.size());
  for (int k = 0; k < g.size(); ++k) out[k] = g.node(k);
  return out;
}

GridVectorField hessian_times(const GridField &eta, const GridVectorField &v) {
  const GridHessian H = hessian(eta);
  GridVectorField out(eta.grid);
  for (int k = 0; k < eta.grid.size(); ++k) {
    out.x[k] = H.xx[k] * v.x[k] + H.xy[k] * v.y[k];
    out.y[k] = H.xy[k] * v.x[k] + H.yy[k] * v.y[k];
  }
  return out;
}

// d eta / dt from the parallel transport equation at one slice.
GridField transport_rate(const GridField &eta, const GeodesicSlice &s) {
  return -1.0 * project_gradient(s.rho, hessian_times(eta, s.velocity)).potential;
}

GridField axpy(const GridField &x, double a, const GridField &y) {
  GridField out = x;
  for (size_t k = 0; k < out.v.size(); ++k) out.v[k] += a * y.v[k];
  return out;
}

double weighted_gradient_distance(const GridField &rho, const GridVectorField &a, const GridVectorField &b) {
  return weighted_norm(rho, a - b);
}

}  // namespace

// --- geodesic ----------------------------------------------------------------

SmoothGeodesic::SmoothGeodesic(const GridField &rho0, const GridField &phi0_periodic, int K, const Vec2 &drift)
    : grid_(rho0.grid), K_(K), drift_(drift) {
  require_same_grid(rho0.grid, phi0_periodic.grid, "build_geodesic");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "build_geodesic: K must be positive");
  for (double r : rho0.v)
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "build_geodesic: density must be positive");
  const double m = mean(rho0);
  rho0_ = SpectralInterpolant((1.0 / m) * rho0);
  phi0_ = SpectralInterpolant(phi0_periodic);

  // det(I + t H) = 1 + t tr H + t^2 det H is quadratic in t; its minimum over
  // [0, 1] is at an endpoint or at the vertex.
  const GridHessian H = hessian(phi0_periodic);
  diag_.min_jacobian = 1.0;
  for (int k = 0; k < grid_.size(); ++k) {
    const double tr = H.xx[k] + H.yy[k];
    const double det = H.xx[k] * H.yy[k] - H.xy[k] * H.xy[k];
    auto J = [&](double t) { return 1.0 + t * tr + t * t * det; };
    double lo = std::min(1.0, J(1.0));
    if (det != 0.0) {
      const double tv = -tr / (2.0 * det);
      if (tv > 0.0 && tv < 1.0) lo = std::min(lo, J(tv));
    }
    diag_.min_jacobian = std::min(diag_.min_jacobian, lo);
  }
  if (diag_.min_jacobian <= kMinJacobian)
    throw Error(ErrorCode::MapDegenerate,
                "Jacobian determinant of the flow drops to " + std::to_string(diag_.min_jacobian));

  slices_.reserve(K + 1);
  for (int k = 0; k <= K; ++k) {
    slices_.push_back(compute_slice(time(k)));
    const auto &s = slices_.back();
    diag_.continuity_residual = std::max(diag_.continuity_residual, s.continuity_residual);
    diag_.hj_residual = std::max(diag_.hj_residual, s.hj_residual);
    diag_.c2_norm = std::max(diag_.c2_norm, s.c2_norm);
  }
}

std::vector<Vec2> SmoothGeodesic::labels(std::span<const Vec2> y, double t) const {
  std::vector<Vec2> x(y.size());
  {
    const auto j0 = phi0_.jets(y);
    for (size_t k = 0; k < y.size(); ++k) x[k] = y[k] - t * (drift_ + j0[k].grad);
  }
  if (t == 0.0) return x;
  constexpr int kMaxNewton = 50;
  for (int it = 0; it < kMaxNewton; ++it) {
    const auto jets = phi0_.jets(x);
    double worst_step = 0.0;
    double worst_res = 0.0;
    for (size_t k = 0; k < y.size(); ++k) {
      const auto &jt = jets[k];
      const Vec2 F = x[k] + t * (drift_ + jt.grad) - y[k];
      const double a = 1.0 + t * jt.hess[0], b = t * jt.hess[1], d = 1.0 + t * jt.hess[2];
      const double det = a * d - b * b;
      if (!(det > 0.0)) throw Error(ErrorCode::MapDegenerate, "flow map is singular at a label");
      const Vec2 step((d * F.x() - b * F.y()) / det, (a * F.y() - b * F.x()) / det);
      x[k] -= step;
      worst_step = std::max(worst_step, step.cwiseAbs().maxCoeff());
      worst_res = std::max(worst_res, F.cwiseAbs().maxCoeff());
    }
    if (worst_step < 1e-15 || worst_res < 1e-15) return x;
  }
  throw Error(ErrorCode::MapDegenerate, "Newton inversion of the flow map did not converge");
}

GeodesicSlice SmoothGeodesic::compute_slice(double t) const {
  if (t < 0.0 || t > 1.0) throw Error(ErrorCode::InvalidArgument, "compute_slice: t outside [0,1]");
  const int n = grid_.size();
  GeodesicSlice s;
  s.t = t;
  const auto nodes = grid_nodes(grid_);
  s.preimage = labels(nodes, t);
  const auto jets = phi0_.jets(s.preimage);
  const auto r0 = rho0_.values(s.preimage);

  s.rho = GridField(grid_);
  s.phi = GridField(grid_);
  s.jacobian = GridField(grid_);
  s.velocity = GridVectorField(grid_);
  GridField div_rate(grid_);  // tr((I + tH)^-1 H), the Lagrangian rate of log J
  for (int k = 0; k < n; ++k) {
    const auto &jt = jets[k];
    const double hxx = jt.hess[0], hxy = jt.hess[1], hyy = jt.hess[2];
    const double det_h = hxx * hyy - hxy * hxy;
    const double J = (1.0 + t * hxx) * (1.0 + t * hyy) - t * t * hxy * hxy;
    if (!(J > 0.0)) throw Error(ErrorCode::MapDegenerate, "flow Jacobian is not positive");
    s.jacobian[k] = J;
    s.rho[k] = r0[k] / J;
    s.velocity.x[k] = drift_.x() + jt.grad.x();
    s.velocity.y[k] = drift_.y() + jt.grad.y();
    s.phi[k] = jt.value + 0.5 * t * jt.grad.squaredNorm();
    div_rate[k] = (hxx + hyy + 2.0 * t * det_h) / J;
  }
  const double m = mean(s.rho);
  for (double &r : s.rho.v) r /= m;
  const double phi_mean = weighted_inner(s.rho, s.phi, GridField(grid_, 1.0)) / integrate(s.rho);
  for (double &p : s.phi.v) p -= phi_mean;

  // Diagnostics: Eulerian residuals of the reconstructed fields.
  GridVectorField gphi = gradient(s.phi);
  for (int k = 0; k < n; ++k) {
    gphi.x[k] += drift_.x();
    gphi.y[k] += drift_.y();
    s.hj_residual = std::max(s.hj_residual, std::hypot(gphi.x[k] - s.velocity.x[k], gphi.y[k] - s.velocity.y[k]));
  }
  const GridVectorField grho = gradient(s.rho);
  const GridField flux_div = divergence(scale(s.rho, gphi));
  for (int k = 0; k < n; ++k) {
    const double dt_rho = -s.rho[k] * div_rate[k] - (s.velocity.x[k] * grho.x[k] + s.velocity.y[k] * grho.y[k]);
    s.continuity_residual = std::max(s.continuity_residual, std::abs(dt_rho + flux_div[k]));
  }
  const GridHessian H = hessian(s.phi);
  double sup_h = 0.0, sup_g = 0.0;
  for (int k = 0; k < n; ++k) {
    sup_h = std::max({sup_h, std::abs(H.xx[k]), std::abs(H.xy[k]), std::abs(H.yy[k])});
    sup_g = std::max(sup_g, std::hypot(gphi.x[k], gphi.y[k]));
  }
  s.c2_norm = max_abs(s.phi) + sup_g + sup_h;
  return s;
}

SmoothGeodesic build_geodesic(const GridField &rho0, const GridField &phi0_periodic, int K, const Vec2 &drift) {
  return SmoothGeodesic(rho0, phi0_periodic, K, drift);
}

// --- PDE ---------------------------------------------------------------------

TransportTriple solve_pt_pde(const SmoothGeodesic &g, const GridField &eta1, const PdeOptions &opt) {
  require_same_grid(g.grid(), eta1.grid, "solve_pt_pde");
  if (opt.substeps < 1) throw Error(ErrorCode::InvalidArgument, "solve_pt_pde: substeps must be positive");
  const int K = g.steps();
  const int s = opt.substeps;
  const int n = K * s;
  const double h = 1.0 / n;

  // Slice at half-step index m (time m / (2n)).
  auto slice_at = [&](int m, GeodesicSlice &scratch) -> const GeodesicSlice & {
    if (m % (2 * s) == 0) return g.slice(m / (2 * s));
    scratch = g.compute_slice(static_cast<double>(m) / (2.0 * n));
    return scratch;
  };

  TransportTriple out;
  out.eta.resize(K + 1);
  GridField eta = project_resolved(eta1);
  out.eta1 = eta;
  out.eta[K] = eta;
  GeodesicSlice scratch_end, scratch_mid;
  const GeodesicSlice *end = &g.slice(K);
  for (int step = n; step >= 1; --step) {
    const GeodesicSlice &mid = slice_at(2 * step - 1, scratch_mid);
    GeodesicSlice next_scratch;
    const GeodesicSlice &next = slice_at(2 * step - 2, next_scratch);
    const GridField k1 = transport_rate(eta, *end);
    const GridField k2 = transport_rate(axpy(eta, -0.5 * h, k1), mid);
    const GridField k3 = transport_rate(axpy(eta, -0.5 * h, k2), mid);
    const GridField k4 = transport_rate(axpy(eta, -h, k3), next);
    for (size_t k = 0; k < eta.v.size(); ++k)
      eta.v[k] -= h / 6.0 * (k1.v[k] + 2.0 * k2.v[k] + 2.0 * k3.v[k] + k4.v[k]);
    eta = project_resolved(eta);
    if ((step - 1) % s == 0) out.eta[(step - 1) / s] = eta;
    scratch_end = std::move(next_scratch);
    end = (2 * step - 2) % (2 * s) == 0 ? &g.slice((2 * step - 2) / (2 * s)) : &scratch_end;
  }
  out.eta0 = out.eta[0];
  return out;
}

double pairing(const SmoothGeodesic &g, const GridField &eta, const GridField &eta_bar, int k) {
  const GeodesicSlice &s = g.slice(k);
  require_same_grid(s.rho.grid, eta.grid, "pairing");
  require_same_grid(s.rho.grid, eta_bar.grid, "pairing");
  return weighted_inner(s.rho, gradient(eta), gradient(eta_bar));
}

double gradient_norm(const SmoothGeodesic &g, const GridField &eta, int k) {
  return std::sqrt(std::max(0.0, pairing(g, eta, eta, k)));
}

// --- Petrunin ------------------------------------------------------------------

PetruninScheme::PetruninScheme(const SmoothGeodesic &g, int Q) : g_(&g), Q_(Q) {
  if (Q < 1) throw Error(ErrorCode::InvalidArgument, "PetruninScheme: Q must be positive");
}

const GeodesicSlice &PetruninScheme::node(int i) const {
  if (i < 0 || i > Q_) throw Error(ErrorCode::InvalidArgument, "PetruninScheme::node: index out of range");
  const int K = g_->steps();
  if ((static_cast<long>(i) * K) % Q_ == 0) return g_->slice(static_cast<int>(static_cast<long>(i) * K / Q_));
  std::lock_guard lock(mutex_);
  auto &slot = nodes_[i];
  if (!slot) slot = std::make_unique<GeodesicSlice>(g_->compute_slice(static_cast<double>(i) / Q_));
  return *slot;
}

const GeodesicSlice &PetruninScheme::slice_at(int i, double u, GeodesicSlice &scratch) const {
  if (i < 0 || i >= Q_) throw Error(ErrorCode::InvalidArgument, "segment index out of range");
  if (u < 0.0 || u > 1.0) throw Error(ErrorCode::InvalidArgument, "segment parameter outside [0,1]");
  if (u == 0.0) return node(i);
  if (u == 1.0) return node(i + 1);
  scratch = g_->compute_slice((i + u) / Q_);
  return scratch;
}

GridVectorField PetruninScheme::push_field_W(int i, const GridField &sigma, const GeodesicSlice &at) const {
  require_same_grid(g_->grid(), sigma.grid, "push_field_W");
  const double ti = static_cast<double>(i) / Q_;
  const int n = g_->grid().size();
  // Node y at time `at.t` comes from label x0; its position at t_i is x0 + t_i v0(x0).
  std::vector<Vec2> x(n);
  for (int k = 0; k < n; ++k) x[k] = at.preimage[k] + ti * Vec2(at.velocity.x[k], at.velocity.y[k]);
  GridVectorField W(g_->grid());
  SpectralInterpolant(sigma).gradients(x, W.x, W.y);
  return W;
}

GridVectorField PetruninScheme::push_field_W(int i, const GridField &sigma, double u) const {
  GeodesicSlice scratch;
  return push_field_W(i, sigma, slice_at(i, u, scratch));
}

PotentialField PetruninScheme::project_L(int i, double u, const GridVectorField &W) const {
  GeodesicSlice scratch;
  const GeodesicSlice &s = slice_at(i, u, scratch);
  auto p = project_gradient(s.rho, W);
  return {std::move(p.potential), std::move(p.gradient)};
}

PotentialField PetruninScheme::apply_A(int i, const GridField &sigma) const {
  const GeodesicSlice &end = node(i + 1);
  auto p = project_gradient(end.rho, push_field_W(i, sigma, end));
  return {std::move(p.potential), std::move(p.gradient)};
}

PotentialField PetruninScheme::apply_B(int i, const GridField &f) const {
  require_same_grid(g_->grid(), f.grid, "apply_B");
  if (i < 0 || i >= Q_) throw Error(ErrorCode::InvalidArgument, "segment index out of range");
  const GeodesicSlice &start = node(i);
  const double t1 = static_cast<double>(i + 1) / Q_;
  const int n = g_->grid().size();
  std::vector<Vec2> y(n);
  for (int k = 0; k < n; ++k) y[k] = start.preimage[k] + t1 * Vec2(start.velocity.x[k], start.velocity.y[k]);
  GridField composed(g_->grid());
  composed.v = SpectralInterpolant(f).values(y);
  PotentialField out{project_resolved(composed), {}};
  out.gradient = gradient(out.potential);
  return out;
}

InvertResult PetruninScheme::invert_A(int i, const GridField &target, double tol, int max_iterations) const {
  require_same_grid(g_->grid(), target.grid, "invert_A");
  const GridField &rho1 = node(i + 1).rho;
  const GridField tau = project_resolved(target);
  const GridVectorField tgrad = gradient(tau);
  const double tnorm = weighted_norm(rho1, tgrad);
  InvertResult r;
  if (tnorm == 0.0) {
    r.sigma = {GridField(g_->grid()), GridVectorField(g_->grid())};
    return r;
  }
  GridField x = apply_B(i, tau).potential;
  for (int it = 1; it <= max_iterations; ++it) {
    const PotentialField Ax = apply_A(i, x);
    r.iterations = it;
    r.residual = weighted_gradient_distance(rho1, Ax.gradient, tgrad);
    if (it == 1) {
      // x = B tau here, so this is ||(AB - I) tau|| / ||tau||.
      r.contraction = r.residual / tnorm;
      if (r.contraction >= 1.0)
        throw Error(ErrorCode::NotContractive,
                    "sampled ||A B - I|| = " + std::to_string(r.contraction) + " on segment " + std::to_string(i));
    }
    if (r.residual <= tol) {
      r.sigma.potential = x;
      r.sigma.gradient = gradient(x);
      return r;
    }
    const PotentialField corr = apply_B(i, tau - Ax.potential);
    for (size_t k = 0; k < x.v.size(); ++k) x.v[k] += corr.potential.v[k];
  }
  char msg[96];
  std::snprintf(msg, sizeof msg, "invert_A: residual %.3e after %d iterations", r.residual, max_iterations);
  throw Error(ErrorCode::MaxIterations, msg);
}

InvertResult PetruninScheme::invert_A(int i, const GridVectorField &target, double tol, int max_iterations) const {
  const GridField ones(target.grid, 1.0);
  return invert_A(i, project_gradient(ones, target).potential, tol, max_iterations);
}

double PetruninScheme::sample_AB_minus_I(int i, std::span<const GridField> samples) const {
  const GridField &rho1 = node(i + 1).rho;
  double worst = 0.0;
  for (const GridField &f : samples) {
    const GridVectorField gf = gradient(f);
    const double nf = weighted_norm(rho1, gf);
    if (nf == 0.0) continue;
    const PotentialField ab = apply_A(i, apply_B(i, f).potential);
    worst = std::max(worst, weighted_gradient_distance(rho1, ab.gradient, gf) / nf);
  }
  return worst;
}

PetruninRecord petrunin_transport(const SmoothGeodesic &g, const GridField &eta1, int Q, double tol) {
  require_same_grid(g.grid(), eta1.grid, "petrunin_transport");
  const int K = g.steps();
  PetruninScheme scheme(g, Q);
  PetruninRecord rec;
  const GridField e1 = project_resolved(eta1);
  const double n1 = gradient_norm(g, e1, K);
  rec.triple.eta1 = e1;
  rec.triple.eta.assign(K + 1, GridField(g.grid()));
  rec.norm_ratio.assign(K + 1, 0.0);
  if (n1 == 0.0) {
    rec.triple.eta0 = GridField(g.grid());
    return rec;
  }

  std::vector<GridField> sigma(Q);
  GridField target = e1;
  for (int i = Q - 1; i >= 0; --i) {
    const InvertResult r = scheme.invert_A(i, target, tol * n1);
    rec.max_inner_iterations = std::max(rec.max_inner_iterations, r.iterations);
    rec.max_contraction = std::max(rec.max_contraction, r.contraction);
    sigma[i] = r.sigma.potential;
    target = sigma[i];
  }
  rec.triple.eta0 = sigma[0];

  for (int k = 0; k <= K; ++k) {
    const long qk = static_cast<long>(Q) * k;
    const int i = static_cast<int>(std::min<long>(qk / K, Q - 1));
    const double u = static_cast<double>(qk - static_cast<long>(i) * K) / K;
    const GeodesicSlice &s = g.slice(k);
    if (u == 0.0) {
      rec.triple.eta[k] = sigma[i];
    } else {
      rec.triple.eta[k] = project_gradient(s.rho, scheme.push_field_W(i, sigma[i], s)).potential;
    }
    rec.norm_ratio[k] = gradient_norm(g, rec.triple.eta[k], k) / n1;
    rec.drift = std::max(rec.drift, std::abs(rec.norm_ratio[k] - 1.0));
  }
  return rec;
}

}  // namespace wpt
