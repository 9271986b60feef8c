#include "wpt/tangent_cone.hpp"

#include <algorithm>
#include <cmath>

namespace wpt {

namespace {

void validate_fiber(const Carrier &S, int k, const VectorMeasure &fiber) {
  fiber.validate();
  for (const Vec3 &v : fiber.vectors) {
    const TangentNormal split = tangential_normal_split(S, k, v);
    if (split.tangential.norm() > 1e-9 * (1.0 + v.norm()))
      throw Error(ErrorCode::InvalidArgument, "fiber vector is not normal to the carrier");
  }
}

double fiber_w2(const Carrier &S, int k, const VectorMeasure &a, const VectorMeasure &b, const OtOptions &opt) {
  switch (S.codim()) {
    case 0: return 0.0;
    case 1: {
      const Vec3 n = S.unit_normal(k);
      std::vector<double> xa, xb;
      for (const Vec3 &v : a.vectors) xa.push_back(v.dot(n));
      for (const Vec3 &v : b.vectors) xb.push_back(v.dot(n));
      return wasserstein2_line(std::move(xa), a.weights, std::move(xb), b.weights);
    }
    default: return wasserstein2_flat(a, b, opt);
  }
}

double dot(const GridField &a, const GridField &b) {
  double s = 0.0;
  for (size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
  return s;
}

}  // namespace

ConeElement::ConeElement(Carrier carrier, std::vector<double> weights, std::vector<double> potential,
                         std::vector<VectorMeasure> fibers)
    : carrier_(std::move(carrier)),
      weights_(std::move(weights)),
      potential_(std::move(potential)),
      fibers_(std::move(fibers)) {
  const size_t n = carrier_.points().size();
  if (weights_.size() != n || potential_.size() != n || fibers_.size() != n)
    throw Error(ErrorCode::InvalidArgument, "ConeElement: sizes differ from the carrier");
  // Rejects zero weights: the base measure must charge every sample.
  ParticleMeasure(carrier_.manifold(), carrier_.points(), weights_);
  for (int k = 0; k < carrier_.size(); ++k) validate_fiber(carrier_, k, fibers_[k]);
  double m = 0.0;
  for (size_t k = 0; k < n; ++k) m += weights_[k] * potential_[k];
  for (double &f : potential_) f -= m;
}

ConeElement ConeElement::vertex(Carrier carrier, std::vector<double> weights) {
  const size_t n = carrier.points().size();
  return ConeElement(std::move(carrier), std::move(weights), std::vector<double>(n, 0.0),
                     std::vector<VectorMeasure>(n, VectorMeasure::delta(Vec3::Zero())));
}

ConeElement ConeElement::scaled(double lambda) const {
  if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "ConeElement::scaled: negative factor");
  ConeElement out = *this;
  for (double &f : out.potential_) f *= lambda;
  for (auto &fiber : out.fibers_)
    for (Vec3 &v : fiber.vectors) v *= lambda;
  return out;
}

ConeDistance cone_distance(const ConeElement &a, const ConeElement &b, const OtOptions &opt) {
  if (!(a.carrier() == b.carrier()) || a.weights() != b.weights())
    throw Error(ErrorCode::BaseMismatch, "cone elements sit over different base measures");
  const Carrier &S = a.carrier();
  const auto ga = S.tangential_gradient(a.potential());
  const auto gb = S.tangential_gradient(b.potential());
  const int n = S.size();
  std::vector<double> w2(n);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) w2[k] = fiber_w2(S, k, a.fibers()[k], b.fibers()[k], opt);

  ConeDistance d;
  double inner = 0.0;
  for (int k = 0; k < n; ++k) {
    const double mu = a.weights()[k];
    d.tangential_sq += mu * (ga[k] - gb[k]).squaredNorm();
    inner += mu * ga[k].dot(gb[k]);
    d.normal_sq += mu * w2[k] * w2[k];
  }
  d.distance = std::sqrt(d.tangential_sq + d.normal_sq);
  d.literal_inner_form = inner + d.normal_sq;
  return d;
}

GradientProjection project_gradient(const GridField &rho, const GridVectorField &V) {
  require_same_grid(rho.grid, V.grid, "project_gradient");
  for (double r : rho.v)
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "project_gradient: density must be positive");
  const PeriodicGrid &g = rho.grid;
  const double rho_bar = mean(rho);

  auto apply = [&](const GridField &u) { return -1.0 * divergence(scale(rho, gradient(u))); };
  auto precondition = [&](const GridField &r) { return (-1.0 / rho_bar) * inverse_laplacian(r); };

  GradientProjection out;
  out.potential = GridField(g);
  const GridField b = -1.0 * divergence(scale(rho, V));
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    out.gradient = GridVectorField(g);
    return out;
  }

  constexpr double kTarget = 1e-13;
  constexpr double kAccept = 1e-10;
  constexpr int kMaxIterations = 500;
  constexpr int kStall = 20;  // iterations without improvement before giving up on kTarget
  GridField r = b;
  GridField z = precondition(r);
  GridField p = z;
  double rz = dot(r, z);
  GridField x(g);
  GridField best = x;
  double best_res = 1.0;
  int best_it = 0;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const GridField Ap = apply(p);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0) || !(rz > 0.0)) break;
    const double alpha = rz / pAp;
    for (int k = 0; k < g.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    out.iterations = it;
    const double res = std::sqrt(dot(r, r)) / bnorm;
    if (res < best_res) {
      best_res = res;
      best = x;
      best_it = it;
    }
    if (res <= kTarget || it - best_it >= kStall) break;
    z = precondition(r);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int k = 0; k < g.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  const GridField true_r = b - apply(best);
  out.relative_residual = std::sqrt(dot(true_r, true_r)) / bnorm;
  if (!(out.relative_residual <= kAccept))
    throw Error(ErrorCode::SolverDiverged,
                "project_gradient: relative residual " + std::to_string(out.relative_residual));
  x = best;
  out.potential = project_resolved(x);
  out.gradient = gradient(out.potential);
  return out;
}

}  // namespace wpt
