#include "wpt/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wpt {

namespace {

void check_weights(const std::vector<double> &w, const char *what) {
  if (w.empty()) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": empty measure");
  double s = 0.0;
  for (double x : w) {
    if (!(x > 0.0)) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": weights must be positive");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": weights must sum to 1");
}

}  // namespace

ParticleMeasure::ParticleMeasure(Manifold manifold, std::vector<ManifoldPoint> points, std::vector<double> weights)
    : manifold_(manifold), points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size())
    throw Error(ErrorCode::InvalidArgument, "ParticleMeasure: points and weights differ in length");
  check_weights(weights_, "ParticleMeasure");
}

ParticleMeasure ParticleMeasure::uniform(Manifold manifold, std::vector<ManifoldPoint> points) {
  const size_t n = points.size();
  return ParticleMeasure(manifold, std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ParticleMeasure ParticleMeasure::delta(Manifold manifold, const ManifoldPoint &p) {
  return ParticleMeasure(manifold, {p}, {1.0});
}

std::vector<double> Coupling::dense() const {
  std::vector<double> out(static_cast<size_t>(source.size()) * target.size(), 0.0);
  for (const auto &e : plan) out[static_cast<size_t>(e.source) * target.size() + e.target] += e.mass;
  return out;
}

double Coupling::marginal_error() const {
  std::vector<double> rows(source.size(), 0.0), cols(target.size(), 0.0);
  for (const auto &e : plan) {
    rows[e.source] += e.mass;
    cols[e.target] += e.mass;
  }
  double err = 0.0;
  for (int i = 0; i < source.size(); ++i) err = std::max(err, std::abs(rows[i] - source.weights()[i]));
  for (int j = 0; j < target.size(); ++j) err = std::max(err, std::abs(cols[j] - target.weights()[j]));
  return err;
}

std::vector<double> half_squared_distance_matrix(const ParticleMeasure &mu, const ParticleMeasure &nu) {
  const int n = mu.size();
  const int m = nu.size();
  std::vector<double> c(static_cast<size_t>(n) * m);
  const Manifold &M = mu.manifold();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double d = M.dist(mu.points()[i], nu.points()[j]);
      c[static_cast<size_t>(i) * m + j] = 0.5 * d * d;
    }
  return c;
}

Coupling solve_exact_ot(const ParticleMeasure &mu, const ParticleMeasure &nu, const OtOptions &opt) {
  if (!(mu.manifold() == nu.manifold()))
    throw Error(ErrorCode::InvalidArgument, "solve_exact_ot: measures live on different manifolds");
  if (mu.size() > opt.size_cap || nu.size() > opt.size_cap)
    throw Error(ErrorCode::SizeCapExceeded,
                "measure size exceeds cap " + std::to_string(opt.size_cap));
  const auto cost = half_squared_distance_matrix(mu, nu);
  auto sol = solve_transport(cost, mu.weights(), nu.weights());
  return Coupling{mu, nu, std::move(sol.plan), sol.cost, sol.pivots};
}

double wasserstein2(const ParticleMeasure &mu, const ParticleMeasure &nu, const OtOptions &opt) {
  return std::sqrt(std::max(0.0, 2.0 * solve_exact_ot(mu, nu, opt).cost));
}

ParticleMeasure displacement_interpolation(const Coupling &c, double t) {
  if (t < 0.0 || t > 1.0) throw Error(ErrorCode::InvalidArgument, "displacement_interpolation: t outside [0,1]");
  const Manifold &M = c.source.manifold();
  std::vector<ManifoldPoint> pts;
  std::vector<double> w;
  double total = 0.0;
  for (const auto &e : c.plan) {
    if (!(e.mass > 0.0)) continue;
    const TangentVec v = M.log(c.source.points()[e.source], c.target.points()[e.target]);
    pts.push_back(M.exp({v.base, t * v.components}));
    w.push_back(e.mass);
    total += e.mass;
  }
  for (double &x : w) x /= total;
  return ParticleMeasure(M, std::move(pts), std::move(w));
}

void VectorMeasure::validate() const {
  if (vectors.size() != weights.size())
    throw Error(ErrorCode::InvalidArgument, "VectorMeasure: vectors and weights differ in length");
  check_weights(weights, "VectorMeasure");
}

double wasserstein2_flat(const VectorMeasure &a, const VectorMeasure &b, const OtOptions &opt) {
  a.validate();
  b.validate();
  if (a.size() > opt.size_cap || b.size() > opt.size_cap)
    throw Error(ErrorCode::SizeCapExceeded, "fiber measure exceeds size cap");
  std::vector<double> cost(static_cast<size_t>(a.size()) * b.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      cost[static_cast<size_t>(i) * b.size() + j] = 0.5 * (a.vectors[i] - b.vectors[j]).squaredNorm();
  const auto sol = solve_transport(cost, a.weights, b.weights);
  return std::sqrt(std::max(0.0, 2.0 * sol.cost));
}

double wasserstein2_line(std::vector<double> xa, std::vector<double> wa, std::vector<double> xb,
                         std::vector<double> wb) {
  auto sort_by_position = [](std::vector<double> &x, std::vector<double> &w) {
    std::vector<size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t p, size_t q) { return x[p] < x[q]; });
    std::vector<double> xs, ws;
    for (size_t k : idx) {
      xs.push_back(x[k]);
      ws.push_back(w[k]);
    }
    x = std::move(xs);
    w = std::move(ws);
  };
  sort_by_position(xa, wa);
  sort_by_position(xb, wb);
  // Walk both quantile functions simultaneously.
  size_t i = 0, j = 0;
  double ra = wa.empty() ? 0.0 : wa[0];
  double rb = wb.empty() ? 0.0 : wb[0];
  double sum = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double step = std::min(ra, rb);
    const double d = xa[i] - xb[j];
    sum += step * d * d;
    ra -= step;
    rb -= step;
    if (ra <= 1e-15) {
      if (++i < xa.size()) ra += wa[i];
    }
    if (rb <= 1e-15) {
      if (++j < xb.size()) rb += wb[j];
    }
  }
  return std::sqrt(std::max(0.0, sum));
}

}  // namespace wpt
