#include "wpt/carrier.hpp"

#include <cmath>
#include <numbers>

namespace wpt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_torus2(const Manifold &m, const char *what) {
  if (m.kind() != ManifoldKind::FlatTorus || m.dim() != 2)
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " requires the 2-torus");
}

void require_samples(int n, const char *what) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs at least 3 samples");
}

}  // namespace

Carrier Carrier::point_set(const Manifold &m, std::vector<ManifoldPoint> points) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "point_set: empty carrier");
  Carrier c(m, CarrierKind::PointSet);
  c.points_ = std::move(points);
  return c;
}

Carrier Carrier::torus_circle(const Manifold &torus, const Vec2 &center, double radius, int n) {
  require_torus2(torus, "torus_circle");
  require_samples(n, "torus_circle");
  if (!(radius > 0.0) || radius >= 0.5 * torus.periods().minCoeff())
    throw Error(ErrorCode::InvalidArgument, "torus_circle: radius must lie in (0, min period / 2)");
  Carrier c(torus, CarrierKind::TorusCircle);
  c.center_ = center;
  c.radius_ = radius;
  for (int k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    c.points_.push_back(torus.point(center.x() + radius * std::cos(th), center.y() + radius * std::sin(th)));
  }
  return c;
}

Carrier Carrier::torus_loop(const Manifold &torus, double y0, int n) {
  require_torus2(torus, "torus_loop");
  require_samples(n, "torus_loop");
  Carrier c(torus, CarrierKind::TorusLoop);
  for (int k = 0; k < n; ++k) c.points_.push_back(torus.point(torus.periods().x() * k / n, y0));
  return c;
}

Carrier Carrier::cylinder_graph(const Manifold &cylinder, std::vector<double> heights) {
  if (cylinder.kind() != ManifoldKind::Cylinder)
    throw Error(ErrorCode::InvalidArgument, "cylinder_graph requires a cylinder");
  const int n = static_cast<int>(heights.size());
  require_samples(n, "cylinder_graph");
  Carrier c(cylinder, CarrierKind::CylinderGraph);
  for (int k = 0; k < n; ++k) c.points_.push_back(cylinder.point(cylinder.circumference() * k / n, heights[k]));
  c.heights_ = std::move(heights);
  return c;
}

Carrier Carrier::torus_grid(const Manifold &torus, const PeriodicGrid &grid) {
  require_torus2(torus, "torus_grid");
  if (grid.lx != torus.periods().x() || grid.ly != torus.periods().y())
    throw Error(ErrorCode::ResolutionMismatch, "torus_grid: grid and torus periods differ");
  Carrier c(torus, CarrierKind::TorusGrid);
  c.grid_ = grid;
  for (int k = 0; k < grid.size(); ++k) {
    const Vec2 p = grid.node(k);
    c.points_.push_back(torus.point(p.x(), p.y()));
  }
  return c;
}

int Carrier::dim() const {
  switch (kind_) {
    case CarrierKind::PointSet: return 0;
    case CarrierKind::TorusGrid: return 2;
    default: return 1;
  }
}

Vec3 Carrier::unit_tangent(int k) const {
  switch (kind_) {
    case CarrierKind::TorusCircle: {
      const double th = kTwoPi * k / size();
      return {-std::sin(th), std::cos(th), 0.0};
    }
    case CarrierKind::TorusLoop: return {1.0, 0.0, 0.0};
    case CarrierKind::CylinderGraph: {
      const int n = size();
      const double h = manifold_.circumference() / n;
      const double slope = (heights_[(k + 1) % n] - heights_[(k + n - 1) % n]) / (2.0 * h);
      return Vec3(1.0, slope, 0.0).normalized();
    }
    default: throw Error(ErrorCode::InvalidArgument, "unit_tangent: carrier is not a curve");
  }
}

Vec3 Carrier::unit_normal(int k) const {
  if (codim() != 1) throw Error(ErrorCode::InvalidArgument, "unit_normal: carrier is not a hypersurface");
  const Vec3 t = unit_tangent(k);
  return {-t.y(), t.x(), 0.0};
}

double Carrier::segment_length(int k) const {
  if (dim() != 1) throw Error(ErrorCode::InvalidArgument, "segment_length: carrier is not a curve");
  return manifold_.dist(points_[k], points_[(k + 1) % size()]);
}

double Carrier::total_length() const {
  double s = 0.0;
  for (int k = 0; k < size(); ++k) s += segment_length(k);
  return s;
}

std::vector<Vec3> Carrier::tangential_gradient(const std::vector<double> &f) const {
  if (static_cast<int>(f.size()) != size())
    throw Error(ErrorCode::InvalidArgument, "tangential_gradient: value count differs from carrier size");
  const int n = size();
  std::vector<Vec3> out(n, Vec3::Zero());
  switch (dim()) {
    case 0: break;
    case 1:
      for (int k = 0; k < n; ++k) {
        const int prev = (k + n - 1) % n;
        const double ds = segment_length(prev) + segment_length(k);
        out[k] = (f[(k + 1) % n] - f[prev]) / ds * unit_tangent(k);
      }
      break;
    case 2: {
      const double hx = grid_.lx / grid_.nx;
      const double hy = grid_.ly / grid_.ny;
      for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i) {
          const int ip = (i + 1) % grid_.nx, im = (i + grid_.nx - 1) % grid_.nx;
          const int jp = (j + 1) % grid_.ny, jm = (j + grid_.ny - 1) % grid_.ny;
          out[grid_.index(i, j)] = {(f[grid_.index(ip, j)] - f[grid_.index(im, j)]) / (2.0 * hx),
                                    (f[grid_.index(i, jp)] - f[grid_.index(i, jm)]) / (2.0 * hy), 0.0};
        }
      break;
    }
  }
  return out;
}

bool operator==(const Carrier &a, const Carrier &b) {
  if (!(a.manifold_ == b.manifold_) || a.kind_ != b.kind_ || a.size() != b.size()) return false;
  for (int k = 0; k < a.size(); ++k)
    if (a.points_[k].coords != b.points_[k].coords) return false;
  return true;
}

TangentNormal tangential_normal_split(const Carrier &S, int k, const Vec3 &v) {
  if (k < 0 || k >= S.size()) throw Error(ErrorCode::InvalidArgument, "tangential_normal_split: bad index");
  switch (S.dim()) {
    case 0: return {Vec3::Zero(), v};
    case 2:
      if (S.codim() == 0) return {v, Vec3::Zero()};
      break;
    default: break;
  }
  const Vec3 t = S.unit_tangent(k);
  const Vec3 vt = v.dot(t) * t;
  return {vt, v - vt};
}

}  // namespace wpt
