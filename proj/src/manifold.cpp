#include "wpt/manifold.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace wpt {

namespace {

constexpr double kPi = std::numbers::pi;

double canonical_mod(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

// sin(x)/x with a series near zero.
double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
  return std::sin(x) / x;
}

}  // namespace

Manifold Manifold::flat_torus(int dim, Vec2 periods) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::InvalidArgument, "torus dimension must be 1 or 2");
  if (periods.x() <= 0.0 || (dim == 2 && periods.y() <= 0.0))
    throw Error(ErrorCode::InvalidArgument, "torus periods must be positive");
  if (dim == 1) periods.y() = 1.0;
  return Manifold(ManifoldKind::FlatTorus, dim, periods);
}

Manifold Manifold::sphere() { return Manifold(ManifoldKind::Sphere2, 2, Vec2(1.0, 1.0)); }

Manifold Manifold::cylinder(double circumference) {
  if (circumference <= 0.0) throw Error(ErrorCode::InvalidArgument, "cylinder circumference must be positive");
  return Manifold(ManifoldKind::Cylinder, 2, Vec2(circumference, 1.0));
}

double Manifold::injectivity_radius() const {
  switch (kind_) {
    case ManifoldKind::FlatTorus:
      return dim_ == 1 ? 0.5 * periods_.x() : 0.5 * periods_.minCoeff();
    case ManifoldKind::Sphere2: return kPi;
    case ManifoldKind::Cylinder: return 0.5 * periods_.x();
  }
  return 0.0;
}

double Manifold::conjugate_radius() const {
  return kind_ == ManifoldKind::Sphere2 ? kPi : std::numeric_limits<double>::infinity();
}

ManifoldPoint Manifold::point(const Vec3 &raw) const {
  switch (kind_) {
    case ManifoldKind::FlatTorus:
      return {Vec3(canonical_mod(raw.x(), periods_.x()),
                   dim_ == 2 ? canonical_mod(raw.y(), periods_.y()) : 0.0, 0.0)};
    case ManifoldKind::Sphere2: {
      const double n = raw.norm();
      if (n == 0.0) throw Error(ErrorCode::InvalidArgument, "sphere point must be nonzero");
      return {raw / n};
    }
    case ManifoldKind::Cylinder:
      return {Vec3(canonical_mod(raw.x(), periods_.x()), raw.y(), 0.0)};
  }
  return {};
}

ManifoldPoint Manifold::point(double a, double b) const { return point(Vec3(a, b, 0.0)); }

TangentVec Manifold::tangent(const ManifoldPoint &p, const Vec3 &raw) const {
  TangentVec t{p, raw};
  if (kind_ == ManifoldKind::Sphere2) {
    t.components -= p.coords.dot(raw) * p.coords;
  } else {
    t.components.z() = 0.0;
    if (dim_ == 1) t.components.y() = 0.0;
  }
  return t;
}

void Manifold::require_same_base(const TangentVec &a, const TangentVec &b, const char *op) const {
  if (dist(a.base, b.base) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, std::string(op) + ": tangent vectors have different base points");
}

double Manifold::wrap_displacement(double d, double period) const {
  return d - period * std::round(d / period);
}

ManifoldPoint Manifold::exp(const TangentVec &v) const {
  const Vec3 &p = v.base.coords;
  if (kind_ == ManifoldKind::Sphere2) {
    const double theta = v.norm();
    return point(std::cos(theta) * p + sinc(theta) * v.components);
  }
  return point(p + v.components);
}

TangentVec Manifold::log(const ManifoldPoint &p, const ManifoldPoint &q) const {
  if (kind_ == ManifoldKind::Sphere2) {
    const Vec3 &a = p.coords;
    const Vec3 &b = q.coords;
    const Vec3 perp = b - a.dot(b) * a;
    const double theta = std::atan2(a.cross(b).norm(), a.dot(b));
    if (theta > kPi - kCutLocusMargin) throw Error(ErrorCode::CutLocus, "antipodal points on the sphere");
    const double pn = perp.norm();
    if (pn == 0.0) return {p, Vec3::Zero()};
    return {p, (theta / pn) * perp};
  }
  Vec3 d = q.coords - p.coords;
  // Flat models: the cut locus is where some wrapped coordinate reaches half a period.
  const int wrapped = kind_ == ManifoldKind::Cylinder ? 1 : dim_;
  for (int k = 0; k < wrapped; ++k) {
    d[k] = wrap_displacement(d[k], periods_[k]);
    if (std::abs(d[k]) >= 0.5 * periods_[k] - kCutLocusMargin)
      throw Error(ErrorCode::CutLocus, "points are separated by half a period");
  }
  return {p, d};
}

double Manifold::dist(const ManifoldPoint &p, const ManifoldPoint &q) const {
  if (kind_ == ManifoldKind::Sphere2) {
    const Vec3 &a = p.coords;
    const Vec3 &b = q.coords;
    return std::atan2(a.cross(b).norm(), a.dot(b));
  }
  Vec3 d = q.coords - p.coords;
  const int wrapped = kind_ == ManifoldKind::Cylinder ? 1 : dim_;
  for (int k = 0; k < wrapped; ++k) d[k] = wrap_displacement(d[k], periods_[k]);
  return d.norm();
}

TangentVec Manifold::geodesic_velocity(const TangentVec &v) const {
  return transport_along_geodesic(v, v);
}

TangentVec Manifold::transport_along_geodesic(const TangentVec &v, const TangentVec &w) const {
  require_same_base(v, w, "transport_along_geodesic");
  const ManifoldPoint end = exp(v);
  if (kind_ != ManifoldKind::Sphere2) return {end, w.components};
  const double theta = v.norm();
  if (theta == 0.0) return {end, w.components};
  const Vec3 &p = v.base.coords;
  const Vec3 e = v.components / theta;
  const double a = w.components.dot(e);
  const Vec3 perp = w.components - a * e;
  const Vec3 e_end = -std::sin(theta) * p + std::cos(theta) * e;
  return {end, a * e_end + perp};
}

TangentVec Manifold::dexp(const TangentVec &v, const TangentVec &w) const {
  require_same_base(v, w, "dexp");
  const ManifoldPoint end = exp(v);
  if (kind_ != ManifoldKind::Sphere2) return {end, w.components};
  const double theta = v.norm();
  if (theta == 0.0) return {end, w.components};
  const Vec3 &p = v.base.coords;
  const Vec3 e = v.components / theta;
  const double a = w.components.dot(e);
  const Vec3 perp = w.components - a * e;
  const Vec3 e_end = -std::sin(theta) * p + std::cos(theta) * e;
  // Radial part is preserved (Gauss lemma); the Jacobi field J(0)=0, J'(0)=perp
  // has length sin(theta)/theta at time one on the unit sphere.
  return {end, a * e_end + sinc(theta) * perp};
}

TangentVec Manifold::dexp_inverse(const TangentVec &v, const TangentVec &u) const {
  const double theta = v.norm();
  if (theta >= conjugate_radius() - kCutLocusMargin)
    throw Error(ErrorCode::ConjugatePoint, "|v| reaches the conjugate radius");
  const ManifoldPoint end = exp(v);
  if (dist(u.base, end) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "dexp_inverse: u must be based at exp(v)");
  if (kind_ != ManifoldKind::Sphere2 || theta == 0.0) return {v.base, u.components};
  const Vec3 &p = v.base.coords;
  const Vec3 e = v.components / theta;
  const Vec3 e_end = -std::sin(theta) * p + std::cos(theta) * e;
  const double a = u.components.dot(e_end);
  const Vec3 perp = u.components - a * e_end;
  return {v.base, a * e + perp / sinc(theta)};
}

double Manifold::inner(const TangentVec &a, const TangentVec &b) const {
  return a.components.dot(b.components);
}

}  // namespace wpt
