#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wpt/manifold.hpp"

namespace wpt {

/// Uniform periodic grid on the flat 2-torus [0,lx) x [0,ly). Nodes are
/// stored row-major with x fastest: index = j * nx + i.
struct PeriodicGrid {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;

  [[nodiscard]] int size() const { return nx * ny; }
  [[nodiscard]] int index(int i, int j) const { return j * nx + i; }
  [[nodiscard]] double x(int i) const { return lx * i / nx; }
  [[nodiscard]] double y(int j) const { return ly * j / ny; }
  [[nodiscard]] Vec2 node(int idx) const { return {x(idx % nx), y(idx / nx)}; }
  [[nodiscard]] double cell_area() const { return lx * ly / (static_cast<double>(nx) * ny); }
  [[nodiscard]] double area() const { return lx * ly; }

  friend bool operator==(const PeriodicGrid &, const PeriodicGrid &) = default;
};

struct GridField {
  PeriodicGrid grid;
  std::vector<double> v;

  GridField() = default;
  explicit GridField(const PeriodicGrid &g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

  double &operator[](int k) { return v[k]; }
  double operator[](int k) const { return v[k]; }
};

struct GridVectorField {
  PeriodicGrid grid;
  std::vector<double> x;
  std::vector<double> y;

  GridVectorField() = default;
  explicit GridVectorField(const PeriodicGrid &g) : grid(g), x(g.size(), 0.0), y(g.size(), 0.0) {}
};

/// Second partials of a grid field.
struct GridHessian {
  GridField xx, xy, yy;
};

void require_same_grid(const PeriodicGrid &a, const PeriodicGrid &b, const char *op);

// --- pointwise arithmetic ------------------------------------------------

GridField operator+(const GridField &a, const GridField &b);
GridField operator-(const GridField &a, const GridField &b);
GridField operator*(double s, const GridField &a);
GridVectorField operator+(const GridVectorField &a, const GridVectorField &b);
GridVectorField operator-(const GridVectorField &a, const GridVectorField &b);
GridVectorField operator*(double s, const GridVectorField &a);
/// Pointwise scaling of a vector field by a scalar field.
GridVectorField scale(const GridField &w, const GridVectorField &a);

template <class F>
GridField sample(const PeriodicGrid &g, F &&f) {
  GridField out(g);
  for (int k = 0; k < g.size(); ++k) {
    const Vec2 p = g.node(k);
    out[k] = f(p.x(), p.y());
  }
  return out;
}

// --- quadrature on the grid (rectangle rule, spectrally accurate) ---------

double integrate(const GridField &f);
double mean(const GridField &f);
/// Integral of w <a, b>.
double weighted_inner(const GridField &w, const GridVectorField &a, const GridVectorField &b);
double weighted_inner(const GridField &w, const GridField &a, const GridField &b);
double weighted_norm(const GridField &w, const GridVectorField &a);
double max_abs(const GridField &f);
double l2_norm(const GridField &f);
GridField mean_centered(GridField f);

// --- spectral calculus ---------------------------------------------------

/// Fourier derivatives. Every derivative annihilates the modes on the
/// Nyquist row and column, so gradient and divergence are exact negative
/// adjoints in the grid inner product and map into the resolved subspace.
GridVectorField gradient(const GridField &f);
GridField divergence(const GridVectorField &V);
GridHessian hessian(const GridField &f);
GridField laplacian(const GridField &f);
/// Solves Laplace(u) = f on mean-zero, Nyquist-free fields (f's mean and
/// Nyquist content are discarded).
GridField inverse_laplacian(const GridField &f);
/// Removes the mean and Nyquist modes.
GridField project_resolved(const GridField &f);

/// Pointwise Hess f(X, Y) computed spectrally. Throws ResolutionMismatch.
GridField grid_hessian_quadratic(const GridField &f, const GridVectorField &X,
                                 const GridVectorField &Y);

/// Trigonometric interpolant of a grid field, evaluable at arbitrary points
/// (coordinates need not be reduced modulo the periods). Exact at nodes and
/// for band-limited data. Sparse spectra are evaluated mode by mode, dense
/// ones by a separable sum.
class SpectralInterpolant {
 public:
  SpectralInterpolant() = default;
  explicit SpectralInterpolant(const GridField &f);

  [[nodiscard]] const PeriodicGrid &grid() const { return grid_; }
  [[nodiscard]] bool sparse() const { return sparse_; }

  [[nodiscard]] double value(const Vec2 &p) const;
  [[nodiscard]] Vec2 gradient(const Vec2 &p) const;
  /// Returns (f_xx, f_xy, f_yy).
  [[nodiscard]] Eigen::Vector3d hessian(const Vec2 &p) const;

  [[nodiscard]] std::vector<double> values(std::span<const Vec2> pts) const;
  void gradients(std::span<const Vec2> pts, std::vector<double> &gx, std::vector<double> &gy) const;

  struct Jet {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    Eigen::Vector3d hess = Eigen::Vector3d::Zero();  // (xx, xy, yy)
  };
  /// Value, gradient and Hessian at every point, sharing one basis evaluation.
  [[nodiscard]] std::vector<Jet> jets(std::span<const Vec2> pts) const;

 private:
  struct Mode {
    double kx, ky;
    std::complex<double> c;  // weighted coefficient
    bool nyq_x, nyq_y;
  };

  // Sum of Re(coefficient * derivative factor * basis) at p.
  template <int Dx, int Dy>
  [[nodiscard]] double eval(const Vec2 &p) const;

  PeriodicGrid grid_;
  bool sparse_ = false;
  std::vector<Mode> modes_;
  // Dense storage, row j (y wavenumber), column i in [0, nx/2].
  std::vector<std::complex<double>> coeff_;
  std::vector<double> kx_, ky_;
};

}  // namespace wpt
