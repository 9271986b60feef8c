#include "wpt/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace wpt {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW plans plus aligned work buffers for one grid shape. Execution through
// the plan's own buffers is not reentrant, so each thread keeps its own set.
class FftPlans {
 public:
  FftPlans(int nx, int ny) : nx_(nx), ny_(ny), nh_(nx / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<size_t>(nx) * ny);
    spec_ = fftw_alloc_complex(static_cast<size_t>(nh_) * ny);
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_2d(ny, nx, real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(ny, nx, spec_, real_, FFTW_ESTIMATE);
  }
  FftPlans(const FftPlans &) = delete;
  FftPlans &operator=(const FftPlans &) = delete;
  ~FftPlans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  // Unnormalized forward transform into a half spectrum of size ny * (nx/2+1).
  std::vector<cplx> forward(std::span<const double> f) {
    std::copy(f.begin(), f.end(), real_);
    fftw_execute(forward_);
    std::vector<cplx> out(static_cast<size_t>(nh_) * ny_);
    for (size_t k = 0; k < out.size(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
    return out;
  }

  // Inverse transform, normalized so that inverse(forward(f)) == f.
  std::vector<double> inverse(const std::vector<cplx> &s) {
    for (size_t k = 0; k < s.size(); ++k) {
      spec_[k][0] = s[k].real();
      spec_[k][1] = s[k].imag();
    }
    fftw_execute(backward_);
    const double scale = 1.0 / (static_cast<double>(nx_) * ny_);
    std::vector<double> out(static_cast<size_t>(nx_) * ny_);
    for (size_t k = 0; k < out.size(); ++k) out[k] = real_[k] * scale;
    return out;
  }

 private:
  int nx_, ny_, nh_;
  double *real_ = nullptr;
  fftw_complex *spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

FftPlans &plans_for(const PeriodicGrid &g) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FftPlans>> cache;
  auto &slot = cache[{g.nx, g.ny}];
  if (!slot) slot = std::make_unique<FftPlans>(g.nx, g.ny);
  return *slot;
}

// Wavenumbers used for differentiation (Nyquist entries zeroed).
struct Wavenumbers {
  std::vector<double> kx, ky;
  std::vector<bool> nyq_x, nyq_y;
};

Wavenumbers wavenumbers(const PeriodicGrid &g) {
  Wavenumbers w;
  const int nh = g.nx / 2 + 1;
  w.kx.resize(nh);
  w.nyq_x.resize(nh);
  for (int i = 0; i < nh; ++i) {
    w.nyq_x[i] = (g.nx % 2 == 0 && i == g.nx / 2);
    w.kx[i] = w.nyq_x[i] ? 0.0 : kTwoPi * i / g.lx;
  }
  w.ky.resize(g.ny);
  w.nyq_y.resize(g.ny);
  for (int j = 0; j < g.ny; ++j) {
    const int jj = j <= g.ny / 2 ? j : j - g.ny;
    w.nyq_y[j] = (g.ny % 2 == 0 && j == g.ny / 2);
    w.ky[j] = w.nyq_y[j] ? 0.0 : kTwoPi * jj / g.ly;
  }
  return w;
}

template <class Mult>
GridField spectral_apply(const GridField &f, Mult &&mult) {
  auto &fft = plans_for(f.grid);
  auto s = fft.forward(f.v);
  const auto w = wavenumbers(f.grid);
  const int nh = f.grid.nx / 2 + 1;
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < nh; ++i) {
      auto &c = s[static_cast<size_t>(j) * nh + i];
      c *= mult(i, j, w);
    }
  GridField out(f.grid);
  out.v = fft.inverse(s);
  return out;
}

const cplx kI(0.0, 1.0);

}  // namespace

void require_same_grid(const PeriodicGrid &a, const PeriodicGrid &b, const char *op) {
  if (!(a == b)) throw Error(ErrorCode::ResolutionMismatch, std::string(op) + ": grid resolutions differ");
}

GridField operator+(const GridField &a, const GridField &b) {
  require_same_grid(a.grid, b.grid, "operator+");
  GridField out(a.grid);
  for (int k = 0; k < a.grid.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

GridField operator-(const GridField &a, const GridField &b) {
  require_same_grid(a.grid, b.grid, "operator-");
  GridField out(a.grid);
  for (int k = 0; k < a.grid.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

GridField operator*(double s, const GridField &a) {
  GridField out(a.grid);
  for (int k = 0; k < a.grid.size(); ++k) out[k] = s * a[k];
  return out;
}

GridVectorField operator+(const GridVectorField &a, const GridVectorField &b) {
  require_same_grid(a.grid, b.grid, "operator+");
  GridVectorField out(a.grid);
  for (int k = 0; k < a.grid.size(); ++k) {
    out.x[k] = a.x[k] + b.x[k];
    out.y[k] = a.y[k] + b.y[k];
  }
  return out;
}

GridVectorField operator-(const GridVectorField &a, const GridVectorField &b) {
  require_same_grid(a.grid, b.grid, "operator-");
  GridVectorField out(a.grid);
  for (int k = 0; k < a.grid.size(); ++k) {
    out.x[k] = a.x[k] - b.x[k];
    out.y[k] = a.y[k] - b.y[k];
  }
  return out;
}

GridVectorField operator*(double s, const GridVectorField &a) {
  GridVectorField out(a.grid);
  for (int k = 0; k < a.grid.size(); ++k) {
    out.x[k] = s * a.x[k];
    out.y[k] = s * a.y[k];
  }
  return out;
}

GridVectorField scale(const GridField &w, const GridVectorField &a) {
  require_same_grid(w.grid, a.grid, "scale");
  GridVectorField out(a.grid);
  for (int k = 0; k < a.grid.size(); ++k) {
    out.x[k] = w[k] * a.x[k];
    out.y[k] = w[k] * a.y[k];
  }
  return out;
}

double integrate(const GridField &f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s * f.grid.cell_area();
}

double mean(const GridField &f) { return integrate(f) / f.grid.area(); }

double weighted_inner(const GridField &w, const GridVectorField &a, const GridVectorField &b) {
  require_same_grid(w.grid, a.grid, "weighted_inner");
  require_same_grid(a.grid, b.grid, "weighted_inner");
  double s = 0.0;
  for (int k = 0; k < w.grid.size(); ++k) s += w[k] * (a.x[k] * b.x[k] + a.y[k] * b.y[k]);
  return s * w.grid.cell_area();
}

double weighted_inner(const GridField &w, const GridField &a, const GridField &b) {
  require_same_grid(w.grid, a.grid, "weighted_inner");
  require_same_grid(a.grid, b.grid, "weighted_inner");
  double s = 0.0;
  for (int k = 0; k < w.grid.size(); ++k) s += w[k] * a[k] * b[k];
  return s * w.grid.cell_area();
}

double weighted_norm(const GridField &w, const GridVectorField &a) {
  return std::sqrt(std::max(0.0, weighted_inner(w, a, a)));
}

double max_abs(const GridField &f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(const GridField &f) {
  double s = 0.0;
  for (double x : f.v) s += x * x;
  return std::sqrt(s * f.grid.cell_area());
}

GridField mean_centered(GridField f) {
  const double m = mean(f);
  for (double &x : f.v) x -= m;
  return f;
}

// Derivative multiplier, zero on the Nyquist row and column so that every
// derivative maps into the resolved subspace.
template <class F>
auto resolved(F &&f) {
  return [f](int i, int j, const Wavenumbers &w) -> cplx {
    if (w.nyq_x[i] || w.nyq_y[j]) return 0.0;
    return f(i, j, w);
  };
}

GridVectorField gradient(const GridField &f) {
  GridVectorField out(f.grid);
  out.x = spectral_apply(f, resolved([](int i, int, const Wavenumbers &w) { return kI * w.kx[i]; })).v;
  out.y = spectral_apply(f, resolved([](int, int j, const Wavenumbers &w) { return kI * w.ky[j]; })).v;
  return out;
}

GridField divergence(const GridVectorField &V) {
  GridField fx(V.grid), fy(V.grid);
  fx.v = V.x;
  fy.v = V.y;
  return spectral_apply(fx, resolved([](int i, int, const Wavenumbers &w) { return kI * w.kx[i]; })) +
         spectral_apply(fy, resolved([](int, int j, const Wavenumbers &w) { return kI * w.ky[j]; }));
}

GridHessian hessian(const GridField &f) {
  return {
      spectral_apply(f, resolved([](int i, int, const Wavenumbers &w) { return cplx(-w.kx[i] * w.kx[i]); })),
      spectral_apply(f, resolved([](int i, int j, const Wavenumbers &w) { return cplx(-w.kx[i] * w.ky[j]); })),
      spectral_apply(f, resolved([](int, int j, const Wavenumbers &w) { return cplx(-w.ky[j] * w.ky[j]); })),
  };
}

GridField laplacian(const GridField &f) {
  return spectral_apply(f, resolved([](int i, int j, const Wavenumbers &w) {
    return cplx(-(w.kx[i] * w.kx[i] + w.ky[j] * w.ky[j]));
  }));
}

GridField inverse_laplacian(const GridField &f) {
  return spectral_apply(f, [](int i, int j, const Wavenumbers &w) {
    if (w.nyq_x[i] || w.nyq_y[j]) return cplx(0.0);
    const double k2 = w.kx[i] * w.kx[i] + w.ky[j] * w.ky[j];
    return k2 == 0.0 ? cplx(0.0) : cplx(-1.0 / k2);
  });
}

GridField project_resolved(const GridField &f) {
  return spectral_apply(f, [](int i, int j, const Wavenumbers &w) {
    if (w.nyq_x[i] || w.nyq_y[j] || (i == 0 && j == 0)) return cplx(0.0);
    return cplx(1.0);
  });
}

GridField grid_hessian_quadratic(const GridField &f, const GridVectorField &X, const GridVectorField &Y) {
  require_same_grid(f.grid, X.grid, "grid_hessian_quadratic");
  require_same_grid(f.grid, Y.grid, "grid_hessian_quadratic");
  const GridHessian H = hessian(f);
  GridField out(f.grid);
  for (int k = 0; k < f.grid.size(); ++k) {
    out[k] = H.xx[k] * X.x[k] * Y.x[k] + H.xy[k] * (X.x[k] * Y.y[k] + X.y[k] * Y.x[k]) +
             H.yy[k] * X.y[k] * Y.y[k];
  }
  return out;
}

// --- SpectralInterpolant ----------------------------------------------------

SpectralInterpolant::SpectralInterpolant(const GridField &f) : grid_(f.grid) {
  const PeriodicGrid &g = f.grid;
  auto s = plans_for(g).forward(f.v);
  const int nh = g.nx / 2 + 1;
  const double norm = 1.0 / (static_cast<double>(g.nx) * g.ny);
  kx_.resize(nh);
  ky_.resize(g.ny);
  for (int i = 0; i < nh; ++i) kx_[i] = kTwoPi * i / g.lx;
  for (int j = 0; j < g.ny; ++j) ky_[j] = kTwoPi * (j <= g.ny / 2 ? j : j - g.ny) / g.ly;

  coeff_.resize(s.size());
  double cmax = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < nh; ++i) {
      const bool self_conj = (i == 0) || (g.nx % 2 == 0 && i == g.nx / 2);
      const double w = self_conj ? 1.0 : 2.0;
      auto &c = coeff_[static_cast<size_t>(j) * nh + i];
      c = w * norm * s[static_cast<size_t>(j) * nh + i];
      cmax = std::max(cmax, std::abs(c));
    }

  const double cut = 1e-15 * cmax;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < nh; ++i) {
      const auto c = coeff_[static_cast<size_t>(j) * nh + i];
      if (std::abs(c) > cut) {
        modes_.push_back({kx_[i], ky_[j], c, g.nx % 2 == 0 && i == g.nx / 2, g.ny % 2 == 0 && j == g.ny / 2});
      }
    }
  sparse_ = modes_.size() * 16 <= static_cast<size_t>(g.size());
  if (!sparse_) modes_.clear();
}

template <int Dx, int Dy>
double SpectralInterpolant::eval(const Vec2 &p) const {
  auto basis = [](double k, double x, bool nyquist) -> cplx {
    if (nyquist) return {std::cos(k * x), 0.0};
    return {std::cos(k * x), std::sin(k * x)};
  };
  auto factor = [](double k, bool nyquist, int order) -> cplx {
    if (order == 0) return 1.0;
    if (nyquist) return 0.0;
    cplx f = 1.0;
    for (int d = 0; d < order; ++d) f *= kI * k;
    return f;
  };

  if (sparse_) {
    double s = 0.0;
    for (const auto &m : modes_) {
      if (Dx + Dy > 0 && (m.nyq_x || m.nyq_y)) continue;
      const cplx fac = factor(m.kx, m.nyq_x, Dx) * factor(m.ky, m.nyq_y, Dy);
      if (fac == cplx(0.0)) continue;
      s += (m.c * fac * basis(m.kx, p.x(), m.nyq_x) * basis(m.ky, p.y(), m.nyq_y)).real();
    }
    return s;
  }

  const int nh = grid_.nx / 2 + 1;
  std::vector<cplx> bx(nh);
  for (int i = 0; i < nh; ++i) {
    const bool nyq = grid_.nx % 2 == 0 && i == grid_.nx / 2;
    bx[i] = (Dx + Dy > 0 && nyq) ? cplx(0.0) : factor(kx_[i], nyq, Dx) * basis(kx_[i], p.x(), nyq);
  }
  cplx total = 0.0;
  for (int j = 0; j < grid_.ny; ++j) {
    const bool nyq = grid_.ny % 2 == 0 && j == grid_.ny / 2;
    if (Dx + Dy > 0 && nyq) continue;
    const cplx by = factor(ky_[j], nyq, Dy) * basis(ky_[j], p.y(), nyq);
    if (by == cplx(0.0)) continue;
    const cplx *row = &coeff_[static_cast<size_t>(j) * nh];
    cplx s = 0.0;
    for (int i = 0; i < nh; ++i) s += row[i] * bx[i];
    total += s * by;
  }
  return total.real();
}

double SpectralInterpolant::value(const Vec2 &p) const { return eval<0, 0>(p); }

Vec2 SpectralInterpolant::gradient(const Vec2 &p) const { return {eval<1, 0>(p), eval<0, 1>(p)}; }

Eigen::Vector3d SpectralInterpolant::hessian(const Vec2 &p) const {
  return {eval<2, 0>(p), eval<1, 1>(p), eval<0, 2>(p)};
}

std::vector<double> SpectralInterpolant::values(std::span<const Vec2> pts) const {
  std::vector<double> out(pts.size());
  const long n = static_cast<long>(pts.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) out[k] = eval<0, 0>(pts[k]);
  return out;
}

void SpectralInterpolant::gradients(std::span<const Vec2> pts, std::vector<double> &gx,
                                    std::vector<double> &gy) const {
  gx.assign(pts.size(), 0.0);
  gy.assign(pts.size(), 0.0);
  const long n = static_cast<long>(pts.size());
  if (sparse_) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
      gx[k] = eval<1, 0>(pts[k]);
      gy[k] = eval<0, 1>(pts[k]);
    }
    return;
  }
  // Shared basis evaluation for both components.
  const int nh = grid_.nx / 2 + 1;
  const bool even_x = grid_.nx % 2 == 0;
  const bool even_y = grid_.ny % 2 == 0;
#pragma omp parallel
  {
    std::vector<cplx> bx(nh), dbx(nh);
#pragma omp for schedule(static)
    for (long k = 0; k < n; ++k) {
      const Vec2 &p = pts[k];
      for (int i = 0; i < nh; ++i) {
        const bool nyq = even_x && i == grid_.nx / 2;
        bx[i] = nyq ? cplx(0.0) : std::polar(1.0, kx_[i] * p.x());
        dbx[i] = kI * kx_[i] * bx[i];
      }
      cplx sx = 0.0, sy = 0.0;
      for (int j = 0; j < grid_.ny; ++j) {
        const cplx *row = &coeff_[static_cast<size_t>(j) * nh];
        cplx plain = 0.0, dx = 0.0;
        for (int i = 0; i < nh; ++i) {
          plain += row[i] * bx[i];
          dx += row[i] * dbx[i];
        }
        if (even_y && j == grid_.ny / 2) continue;
        const cplx by = std::polar(1.0, ky_[j] * p.y());
        sx += dx * by;
        sy += plain * kI * ky_[j] * by;
      }
      gx[k] = sx.real();
      gy[k] = sy.real();
    }
  }
}


std::vector<SpectralInterpolant::Jet> SpectralInterpolant::jets(std::span<const Vec2> pts) const {
  std::vector<Jet> out(pts.size());
  const long n = static_cast<long>(pts.size());
  if (sparse_) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
      out[k].value = eval<0, 0>(pts[k]);
      out[k].grad = gradient(pts[k]);
      out[k].hess = hessian(pts[k]);
    }
    return out;
  }
  const int nh = grid_.nx / 2 + 1;
  const bool even_x = grid_.nx % 2 == 0;
  const bool even_y = grid_.ny % 2 == 0;
#pragma omp parallel
  {
    std::vector<cplx> b0(nh), bd(nh), b1(nh), b2(nh);
#pragma omp for schedule(static)
    for (long k = 0; k < n; ++k) {
      const Vec2 &p = pts[k];
      for (int i = 0; i < nh; ++i) {
        const bool nyq = even_x && i == grid_.nx / 2;
        b0[i] = nyq ? cplx(std::cos(kx_[i] * p.x()), 0.0) : std::polar(1.0, kx_[i] * p.x());
        bd[i] = nyq ? cplx(0.0) : b0[i];
        b1[i] = kI * kx_[i] * bd[i];
        b2[i] = -kx_[i] * kx_[i] * bd[i];
      }
      cplx v = 0.0, gx = 0.0, gy = 0.0, hxx = 0.0, hxy = 0.0, hyy = 0.0;
      for (int j = 0; j < grid_.ny; ++j) {
        const cplx *row = &coeff_[static_cast<size_t>(j) * nh];
        cplx s0 = 0.0, sd = 0.0, s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < nh; ++i) {
          s0 += row[i] * b0[i];
          sd += row[i] * bd[i];
          s1 += row[i] * b1[i];
          s2 += row[i] * b2[i];
        }
        const bool nyq = even_y && j == grid_.ny / 2;
        const cplx by = nyq ? cplx(std::cos(ky_[j] * p.y()), 0.0) : std::polar(1.0, ky_[j] * p.y());
        v += s0 * by;
        if (!nyq) {
          const cplx dy = kI * ky_[j] * by;
          gx += s1 * by;
          hxx += s2 * by;
          gy += sd * dy;
          hxy += s1 * dy;
          hyy += -ky_[j] * ky_[j] * sd * by;
        }
      }
      out[k] = {v.real(), {gx.real(), gy.real()}, {hxx.real(), hxy.real(), hyy.real()}};
    }
  }
  return out;
}

}  // namespace wpt
