#include "heisliou/hgroup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace heis {

namespace {

void require_same_dims(const HeisDims& a, const HeisDims& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": Heisenberg dimension mismatch");
}

void require_nonzero(const HeisPoint& x, const char* what) {
  for (double c : x.coords())
    if (c != 0.0) return;
  throw std::domain_error(std::string(what) + ": undefined at the origin");
}

// Jacobian of the coefficient vector sigma^j. Only the vertical row depends
// on x and it does so linearly, so D sigma^j is constant: a single entry
// (2d, j+d) = 2 for j < d, or (2d, j-d) = -2 for j >= d.
struct FrameJacobianEntry {
  std::size_t col;
  double value;
};

FrameJacobianEntry frame_jacobian(const HeisDims& dims, std::size_t j) {
  const auto d = static_cast<std::size_t>(dims.d());
  return j < d ? FrameJacobianEntry{j + d, 2.0} : FrameJacobianEntry{j - d, -2.0};
}

}  // namespace

// ----- types -----

HeisDims::HeisDims(int d, int max_d) : d_(d) {
  if (d < 1) throw std::invalid_argument("HeisDims: d must be >= 1");
  if (d > max_d)
    throw std::invalid_argument("HeisDims: d = " + std::to_string(d) + " exceeds cap " +
                                std::to_string(max_d));
}

HeisPoint::HeisPoint(HeisDims dims, Vector coords) : dims_(dims), coords_(std::move(coords)) {
  if (coords_.size() != dims_.n())
    throw std::invalid_argument("HeisPoint: expected " + std::to_string(dims_.n()) +
                                " coordinates, got " + std::to_string(coords_.size()));
  if (!all_finite(coords_)) throw std::invalid_argument("HeisPoint: non-finite coordinate");
}

HeisPoint HeisPoint::zero(HeisDims dims) { return HeisPoint(dims, Vector(dims.n(), 0.0)); }

HeisPoint HeisPoint::operator-() const {
  Vector c(coords_);
  for (double& v : c) v = -v;
  return HeisPoint(dims_, std::move(c));
}

HorizontalVector::HorizontalVector(Vector entries) : v_(std::move(entries)) {
  if (!all_finite(v_)) throw std::invalid_argument("HorizontalVector: non-finite entry");
}

FrameMatrix::FrameMatrix(const HeisPoint& x) : sigma_(x.dims().n(), x.dims().m()) {
  const auto d = static_cast<std::size_t>(x.dims().d());
  const std::size_t t = 2 * d;
  for (std::size_t j = 0; j < 2 * d; ++j) sigma_(j, j) = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    sigma_(t, i) = 2.0 * x[i + d];
    sigma_(t, i + d) = -2.0 * x[i];
  }
}

// ----- group structure -----

HeisPoint group_mul(const HeisPoint& x, const HeisPoint& y) {
  require_same_dims(x.dims(), y.dims(), "group_mul");
  const auto d = static_cast<std::size_t>(x.dims().d());
  Vector z(x.dims().n());
  for (std::size_t i = 0; i < 2 * d; ++i) z[i] = x[i] + y[i];
  double symp = 0.0;
  for (std::size_t i = 0; i < d; ++i) symp += x[i] * y[i + d] - x[i + d] * y[i];
  z[2 * d] = x[2 * d] + y[2 * d] + 2.0 * symp;
  return HeisPoint(x.dims(), std::move(z));
}

HeisPoint dilate(double lam, const HeisPoint& x) {
  if (!(lam > 0.0) || !std::isfinite(lam)) throw std::invalid_argument("dilate: lambda must be positive");
  Vector z(x.coords().begin(), x.coords().end());
  for (std::size_t i = 0; i + 1 < z.size(); ++i) z[i] *= lam;
  z.back() *= lam * lam;
  return HeisPoint(x.dims(), std::move(z));
}

double horizontal_norm_squared(const HeisPoint& x) { return norm_squared(x.horizontal()); }

double hnorm(const HeisPoint& x) {
  const double s = horizontal_norm_squared(x);
  const double t = x.vertical();
  // sqrt(sqrt(.)) keeps full relative precision; hypot avoids overflow of s^2.
  return std::sqrt(std::hypot(s, t));
}

double characteristic_ratio(const HeisPoint& x) {
  const double r = hnorm(x);
  return r == 0.0 ? 0.0 : norm(x.horizontal()) / r;
}

HorizontalVector eta(const HeisPoint& x) {
  const auto d = static_cast<std::size_t>(x.dims().d());
  const double s = horizontal_norm_squared(x);
  const double t = x.vertical();
  Vector e(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    e[i] = x[i] * s + x[i + d] * t;
    e[i + d] = x[i + d] * s - x[i] * t;
  }
  return HorizontalVector(std::move(e));
}

FrameMatrix frame(const HeisPoint& x) { return FrameMatrix(x); }

// ----- horizontal calculus -----

HorizontalVector h_gradient(std::span<const double> du, const HeisPoint& x) {
  if (du.size() != x.dims().n()) throw std::invalid_argument("h_gradient: gradient length mismatch");
  if (!all_finite(du)) throw std::invalid_argument("h_gradient: non-finite gradient");
  return HorizontalVector(frame(x).matrix().transpose() * du);
}

Matrix h_second_derivatives(std::span<const double> du, const SymMatrix& d2u, const HeisPoint& x) {
  const HeisDims& dims = x.dims();
  if (du.size() != dims.n() || d2u.size() != dims.n())
    throw std::invalid_argument("h_hessian: derivative dimension mismatch");
  const FrameMatrix sigma = frame(x);
  const SymMatrix core = congruence(sigma.matrix(), d2u);
  const std::size_t m = dims.m();
  const std::size_t t = dims.n() - 1;
  Matrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      // (D sigma^j sigma^i) . Du has only a vertical component.
      const FrameJacobianEntry jac = frame_jacobian(dims, j);
      const double drift = jac.value * sigma(jac.col, i) * du[t];
      out(i, j) = core(i, j) + drift;
    }
  return out;
}

SymMatrix h_hessian(std::span<const double> du, const SymMatrix& d2u, const HeisPoint& x) {
  const Matrix raw = h_second_derivatives(du, d2u, x);
  const std::size_t m = raw.rows();
  SymMatrix out(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) out.set(i, j, 0.5 * (raw(i, j) + raw(j, i)));
  return out;
}

HorizontalVector radial_h_gradient(double fp, const HeisPoint& x) {
  require_nonzero(x, "radial_h_gradient");
  const double r = hnorm(x);
  const HorizontalVector e = eta(x);
  Vector g(e.entries().begin(), e.entries().end());
  const double scale = fp / (r * r * r);
  for (double& v : g) v *= scale;
  return HorizontalVector(std::move(g));
}

Vector RadialSpectrum::sorted(std::size_t m) const {
  Vector e;
  e.reserve(m);
  e.push_back(radial);
  e.push_back(twisted);
  for (int k = 0; k < tangential_multiplicity; ++k) e.push_back(tangential);
  std::sort(e.begin(), e.end());
  return e;
}

std::pair<SymMatrix, RadialSpectrum> radial_h_hessian(double fp, double fpp, const HeisPoint& x) {
  require_nonzero(x, "radial_h_hessian");
  const auto d = static_cast<std::size_t>(x.dims().d());
  const std::size_t m = 2 * d;
  const double r = hnorm(x);
  const double r3 = r * r * r;
  const HorizontalVector grad = radial_h_gradient(1.0, x);
  const double g2 = grad.norm() * grad.norm();

  SymMatrix h = outer(grad.entries());
  h *= fpp - 3.0 * fp / r;
  const double diag = fp * g2 / r;
  const double twist = 2.0 * fp / r3;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double b = x[i] * x[j] + x[d + i] * x[d + j];
      const double c = x[i] * x[d + j] - x[j] * x[d + i];
      // [[B, C], [-C, B]]; only the upper triangle is written.
      if (j >= i) {
        h.set(i, j, h(i, j) + twist * b);
        h.set(d + i, d + j, h(d + i, d + j) + twist * b);
      }
      h.set(i, d + j, h(i, d + j) + twist * c);
    }
  for (std::size_t i = 0; i < m; ++i) h.set(i, i, h(i, i) + diag);

  RadialSpectrum spec{fpp * g2, 3.0 * fp * g2 / r, fp * g2 / r, static_cast<int>(m) - 2};
  return {h, spec};
}

Vector euclid_grad_rho(const HeisPoint& x) {
  require_nonzero(x, "euclid_grad_rho");
  const std::size_t t = x.dims().n() - 1;
  const double s = horizontal_norm_squared(x);
  const double r = hnorm(x);
  const double denom = 2.0 * r * r * r;
  Vector g(x.dims().n());
  for (std::size_t i = 0; i < t; ++i) g[i] = 2.0 * s * x[i] / denom;
  g[t] = x[t] / denom;
  return g;
}

SymMatrix euclid_hessian_rho(const HeisPoint& x) {
  require_nonzero(x, "euclid_hessian_rho");
  // rho = N^{1/4}, N = |x_H|^4 + t^2:  D2 rho = D2N / (4 rho^3) - 3 Drho Drho^T / rho.
  const std::size_t n = x.dims().n();
  const std::size_t t = n - 1;
  const double s = horizontal_norm_squared(x);
  const double r = hnorm(x);
  const Vector g = euclid_grad_rho(x);
  const double inv4r3 = 1.0 / (4.0 * r * r * r);
  SymMatrix h(n);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = i; j < t; ++j) {
      const double d2n = (i == j ? 4.0 * s : 0.0) + 8.0 * x[i] * x[j];
      h.set(i, j, d2n * inv4r3);
    }
  h.set(t, t, 2.0 * inv4r3);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) h.set(i, j, h(i, j) - 3.0 * g[i] * g[j] / r);
  return h;
}

}  // namespace heis
