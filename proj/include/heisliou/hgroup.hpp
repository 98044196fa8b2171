#pragma once

// Heisenberg group H^d realised on R^{2d+1}: group law, dilations, the
// homogeneous norm rho and the horizontal calculus generated by
//   X_i     = d_i     + 2 x_{i+d} d_{2d+1},
//   X_{i+d} = d_{i+d} - 2 x_i     d_{2d+1},   i = 1..d.
// Indices in code are zero-based: coordinate 2d is the vertical one.

#include <cstddef>
#include <span>
#include <utility>

#include "heisliou/linalg.hpp"

namespace heis {

class HeisDims {
 public:
  static constexpr int kDefaultMaxD = 16;

  explicit HeisDims(int d, int max_d = kDefaultMaxD);

  int d() const { return d_; }
  /// Topological dimension 2d+1.
  std::size_t n() const { return static_cast<std::size_t>(2 * d_ + 1); }
  /// Horizontal rank 2d.
  std::size_t m() const { return static_cast<std::size_t>(2 * d_); }
  /// Homogeneous dimension 2d+2.
  int Q() const { return 2 * d_ + 2; }

  friend bool operator==(const HeisDims&, const HeisDims&) = default;

 private:
  int d_;
};

class HeisPoint {
 public:
  HeisPoint(HeisDims dims, Vector coords);
  static HeisPoint zero(HeisDims dims);

  const HeisDims& dims() const { return dims_; }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  /// First 2d coordinates.
  std::span<const double> horizontal() const { return std::span(coords_).first(dims_.m()); }
  double vertical() const { return coords_.back(); }

  HeisPoint operator-() const;

 private:
  HeisDims dims_;
  Vector coords_;
};

/// Vector in the horizontal layer R^{2d}.
class HorizontalVector {
 public:
  explicit HorizontalVector(Vector entries);
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> entries() const { return v_; }
  double norm() const { return heis::norm(v_); }

 private:
  Vector v_;
};

/// sigma(x): (2d+1) x 2d, column j holds the coefficients of X_j.
class FrameMatrix {
 public:
  explicit FrameMatrix(const HeisPoint& x);
  const Matrix& matrix() const { return sigma_; }
  double operator()(std::size_t i, std::size_t j) const { return sigma_(i, j); }

 private:
  Matrix sigma_;
};

HeisPoint group_mul(const HeisPoint& x, const HeisPoint& y);
HeisPoint dilate(double lam, const HeisPoint& x);

double hnorm(const HeisPoint& x);
/// |x_H|^2
double horizontal_norm_squared(const HeisPoint& x);
/// |x_H| / rho, zero at the origin.
double characteristic_ratio(const HeisPoint& x);

HorizontalVector eta(const HeisPoint& x);
FrameMatrix frame(const HeisPoint& x);

/// sigma(x)^T Du
HorizontalVector h_gradient(std::span<const double> du, const HeisPoint& x);

/// Unsymmetrised horizontal second derivatives, entry (i,j) = X_i X_j u
///   = (sigma^T D2u sigma)_ij + (D sigma^j sigma^i) . Du.
Matrix h_second_derivatives(std::span<const double> du, const SymMatrix& d2u, const HeisPoint& x);

/// Symmetrised horizontal Hessian sigma^T D2u sigma + g(x, Du).
SymMatrix h_hessian(std::span<const double> du, const SymMatrix& d2u, const HeisPoint& x);

/// f'(rho) * eta / rho^3. Throws at the origin.
HorizontalVector radial_h_gradient(double fp, const HeisPoint& x);

struct RadialSpectrum {
  double radial;     // f'' |D_H rho|^2, simple
  double twisted;    // 3 f' |D_H rho|^2 / rho, simple
  double tangential; // f' |D_H rho|^2 / rho, multiplicity 2d-2
  int tangential_multiplicity;

  /// All 2d eigenvalues, ascending.
  Vector sorted(std::size_t m) const;
};

/// Horizontal Hessian of f(rho) assembled from the closed form
///   (f'/rho)|D_H rho|^2 I + (2f'/rho^3) [[B, C], [-C, B]] + (f'' - 3f'/rho) D_H rho (x) D_H rho
/// together with its closed-form spectrum. Throws at the origin. On the
/// characteristic set x_H = 0 both the matrix and the spectrum vanish.
std::pair<SymMatrix, RadialSpectrum> radial_h_hessian(double fp, double fpp, const HeisPoint& x);

/// Euclidean gradient of rho: (2|x_H|^2 x_H, x_{2d+1}) / (2 rho^3). Throws at the origin.
Vector euclid_grad_rho(const HeisPoint& x);

/// Euclidean Hessian of rho. Throws at the origin.
SymMatrix euclid_hessian_rho(const HeisPoint& x);

}  // namespace heis
