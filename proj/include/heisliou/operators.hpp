#pragma once

// Second-order operators on symmetric matrices (Pucci extremal operators,
// normalized p-Laplacian) and the inf/sup Hamiltonians of HJB type.

#include <functional>
#include <span>
#include <vector>

#include "heisliou/linalg.hpp"

namespace heis::ops {

/// Eigenvalues with |e| <= kZeroEigenvalueRel * ||M||_F join neither sign sum
/// in the Pucci operators.
inline constexpr double kZeroEigenvalueRel = 1e-12;

class Ellipticity {
 public:
  Ellipticity(double lambda, double Lambda);
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }

 private:
  double lambda_;
  double Lambda_;
};

/// Parameter of the trace-normalised class {A >= alpha I, Tr A = 1} on m x m
/// matrices; requires 0 < alpha <= 1/m.
class PucciAlpha {
 public:
  PucciAlpha(double alpha, std::size_t m);
  double alpha() const { return alpha_; }
  std::size_t m() const { return m_; }

 private:
  double alpha_;
  std::size_t m_;
};

/// sup over lambda I <= A <= Lambda I of Tr(-AM): -Lambda sum_{e<0} e - lambda sum_{e>0} e.
double pucci_max(const Ellipticity& e, const SymMatrix& m, double zero_rel = kZeroEigenvalueRel);
/// inf over the same class: -Lambda sum_{e>0} e - lambda sum_{e<0} e.
double pucci_min(const Ellipticity& e, const SymMatrix& m, double zero_rel = kZeroEigenvalueRel);

/// Same formulas on a precomputed spectrum; eigenvalues with |e| <= zero_abs are dropped.
double pucci_max_spectrum(const Ellipticity& e, std::span<const double> eig, double zero_abs);
double pucci_min_spectrum(const Ellipticity& e, std::span<const double> eig, double zero_abs);

/// -alpha Tr(M) - (1 - m alpha) e_min
double pucci_plus_alpha(const PucciAlpha& pa, const SymMatrix& m);
/// -alpha Tr(M) - (1 - m alpha) e_max
double pucci_minus_alpha(const PucciAlpha& pa, const SymMatrix& m);

/// -Tr[(I + (p-2) q q^T / |q|^2) M], p in (1, inf). Throws std::domain_error at q = 0.
double pnorm_operator(double p, std::span<const double> q, const SymMatrix& m);

/// -Tr(M)
double neg_trace(const SymMatrix& m);

// ----- HJB envelopes -----

enum class GradientSpace { horizontal, euclidean };

/// Coefficient callbacks receive raw coordinates. They must be safe to call
/// concurrently from several threads.
using ScalarCoefficient = std::function<double(std::span<const double>)>;
using VectorCoefficient = std::function<Vector(std::span<const double>)>;

struct HJBTerm {
  VectorCoefficient drift;   // b^alpha
  ScalarCoefficient zeroth;  // c^alpha >= 0
};

class HJBCoefficients {
 public:
  HJBCoefficients(std::vector<HJBTerm> terms, GradientSpace space);

  const std::vector<HJBTerm>& terms() const { return terms_; }
  GradientSpace space() const { return space_; }
  std::size_t size() const { return terms_.size(); }

  /// Expected gradient length for points with n coordinates.
  std::size_t gradient_size(std::size_t n) const;

 private:
  std::vector<HJBTerm> terms_;
  GradientSpace space_;
};

struct HJBTermValue {
  double zeroth;
  Vector drift;
};

/// Evaluates and validates (finite, c >= 0, drift length) one term at x.
HJBTermValue evaluate_term(const HJBCoefficients& h, std::size_t k, std::span<const double> x);

/// min_alpha { c^alpha(x) r - b^alpha(x) . p }
double hjb_inf(const HJBCoefficients& h, std::span<const double> x, double r, std::span<const double> p);
/// max_alpha { c^alpha(x) r - b^alpha(x) . p }
double hjb_sup(const HJBCoefficients& h, std::span<const double> x, double r, std::span<const double> p);

/// Unit vectors at angles 2 pi k / K in the plane.
std::vector<Vector> circle_directions(int count);

/// The family {bbar + g a : a in directions} with zeroth order cbar, whose inf
/// envelope approximates cbar r - bbar . p - g |p|.
HJBCoefficients gradient_norm_family(VectorCoefficient bbar, ScalarCoefficient g, ScalarCoefficient cbar,
                                     const std::vector<Vector>& directions, GradientSpace space);

}  // namespace heis::ops
