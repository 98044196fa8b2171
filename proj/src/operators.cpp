#include "heisliou/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace heis::ops {

Ellipticity::Ellipticity(double lambda, double Lambda) : lambda_(lambda), Lambda_(Lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("Ellipticity: lambda must be positive");
  if (!(Lambda >= lambda) || !std::isfinite(Lambda))
    throw std::invalid_argument("Ellipticity: Lambda must satisfy Lambda >= lambda");
}

PucciAlpha::PucciAlpha(double alpha, std::size_t m) : alpha_(alpha), m_(m) {
  if (m == 0) throw std::invalid_argument("PucciAlpha: matrix size must be positive");
  // 1 - m alpha >= 0, evaluated the way the operator uses it.
  if (!(alpha > 0.0) || !(1.0 - static_cast<double>(m) * alpha >= 0.0))
    throw std::invalid_argument("PucciAlpha: alpha = " + std::to_string(alpha) + " outside (0, 1/" +
                                std::to_string(m) + "]");
}

namespace {

struct SignedSums {
  double positive = 0.0;
  double negative = 0.0;
};

SignedSums signed_sums(std::span<const double> eig, double zero_abs) {
  SignedSums s;
  for (double e : eig) {
    if (std::abs(e) <= zero_abs) continue;
    if (e > 0.0)
      s.positive += e;
    else
      s.negative += e;
  }
  return s;
}

}  // namespace

double pucci_max_spectrum(const Ellipticity& e, std::span<const double> eig, double zero_abs) {
  const SignedSums s = signed_sums(eig, zero_abs);
  return -e.Lambda() * s.negative - e.lambda() * s.positive;
}

double pucci_min_spectrum(const Ellipticity& e, std::span<const double> eig, double zero_abs) {
  const SignedSums s = signed_sums(eig, zero_abs);
  return -e.Lambda() * s.positive - e.lambda() * s.negative;
}

double pucci_max(const Ellipticity& e, const SymMatrix& m, double zero_rel) {
  return pucci_max_spectrum(e, sym_eigenvalues(m), zero_rel * m.frobenius_norm());
}

double pucci_min(const Ellipticity& e, const SymMatrix& m, double zero_rel) {
  return pucci_min_spectrum(e, sym_eigenvalues(m), zero_rel * m.frobenius_norm());
}

double pucci_plus_alpha(const PucciAlpha& pa, const SymMatrix& m) {
  if (m.size() != pa.m()) throw std::invalid_argument("pucci_plus_alpha: matrix size mismatch");
  const Vector eig = sym_eigenvalues(m);
  const double md = static_cast<double>(pa.m());
  return -pa.alpha() * m.trace() - (1.0 - md * pa.alpha()) * eig.front();
}

double pucci_minus_alpha(const PucciAlpha& pa, const SymMatrix& m) {
  if (m.size() != pa.m()) throw std::invalid_argument("pucci_minus_alpha: matrix size mismatch");
  const Vector eig = sym_eigenvalues(m);
  const double md = static_cast<double>(pa.m());
  return -pa.alpha() * m.trace() - (1.0 - md * pa.alpha()) * eig.back();
}

double pnorm_operator(double p, std::span<const double> q, const SymMatrix& m) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("pnorm_operator: p must lie in (1, inf)");
  if (q.size() != m.size()) throw std::invalid_argument("pnorm_operator: gradient length mismatch");
  const double q2 = norm_squared(q);
  if (q2 == 0.0) throw std::domain_error("pnorm_operator: undefined at vanishing gradient");
  // Tr[(I + (p-2) q q^T/|q|^2) M] = Tr M + (p-2) q^T M q / |q|^2
  const Vector mq = m.matrix() * q;
  return -(m.trace() + (p - 2.0) * dot(q, mq) / q2);
}

double neg_trace(const SymMatrix& m) { return -m.trace(); }

}  // namespace heis::ops
