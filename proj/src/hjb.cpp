#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "heisliou/operators.hpp"

namespace heis::ops {

HJBCoefficients::HJBCoefficients(std::vector<HJBTerm> terms, GradientSpace space)
    : terms_(std::move(terms)), space_(space) {
  if (terms_.empty()) throw std::invalid_argument("HJBCoefficients: index set is empty");
  for (const auto& t : terms_)
    if (!t.drift || !t.zeroth) throw std::invalid_argument("HJBCoefficients: missing coefficient callback");
}

std::size_t HJBCoefficients::gradient_size(std::size_t n) const {
  return space_ == GradientSpace::horizontal ? n - 1 : n;
}

HJBTermValue evaluate_term(const HJBCoefficients& h, std::size_t k, std::span<const double> x) {
  const HJBTerm& term = h.terms()[k];
  HJBTermValue v{term.zeroth(x), term.drift(x)};
  if (!std::isfinite(v.zeroth) || !all_finite(v.drift))
    throw std::domain_error("HJB coefficient " + std::to_string(k) + " is not finite");
  if (v.zeroth < 0.0)
    throw std::domain_error("HJB coefficient " + std::to_string(k) + ": zeroth-order term is negative");
  if (v.drift.size() != h.gradient_size(x.size()))
    throw std::invalid_argument("HJB coefficient " + std::to_string(k) + ": drift length mismatch");
  return v;
}

namespace {

template <typename Better>
double envelope(const HJBCoefficients& h, std::span<const double> x, double r, std::span<const double> p,
                double init, Better better) {
  if (p.size() != h.gradient_size(x.size())) throw std::invalid_argument("hjb: gradient length mismatch");
  double best = init;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const HJBTermValue v = evaluate_term(h, k, x);
    const double val = v.zeroth * r - dot(v.drift, p);
    if (better(val, best)) best = val;
  }
  return best;
}

}  // namespace

double hjb_inf(const HJBCoefficients& h, std::span<const double> x, double r, std::span<const double> p) {
  return envelope(h, x, r, p, std::numeric_limits<double>::infinity(), std::less<>{});
}

double hjb_sup(const HJBCoefficients& h, std::span<const double> x, double r, std::span<const double> p) {
  return envelope(h, x, r, p, -std::numeric_limits<double>::infinity(), std::greater<>{});
}

std::vector<Vector> circle_directions(int count) {
  if (count < 1) throw std::invalid_argument("circle_directions: count must be positive");
  std::vector<Vector> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * k / count;
    dirs.push_back({std::cos(a), std::sin(a)});
  }
  return dirs;
}

HJBCoefficients gradient_norm_family(VectorCoefficient bbar, ScalarCoefficient g, ScalarCoefficient cbar,
                                     const std::vector<Vector>& directions, GradientSpace space) {
  std::vector<HJBTerm> terms;
  terms.reserve(directions.size());
  for (const Vector& a : directions) {
    terms.push_back({[bbar, g, a](std::span<const double> x) {
                       Vector b = bbar(x);
                       if (b.size() != a.size())
                         throw std::invalid_argument("gradient_norm_family: direction length mismatch");
                       const double gx = g(x);
                       for (std::size_t i = 0; i < b.size(); ++i) b[i] += gx * a[i];
                       return b;
                     },
                     cbar});
  }
  return HJBCoefficients(std::move(terms), space);
}

}  // namespace heis::ops
