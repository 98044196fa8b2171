#include "heisliou/finite_diff.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "heisliou/checker.hpp"
#include "heisliou/hgroup.hpp"
#include "parallel.hpp"

namespace heis::check {

namespace {

// Radius of x + a e_i + b e_j.
double shifted_radius(const gallery::ScalarField& f, Vector& y, std::size_t i, double a, std::size_t j, double b) {
  y[i] += a;
  y[j] += b;
  const double r = f.radius(y);
  y[i] -= a;
  y[j] -= b;
  return r;
}

double shifted_value(const gallery::ScalarField& f, Vector& y, std::size_t i, double a, std::size_t j, double b) {
  y[i] += a;
  y[j] += b;
  const double v = f.value_fn()(y);
  y[i] -= a;
  y[j] -= b;
  return v;
}

}  // namespace

bool stencil_is_clean(const gallery::ScalarField& field, std::span<const double> x, double h) {
  double max_abs = 0.0;
  for (double v : x) max_abs = std::max(max_abs, std::abs(v));
  // The stencil box must stay clear of the origin, where rho and |x| are not smooth.
  if (max_abs <= 2.0 * h) return false;
  const auto& bps = field.singularities().breakpoints;
  if (bps.empty()) return true;
  if (field.kink_distance(x) <= 2.0 * h) return false;
  const double r0 = field.radius(x);
  Vector y(x.begin(), x.end());
  const auto same_side = [&](double r) {
    for (double b : bps)
      if (r == b || (r < b) != (r0 < b)) return false;
    return true;
  };
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!same_side(shifted_radius(field, y, i, h, i, 0.0)) || !same_side(shifted_radius(field, y, i, -h, i, 0.0)))
      return false;
    for (std::size_t j = i + 1; j < n; ++j)
      for (double a : {h, -h})
        for (double b : {h, -h})
          if (!same_side(shifted_radius(field, y, i, a, j, b))) return false;
  }
  return true;
}

FdResult fd_h_hessian(const gallery::ScalarField& field, std::span<const double> x, double h, const FdOptions& opts) {
  if (x.size() != field.dim()) throw std::invalid_argument("fd_h_hessian: point dimension mismatch");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("fd_h_hessian: step must be positive");
  FdResult res;
  while (!stencil_is_clean(field, x, h)) {
    h *= 0.5;
    ++res.shrinks;
    if (h < opts.h_min) throw std::domain_error("fd_h_hessian: stencil crosses a singular set even at the minimum step");
  }
  res.h_used = h;

  const std::size_t n = x.size();
  Vector y(x.begin(), x.end());
  const double f0 = field.value_fn()(y);
  res.euclid_gradient.assign(n, 0.0);
  res.euclid_hessian = SymMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double fp = shifted_value(field, y, i, h, i, 0.0);
    const double fm = shifted_value(field, y, i, -h, i, 0.0);
    res.euclid_gradient[i] = (fp - fm) / (2.0 * h);
    res.euclid_hessian.set(i, i, (fp - 2.0 * f0 + fm) / (h * h));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double fpp = shifted_value(field, y, i, h, j, h);
      const double fpm = shifted_value(field, y, i, h, j, -h);
      const double fmp = shifted_value(field, y, i, -h, j, h);
      const double fmm = shifted_value(field, y, i, -h, j, -h);
      res.euclid_hessian.set(i, j, (fpp - fpm - fmp + fmm) / (4.0 * h * h));
    }
  }

  if (field.geometry() == gallery::Geometry::heisenberg) {
    const HeisPoint p(field.heis_dims(), y);
    res.hessian = h_hessian(res.euclid_gradient, res.euclid_hessian, p);
    const HorizontalVector g = h_gradient(res.euclid_gradient, p);
    res.gradient.assign(g.entries().begin(), g.entries().end());
  } else {
    res.hessian = res.euclid_hessian;
    res.gradient = res.euclid_gradient;
  }
  return res;
}

ConvergenceReport convergence_study(const gallery::ScalarField& field, const Region& region, double h0, int levels,
                                    const FdOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (levels < 2) throw std::invalid_argument("convergence_study: levels must be >= 2");
  if (!(h0 > 0.0) || !std::isfinite(h0)) throw std::invalid_argument("convergence_study: h0 must be positive");
  const std::vector<Vector> pts = sample_points(region, field.geometry(), field.dim());
  const bool heis = field.geometry() == gallery::Geometry::heisenberg;

  std::vector<char> usable(pts.size(), 0);
  std::vector<SymMatrix> analytic(pts.size());
  detail::parallel_for(pts.size(), resolve_threads(0), [&](std::size_t i) {
    const Vector& x = pts[i];
    if (heis && characteristic_ratio(HeisPoint(field.heis_dims(), x)) < region.char_eps) return;
    if (field.kink_distance(x) < region.kink_eps || !stencil_is_clean(field, x, h0)) return;
    const SymMatrix d2u = field.hessian(x);
    analytic[i] = heis ? h_hessian(field.gradient(x), d2u, HeisPoint(field.heis_dims(), x)) : d2u;
    usable[i] = 1;
  });

  ConvergenceReport rep;
  rep.region = region;
  rep.n_samples = pts.size();
  rep.n_used = static_cast<std::size_t>(std::count(usable.begin(), usable.end(), 1));
  rep.n_excluded = rep.n_samples - rep.n_used;
  if (rep.n_used == 0) throw std::invalid_argument("convergence_study: no admissible samples");

  double h = h0;
  std::vector<double> err(pts.size(), 0.0);
  std::vector<int> shrunk(pts.size(), 0);
  for (int level = 0; level < levels; ++level, h *= 0.5) {
    detail::parallel_for(pts.size(), resolve_threads(0), [&](std::size_t i) {
      err[i] = 0.0;
      if (!usable[i]) return;
      const FdResult fd = fd_h_hessian(field, pts[i], h, opts);
      shrunk[i] = fd.shrinks;
      const SymMatrix diff = fd.hessian - analytic[i];
      err[i] = diff.max_abs();
    });
    ConvergenceLevel lv;
    lv.h = h;
    lv.max_error = *std::max_element(err.begin(), err.end());
    if (!rep.levels.empty()) lv.order = std::log2(rep.levels.back().max_error / lv.max_error);
    rep.c_estimate = std::max(rep.c_estimate, lv.max_error / (h * h));
    rep.levels.push_back(lv);
    // A clean stencil at h0 stays clean at every smaller step, so no shrink should occur.
    rep.stencil_crossings += static_cast<std::size_t>(std::count_if(shrunk.begin(), shrunk.end(), [](int s) { return s > 0; }));
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace heis::check
