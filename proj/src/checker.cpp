#include "heisliou/checker.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "heisliou/hgroup.hpp"
#include "parallel.hpp"

namespace heis::check {

std::string_view to_string(SecondOrder s) {
  switch (s) {
    case SecondOrder::pucci_max: return "pucci-max";
    case SecondOrder::pucci_min: return "pucci-min";
    case SecondOrder::pucci_plus_alpha: return "pucci-plus-alpha";
    case SecondOrder::pucci_minus_alpha: return "pucci-minus-alpha";
    case SecondOrder::pnorm: return "pnorm";
    case SecondOrder::neg_trace: return "neg-trace";
  }
  return "?";
}

std::string_view to_string(Envelope e) { return e == Envelope::inf ? "inf" : "sup"; }
std::string_view to_string(Sense s) { return s == Sense::subsolution ? "sub" : "super"; }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::vacuous: return "vacuous";
  }
  return "?";
}

SecondOrder second_order_from_string(std::string_view s) {
  for (auto k : {SecondOrder::pucci_max, SecondOrder::pucci_min, SecondOrder::pucci_plus_alpha,
                 SecondOrder::pucci_minus_alpha, SecondOrder::pnorm, SecondOrder::neg_trace})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown operator '" + std::string(s) + "'");
}

Envelope envelope_from_string(std::string_view s) {
  if (s == "inf") return Envelope::inf;
  if (s == "sup") return Envelope::sup;
  throw std::invalid_argument("unknown envelope side '" + std::string(s) + "' (expected inf|sup)");
}

Sense sense_from_string(std::string_view s) {
  if (s == "sub" || s == "subsolution") return Sense::subsolution;
  if (s == "super" || s == "supersolution") return Sense::supersolution;
  throw std::invalid_argument("unknown sense '" + std::string(s) + "' (expected sub|super)");
}

void OperatorSpec::validate(std::size_t m) const {
  switch (second_order) {
    case SecondOrder::pucci_max:
    case SecondOrder::pucci_min: (void)ops::Ellipticity(lambda, Lambda); break;
    case SecondOrder::pucci_plus_alpha:
    case SecondOrder::pucci_minus_alpha: (void)ops::PucciAlpha(alpha, m); break;
    case SecondOrder::pnorm:
      if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("pnorm: p must lie in (1, inf)");
      break;
    case SecondOrder::neg_trace: break;
  }
  if (first_order && first_order->coeffs.space() != gradient_space)
    throw std::invalid_argument("operator spec: HJB coefficients and gradient_space disagree");
}

double Tolerance::allowed(double magnitude) const { return std::max(abs_floor, rel * std::max(1.0, magnitude)); }

double apply_second_order(const OperatorSpec& spec, const SymMatrix& hess, std::span<const double> eig,
                          std::span<const double> grad) {
  const double zero_abs = ops::kZeroEigenvalueRel * hess.frobenius_norm();
  const double m = static_cast<double>(hess.size());
  switch (spec.second_order) {
    case SecondOrder::pucci_max:
      return ops::pucci_max_spectrum(ops::Ellipticity(spec.lambda, spec.Lambda), eig, zero_abs);
    case SecondOrder::pucci_min:
      return ops::pucci_min_spectrum(ops::Ellipticity(spec.lambda, spec.Lambda), eig, zero_abs);
    case SecondOrder::pucci_plus_alpha:
      return -spec.alpha * hess.trace() - (1.0 - m * spec.alpha) * eig.front();
    case SecondOrder::pucci_minus_alpha:
      return -spec.alpha * hess.trace() - (1.0 - m * spec.alpha) * eig.back();
    case SecondOrder::pnorm: return ops::pnorm_operator(spec.p, grad, hess);
    case SecondOrder::neg_trace: return -hess.trace();
  }
  throw std::logic_error("unreachable");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HEIS_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

enum class Skip { none, tube, kink, origin };

struct Slot {
  Skip skip = Skip::none;
  SampleRecord rec;
};

std::size_t hessian_size(gallery::Geometry g, std::size_t n) {
  return g == gallery::Geometry::heisenberg ? n - 1 : n;
}

void validate_setup(gallery::Geometry geometry, std::size_t n, const OperatorSpec& spec) {
  if (geometry == gallery::Geometry::heisenberg) {
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("Heisenberg field needs an odd dimension >= 3");
  } else if (spec.gradient_space == ops::GradientSpace::horizontal) {
    throw std::invalid_argument("operator spec: a horizontal gradient needs a Heisenberg field");
  }
  spec.validate(hessian_size(geometry, n));
}

Skip classify(gallery::Geometry geometry, std::span<const double> x, double radius, double kink_distance,
              const Region& region, double& ratio) {
  ratio = 1.0;
  if (radius == 0.0) return Skip::origin;
  if (geometry == gallery::Geometry::heisenberg) {
    const HeisPoint p(HeisDims(static_cast<int>((x.size() - 1) / 2)), Vector(x.begin(), x.end()));
    ratio = characteristic_ratio(p);
    if (ratio < region.char_eps) return Skip::tube;
  }
  if (kink_distance < region.kink_eps) return Skip::kink;
  return Skip::none;
}

SampleRecord evaluate(gallery::Geometry geometry, std::span<const double> x, double u, std::span<const double> du,
                      const SymMatrix& d2u, const OperatorSpec& spec, const Tolerance& tol) {
  SampleRecord rec;
  rec.x.assign(x.begin(), x.end());
  rec.u = u;
  SymMatrix hess = d2u;
  Vector grad(du.begin(), du.end());
  if (geometry == gallery::Geometry::heisenberg) {
    const HeisPoint p(HeisDims(static_cast<int>((x.size() - 1) / 2)), rec.x);
    hess = h_hessian(du, d2u, p);
    if (spec.gradient_space == ops::GradientSpace::horizontal) {
      const HorizontalVector g = h_gradient(du, p);
      grad.assign(g.entries().begin(), g.entries().end());
    } else if (spec.second_order == SecondOrder::pnorm) {
      throw std::invalid_argument("pnorm needs the horizontal gradient");
    }
  }
  rec.eigenvalues = sym_eigenvalues(hess);
  rec.second_order = apply_second_order(spec, hess, rec.eigenvalues, grad);
  if (spec.first_order) {
    const auto& fo = *spec.first_order;
    rec.first_order = fo.side == Envelope::inf ? ops::hjb_inf(fo.coeffs, x, u, grad) : ops::hjb_sup(fo.coeffs, x, u, grad);
  }
  rec.value = rec.second_order + rec.first_order;
  rec.excess = spec.sense == Sense::subsolution ? rec.value : -rec.value;
  rec.allowed = tol.allowed(hess.frobenius_norm() + std::abs(rec.first_order));
  return rec;
}

CheckReport reduce(std::vector<Slot>& slots, const Region& region, const CheckOptions& opts) {
  CheckReport rep;
  rep.region = region;
  rep.tol = opts.tol;
  rep.n_samples = slots.size();
  for (Slot& s : slots) {
    switch (s.skip) {
      case Skip::tube: ++rep.excluded.tube; continue;
      case Skip::kink: ++rep.excluded.kink; continue;
      case Skip::origin: ++rep.excluded.origin; continue;
      case Skip::none: break;
    }
    ++rep.n_evaluated;
    if (s.rec.excess > s.rec.allowed) ++rep.n_failed;
    if (!rep.worst_violation || s.rec.excess > *rep.worst_violation) {
      rep.worst_violation = s.rec.excess;
      rep.witness = s.rec;
    }
    if (opts.keep_samples) rep.samples.push_back(std::move(s.rec));
  }
  if (rep.n_evaluated == 0)
    rep.verdict = Verdict::vacuous;
  else
    rep.verdict = rep.n_failed > 0 ? Verdict::fail : Verdict::pass;
  return rep;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

CheckReport check_inequality(const gallery::ScalarField& field, const OperatorSpec& spec, const Region& region,
                             const CheckOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_setup(field.geometry(), field.dim(), spec);
  const std::vector<Vector> pts = sample_points(region, field.geometry(), field.dim());
  std::vector<Slot> slots(pts.size());
  detail::parallel_for(pts.size(), resolve_threads(opts.threads), [&](std::size_t i) {
    const Vector& x = pts[i];
    Slot& s = slots[i];
    double ratio = 1.0;
    const double radius = field.radius(x);
    s.skip = classify(field.geometry(), x, radius, field.kink_distance(x), region, ratio);
    if (s.skip == Skip::none && radius == 0.0) s.skip = Skip::origin;
    if (s.skip != Skip::none) return;
    s.rec = evaluate(field.geometry(), x, field.value(x), field.gradient(x), field.hessian(x), spec, opts.tol);
    s.rec.radius = radius;
    s.rec.char_ratio = ratio;
  });
  CheckReport rep = reduce(slots, region, opts);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

std::vector<TabulatedSample> parse_tabulated_csv(std::string_view text, std::size_t n) {
  const std::size_t cols = n + 1 + n + n * (n + 1) / 2;
  std::vector<TabulatedSample> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    Vector vals;
    bool numeric = true;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      std::string cell(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cell = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        numeric = false;
        break;
      }
      vals.push_back(v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (!numeric) {
      if (out.empty() && line_no == 1) continue;  // header
      throw std::invalid_argument("tabulated field: line " + std::to_string(line_no) + " is not numeric");
    }
    if (vals.size() != cols)
      throw std::invalid_argument("tabulated field: line " + std::to_string(line_no) + " has " +
                                  std::to_string(vals.size()) + " columns, expected " + std::to_string(cols));
    TabulatedSample s;
    s.x.assign(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(n));
    s.u = vals[n];
    s.du.assign(vals.begin() + static_cast<std::ptrdiff_t>(n + 1), vals.begin() + static_cast<std::ptrdiff_t>(2 * n + 1));
    s.d2u = SymMatrix(n);
    std::size_t k = 2 * n + 1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) s.d2u.set(i, j, vals[k++]);
    if (!all_finite(vals)) throw std::invalid_argument("tabulated field: line " + std::to_string(line_no) + " is not finite");
    out.push_back(std::move(s));
  }
  return out;
}

CheckReport check_tabulated(const std::vector<TabulatedSample>& data, gallery::Geometry geometry,
                            const OperatorSpec& spec, const Region& region, const CheckOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  region.validate();
  if (data.empty()) throw std::invalid_argument("tabulated field: no rows");
  const std::size_t n = data.front().x.size();
  validate_setup(geometry, n, spec);
  std::vector<Slot> slots(data.size());
  detail::parallel_for(data.size(), resolve_threads(opts.threads), [&](std::size_t i) {
    const TabulatedSample& t = data[i];
    if (t.x.size() != n) throw std::invalid_argument("tabulated field: inconsistent dimensions");
    Slot& s = slots[i];
    double radius;
    if (geometry == gallery::Geometry::heisenberg)
      radius = hnorm(HeisPoint(HeisDims(static_cast<int>((n - 1) / 2)), t.x));
    else
      radius = norm(t.x);
    double ratio = 1.0;
    s.skip = classify(geometry, t.x, radius, std::numeric_limits<double>::infinity(), region, ratio);
    if (s.skip != Skip::none) return;
    s.rec = evaluate(geometry, t.x, t.u, t.du, t.d2u, spec, opts.tol);
    s.rec.radius = radius;
    s.rec.char_ratio = ratio;
  });
  CheckReport rep = reduce(slots, region, opts);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

}  // namespace heis::check
