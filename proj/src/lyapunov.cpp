#include "heisliou/lyapunov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"

namespace heis::check {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::condcor1: return "condcor1";
    case Condition::condcor1bis: return "condcor1bis";
    case Condition::condcor1p: return "condcor1p";
    case Condition::outype: return "outype";
    case Condition::schrodinger: return "schrodinger";
  }
  return "?";
}

std::string_view to_string(SchrodingerVariant v) { return v == SchrodingerVariant::sign ? "sign" : "order"; }

Condition condition_from_string(std::string_view s) {
  for (auto c : {Condition::condcor1, Condition::condcor1bis, Condition::condcor1p, Condition::outype,
                 Condition::schrodinger})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown condition '" + std::string(s) + "'");
}

SchrodingerVariant variant_from_string(std::string_view s) {
  if (s == "sign") return SchrodingerVariant::sign;
  if (s == "order") return SchrodingerVariant::order;
  throw std::invalid_argument("unknown variant '" + std::string(s) + "' (expected sign|order)");
}

double LyapunovSample::margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) m = std::min(m, t.margin);
  return m;
}

bool LyapunovSample::holds() const {
  return std::all_of(terms.begin(), terms.end(), [](const MarginTerm& t) { return t.holds(); });
}

namespace {

bool horizontal_condition(Condition c) {
  return c == Condition::condcor1 || c == Condition::condcor1bis || c == Condition::condcor1p;
}

void validate(const LyapunovData& data, HeisDims dims) {
  const auto need_family = [&](ops::GradientSpace space) {
    if (!data.family) throw std::invalid_argument(std::string(to_string(data.condition)) + ": coefficient family missing");
    if (data.family->space() != space)
      throw std::invalid_argument(std::string(to_string(data.condition)) +
                                  (space == ops::GradientSpace::horizontal ? ": drifts must be horizontal"
                                                                           : ": drifts must be Euclidean"));
  };
  switch (data.condition) {
    case Condition::condcor1: need_family(ops::GradientSpace::horizontal); break;
    case Condition::condcor1p:
      need_family(ops::GradientSpace::horizontal);
      (void)ops::PucciAlpha(data.alpha, dims.m());
      break;
    case Condition::condcor1bis:
      if (!data.gradient_norm || !data.gradient_norm->bbar || !data.gradient_norm->g || !data.gradient_norm->cbar)
        throw std::invalid_argument("condcor1bis: bbar, g and cbar are required");
      break;
    case Condition::outype:
      need_family(ops::GradientSpace::euclidean);
      if (data.gamma.size() != dims.n())
        throw std::invalid_argument("outype: gamma must have 2d+1 entries");
      if (!(*std::min_element(data.gamma.begin(), data.gamma.end()) > 0.0) || !all_finite(data.gamma))
        throw std::invalid_argument("outype: min gamma must be positive");
      break;
    case Condition::schrodinger: need_family(ops::GradientSpace::euclidean); break;
  }
}

MarginTerm term(std::string name, double lhs, double rhs, const Tolerance& tol, bool strict = false) {
  MarginTerm t;
  t.name = std::move(name);
  t.lhs = lhs;
  t.rhs = rhs;
  t.margin = rhs - lhs;
  t.allowed = tol.allowed(std::max(std::abs(lhs), std::abs(rhs)));
  t.strict = strict;
  return t;
}

// -C1 s / rho^4 + inf_alpha { c log rho - b . Drho / rho } >= 0
MarginTerm supersolution_term(const ops::HJBCoefficients& fam, std::span<const double> x, double c1, double s,
                              double rho, std::span<const double> drho, const Tolerance& tol) {
  const double logr = std::log(rho);
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < fam.size(); ++k) {
    const auto v = ops::evaluate_term(fam, k, x);
    inf = std::min(inf, v.zeroth * logr - dot(v.drift, drho) / rho);
  }
  return term("supersolution", c1 * s / (rho * rho * rho * rho), inf, tol);
}

LyapunovSample evaluate(const LyapunovData& data, const HeisPoint& p, const ops::Ellipticity& e, const Tolerance& tol) {
  const HeisDims dims = p.dims();
  const std::span<const double> x = p.coords();
  LyapunovSample out;
  out.x.assign(x.begin(), x.end());
  out.radius = hnorm(p);
  out.char_ratio = characteristic_ratio(p);
  const double rho = out.radius;
  const double rho4 = rho * rho * rho * rho;
  const double s = horizontal_norm_squared(p);
  const double logr = std::log(rho);
  const double Q = dims.Q();
  const double c1 = e.Lambda() * static_cast<double>(dims.n()) - e.lambda();

  switch (data.condition) {
    case Condition::condcor1:
    case Condition::condcor1p: {
      const HorizontalVector et = eta(p);
      double sup = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < data.family->size(); ++k) {
        const auto v = ops::evaluate_term(*data.family, k, x);
        sup = std::max(sup, dot(v.drift, et.entries()) / s - v.zeroth * rho4 / s * logr);
      }
      const double rhs = data.condition == Condition::condcor1
                             ? e.lambda() - e.Lambda() * (Q - 1.0)
                             : 4.0 * dims.d() * data.alpha - 3.0;
      out.terms.push_back(term(std::string(to_string(data.condition)), sup, rhs, tol));
      break;
    }
    case Condition::condcor1bis: {
      const HorizontalVector et = eta(p);
      const Vector b = data.gradient_norm->bbar(x);
      const double g = data.gradient_norm->g(x);
      const double c = data.gradient_norm->cbar(x);
      if (b.size() != dims.m()) throw std::invalid_argument("condcor1bis: bbar must have 2d entries");
      if (!(g >= 0.0) || !(c >= 0.0) || !all_finite(b))
        throw std::domain_error("condcor1bis: g and cbar must be finite and non-negative");
      const double lhs = dot(b, et.entries()) / s + g * et.norm() / s;
      const double rhs = c * rho4 / s * logr + e.lambda() - e.Lambda() * (Q - 1.0);
      out.terms.push_back(term("condcor1bis", lhs, rhs, tol));
      break;
    }
    case Condition::outype: {
      const Vector drho = euclid_grad_rho(p);
      double sup = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < data.family->size(); ++k)
        sup = std::max(sup, dot(ops::evaluate_term(*data.family, k, x).drift, drho));
      double rhs = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) rhs -= data.gamma[i] * x[i] * drho[i];
      out.terms.push_back(term("outype", sup, rhs, tol));
      out.terms.push_back(supersolution_term(*data.family, x, c1, s, rho, drho, tol));
      break;
    }
    case Condition::schrodinger: {
      const Vector drho = euclid_grad_rho(p);
      double inf_c = std::numeric_limits<double>::infinity();
      double sup_bd = -std::numeric_limits<double>::infinity();
      double sup_b = 0.0;
      for (std::size_t k = 0; k < data.family->size(); ++k) {
        const auto v = ops::evaluate_term(*data.family, k, x);
        inf_c = std::min(inf_c, v.zeroth);
        sup_bd = std::max(sup_bd, dot(v.drift, drho));
        sup_b = std::max(sup_b, norm(v.drift));
      }
      out.terms.push_back(term("c_a", 0.0, inf_c * logr, tol, true));
      if (data.variant == SchrodingerVariant::sign)
        out.terms.push_back(term("sign", sup_bd, 0.0, tol));
      else
        out.order_ratio = sup_b / rho;
      out.terms.push_back(supersolution_term(*data.family, x, c1, s, rho, drho, tol));
      break;
    }
  }
  return out;
}

// Shell maxima from rung k on are non-increasing and end strictly lower (or at zero).
bool order_evidence(const std::vector<ScanRow>& rows, std::size_t k, const Tolerance& tol) {
  std::optional<double> first, prev;
  for (std::size_t j = k; j < rows.size(); ++j) {
    if (!rows[j].shell_order_max) continue;
    const double q = *rows[j].shell_order_max;
    if (prev && q > *prev * (1.0 + tol.rel) + tol.abs_floor) return false;
    if (!first) first = q;
    prev = q;
  }
  if (!prev) return false;
  return *prev <= tol.abs_floor || *prev < *first;
}

}  // namespace

LyapunovReport check_lyapunov(const LyapunovData& data, HeisDims dims, const ops::Ellipticity& e,
                              const Region& region, const LyapunovOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(data, dims);
  if (opts.rungs < 1 || !(opts.rung_factor > 1.0)) throw std::invalid_argument("lyapunov: bad R-scan ladder");
  const std::vector<Vector> pts = sample_points(region, gallery::Geometry::heisenberg, dims.n());
  const bool use_tube = horizontal_condition(data.condition);

  enum class Skip { none, tube, origin };
  std::vector<Skip> skips(pts.size(), Skip::none);
  std::vector<LyapunovSample> samples(pts.size());
  detail::parallel_for(pts.size(), resolve_threads(opts.threads), [&](std::size_t i) {
    const HeisPoint p(dims, pts[i]);
    if (hnorm(p) == 0.0) {
      skips[i] = Skip::origin;
      return;
    }
    if (use_tube && characteristic_ratio(p) < region.char_eps) {
      skips[i] = Skip::tube;
      return;
    }
    samples[i] = evaluate(data, p, e, opts.tol);
  });

  LyapunovReport rep;
  rep.condition = data.condition;
  rep.region = region;
  rep.tol = opts.tol;
  rep.n_samples = pts.size();

  std::vector<double> ladder;
  for (std::size_t k = 0; k < opts.rungs; ++k) {
    const double R = region.rho_min * std::pow(opts.rung_factor, static_cast<double>(k));
    if (k > 0 && R >= region.rho_max) break;
    ladder.push_back(R);
  }
  rep.scan.resize(ladder.size());
  for (std::size_t k = 0; k < ladder.size(); ++k) rep.scan[k].R = ladder[k];
  std::vector<bool> pointwise(ladder.size(), true);

  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (skips[i] == Skip::tube) {
      ++rep.excluded.tube;
      continue;
    }
    if (skips[i] == Skip::origin) {
      ++rep.excluded.origin;
      continue;
    }
    const LyapunovSample& s = samples[i];
    ++rep.n_evaluated;
    const double m = s.margin();
    const bool ok = s.holds();
    if (!ok) ++rep.n_failed;
    if (!rep.worst_margin || m < *rep.worst_margin) {
      rep.worst_margin = m;
      rep.witness = s;
    }
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      if (k > 0 && s.radius < ladder[k]) break;
      ScanRow& row = rep.scan[k];
      ++row.n;
      if (!row.worst_margin || m < *row.worst_margin) row.worst_margin = m;
      if (!ok) pointwise[k] = false;
    }
    if (s.order_ratio) {
      std::size_t shell = 0;
      while (shell + 1 < ladder.size() && s.radius >= ladder[shell + 1]) ++shell;
      auto& q = rep.scan[shell].shell_order_max;
      q = q ? std::max(*q, *s.order_ratio) : *s.order_ratio;
    }
  }

  const bool order = data.condition == Condition::schrodinger && data.variant == SchrodingerVariant::order;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    ScanRow& row = rep.scan[k];
    row.holds = row.n > 0 && pointwise[k] && (!order || order_evidence(rep.scan, k, opts.tol));
  }
  for (std::size_t k = ladder.size(); k-- > 0;) {
    if (rep.scan[k].n == 0) continue;
    if (!rep.scan[k].holds) break;
    rep.threshold_R = rep.scan[k].R;
  }

  if (rep.n_evaluated == 0)
    rep.verdict = Verdict::vacuous;
  else
    rep.verdict = rep.scan.front().holds ? Verdict::pass : Verdict::fail;
  char range[96];
  std::snprintf(range, sizeof range, "[%.6g, %.6g]", region.rho_min, region.rho_max);
  rep.note = std::string("evidence at sampled scales: the condition is required for rho large, and a finite sample over ") +
             range + " cannot certify a limit";
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace heis::check
