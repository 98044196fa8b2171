#include "heisliou/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace heis::gallery {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Quartic inner piece / power outer piece glued at r = 1.
std::vector<ProfilePiece> glued_pieces(double a, double sign) {
  ProfilePiece inner{0.0, 1.0, [a, sign](double r) {
                       const double r2 = r * r;
                       const double half = 0.5 * (a - 2.0);
                       return Jet{sign * 0.125 * (a * (a - 2.0) * r2 * r2 - 2.0 * (a * a - 4.0) * r2 + a * (a + 2.0)),
                                  sign * half * r * (a * r2 - (a + 2.0)),
                                  sign * half * (3.0 * a * r2 - (a + 2.0))};
                     }};
  ProfilePiece outer{1.0, kInf, [a, sign](double r) {
                       return Jet{sign * std::pow(r, 2.0 - a), sign * (2.0 - a) * std::pow(r, 1.0 - a),
                                  sign * (2.0 - a) * (1.0 - a) * std::pow(r, -a)};
                     }};
  return {inner, outer};
}

ProfilePiece power_piece(double k) {
  return {0.0, kInf, [k](double r) {
            return Jet{std::pow(r, k), k * std::pow(r, k - 1.0), k * (k - 1.0) * std::pow(r, k - 2.0)};
          }};
}

ProfilePiece log_piece(double sign) {
  return {0.0, kInf, [sign](double r) { return Jet{sign * std::log(r), sign / r, -sign / (r * r)}; }};
}

void require_regime(bool ok, const std::string& name, const std::string& why) {
  if (!ok) throw std::invalid_argument("profile " + name + ": " + why);
}

}  // namespace

std::string_view to_string(Geometry g) { return g == Geometry::heisenberg ? "heisenberg" : "euclidean"; }

Jet RadialProfile::eval(double r) const {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::domain_error("profile " + name + ": invalid radius");
  if (r == 0.0 && singular_at_origin) throw std::domain_error("profile " + name + ": undefined at r = 0");
  for (const auto& p : pieces)
    if (r >= p.lo && r < p.hi) return p.eval(r);
  throw std::domain_error("profile " + name + ": radius not covered");
}

std::vector<double> RadialProfile::breakpoints() const {
  std::vector<double> b;
  for (std::size_t i = 1; i < pieces.size(); ++i) b.push_back(pieces[i].lo);
  return b;
}

RadialProfile make_profile(const ProfileRequest& req) {
  RadialProfile p;
  p.name = req.name;
  p.request = req;
  const std::string& n = req.name;
  if (req.d < 1) throw std::invalid_argument("profile " + n + ": d must be >= 1");
  if (!(req.lambda > 0.0) || !(req.Lambda >= req.lambda))
    throw std::invalid_argument("profile " + n + ": need 0 < lambda <= Lambda");
  const double ratio = req.Lambda / req.lambda;
  const double dd = req.d;
  const double Q = 2.0 * dd + 2.0;

  if (n == "u2" || n == "u3") {
    p.geometry = Geometry::euclidean;
    require_regime(req.d >= 2, n, "needs space dimension d >= 2");
    const bool is_u2 = n == "u2";
    const double a = is_u2 ? ratio * (dd - 1.0) + 1.0 : (dd - 1.0) / ratio + 1.0;
    require_regime(a > 2.0, n,
                   std::string("exponent ") + std::to_string(a) +
                       (is_u2 ? " <= 2 (needs d > lambda/Lambda + 1)" : " <= 2 (needs d > Lambda/lambda + 1)"));
    p.exponent = a;
    p.pieces = glued_pieces(a, is_u2 ? 1.0 : -1.0);
    p.bounded_above = p.bounded_below = true;
  } else if (n == "u_tilde" || n == "u4" || n == "u5") {
    p.geometry = Geometry::heisenberg;
    double a = Q;
    double sign = 1.0;
    if (n == "u4") {
      a = (Q - 1.0) / ratio + 1.0;
      sign = -1.0;
      require_regime(a > 2.0, n, "exponent " + std::to_string(a) + " <= 2 (needs Q > Lambda/lambda + 1)");
    } else if (n == "u5") {
      a = ratio * (Q - 1.0) + 1.0;
      require_regime(a > 2.0, n, "exponent " + std::to_string(a) + " <= 2");
    }
    p.exponent = a;
    p.pieces = glued_pieces(a, sign);
    p.bounded_above = p.bounded_below = true;
  } else if (n == "folland") {
    p.geometry = Geometry::heisenberg;
    p.exponent = Q;
    p.pieces = {power_piece(2.0 - Q)};
    p.bounded_below = true;
    p.singular_at_origin = true;
  } else if (n == "log_rho" || n == "neg_log_rho") {
    p.geometry = Geometry::heisenberg;
    p.pieces = {log_piece(n == "log_rho" ? 1.0 : -1.0)};
    p.singular_at_origin = true;
  } else if (n == "power") {
    p.geometry = Geometry::heisenberg;
    require_regime(req.kappa.has_value() && std::isfinite(*req.kappa), n, "needs a finite exponent kappa");
    const double k = *req.kappa;
    p.exponent = k;
    p.pieces = {power_piece(k)};
    p.bounded_below = true;
    p.bounded_above = k == 0.0;
    p.singular_at_origin = k < 0.0;
  } else {
    throw std::invalid_argument("unknown profile '" + n + "'");
  }
  if (p.geometry == Geometry::heisenberg) HeisDims check(req.d);
  return p;
}

const std::vector<ProfileInfo>& profile_catalog() {
  static const std::vector<ProfileInfo> catalog = {
      {"u2", Geometry::euclidean,
       "1/8[b(b-2)r^4 - 2(b^2-4)r^2 + b(b+2)] (r<1), r^(2-b) (r>=1), r=|x|, b=(Lambda/lambda)(d-1)+1",
       "d >= 2 and b > 2, i.e. d > lambda/Lambda + 1", "pucci-max", "super"},
      {"u3", Geometry::euclidean,
       "-1/8[a(a-2)r^4 - 2(a^2-4)r^2 + a(a+2)] (r<1), -r^(2-a) (r>=1), r=|x|, a=(lambda/Lambda)(d-1)+1",
       "a > 2, i.e. d > Lambda/lambda + 1", "pucci-max", "sub"},
      {"u_tilde", Geometry::heisenberg,
       "1/8[Q(Q-2)rho^4 - 2(Q^2-4)rho^2 + Q(Q+2)] (rho<=1), rho^(2-Q) (rho>=1)", "all d >= 1", "neg-trace",
       "super"},
      {"u4", Geometry::heisenberg,
       "-1/8[a(a-2)rho^4 - 2(a^2-4)rho^2 + a(a+2)] (rho<1), -rho^(2-a) (rho>=1), a=(lambda/Lambda)(Q-1)+1",
       "a > 2, i.e. Q > Lambda/lambda + 1", "pucci-max", "sub"},
      {"u5", Geometry::heisenberg,
       "1/8[b(b-2)rho^4 - 2(b^2-4)rho^2 + b(b+2)] (rho<1), rho^(2-b) (rho>=1), b=(Lambda/lambda)(Q-1)+1",
       "all d >= 1 (b > 2 always)", "pucci-max", "super"},
      {"folland", Geometry::heisenberg, "rho^(2-Q)", "rho > 0", "neg-trace", "super"},
      {"log_rho", Geometry::heisenberg, "log rho", "rho > 0", "pucci-min", "sub"},
      {"neg_log_rho", Geometry::heisenberg, "-log rho", "rho > 0", "pucci-max", "super"},
      {"power", Geometry::heisenberg, "rho^kappa", "kappa finite; rho > 0 when kappa < 0", "neg-trace", "super"},
  };
  return catalog;
}

const ProfileInfo& profile_info(std::string_view name) {
  for (const auto& info : profile_catalog())
    if (info.name == name) return info;
  throw std::invalid_argument("unknown profile '" + std::string(name) + "'");
}

// ----- ScalarField -----

ScalarField::ScalarField(std::string name, std::size_t dim, Geometry geometry, ValueFn value, GradientFn gradient,
                         HessianFn hessian, Singularities singular, Provenance provenance)
    : name_(std::move(name)),
      dim_(dim),
      geometry_(geometry),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      singular_(std::move(singular)),
      provenance_(provenance) {
  if (dim_ == 0) throw std::invalid_argument("ScalarField: dimension must be positive");
  if (geometry_ == Geometry::heisenberg && (dim_ < 3 || dim_ % 2 == 0))
    throw std::invalid_argument("ScalarField: Heisenberg fields need 2d+1 coordinates");
  if (!value_ || !gradient_ || !hessian_) throw std::invalid_argument("ScalarField: missing evaluator");
}

HeisDims ScalarField::heis_dims() const {
  if (geometry_ != Geometry::heisenberg) throw std::logic_error("ScalarField: not a Heisenberg field");
  return HeisDims(static_cast<int>((dim_ - 1) / 2));
}

double ScalarField::radius(std::span<const double> x) const {
  if (x.size() != dim_) throw std::invalid_argument("ScalarField " + name_ + ": point dimension mismatch");
  if (geometry_ == Geometry::euclidean) return norm(x);
  const double s = norm_squared(x.first(dim_ - 1));
  return std::sqrt(std::hypot(s, x.back()));
}

double ScalarField::kink_distance(std::span<const double> x) const {
  const double r = radius(x);
  double best = std::numeric_limits<double>::infinity();
  for (double b : singular_.breakpoints) best = std::min(best, std::abs(r - b));
  return best;
}

void ScalarField::check_point(std::span<const double> x, bool second_order) const {
  if (x.size() != dim_) throw std::invalid_argument("ScalarField " + name_ + ": point dimension mismatch");
  if (singular_.origin && std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; }))
    throw std::domain_error("ScalarField " + name_ + ": evaluated at the singular origin");
  if (second_order) {
    const double r = radius(x);
    for (double b : singular_.breakpoints)
      if (std::abs(r - b) <= 4.0 * std::numeric_limits<double>::epsilon() * b)
        throw std::domain_error("ScalarField " + name_ + ": second derivatives requested on a breakpoint sphere");
  }
}

double ScalarField::value(std::span<const double> x) const {
  check_point(x, false);
  return value_(x);
}

Vector ScalarField::gradient(std::span<const double> x) const {
  check_point(x, false);
  return gradient_(x);
}

SymMatrix ScalarField::hessian(std::span<const double> x) const {
  check_point(x, true);
  return hessian_(x);
}

namespace {

HeisPoint as_heis(std::span<const double> x) {
  return HeisPoint(HeisDims(static_cast<int>((x.size() - 1) / 2)), Vector(x.begin(), x.end()));
}

}  // namespace

ScalarField field_from_profile(const RadialProfile& p) {
  Singularities sing{p.breakpoints(), true};
  const RadialProfile prof = p;
  if (p.geometry == Geometry::heisenberg) {
    const HeisDims dims(p.request.d);
    auto value = [prof](std::span<const double> x) { return prof.eval(hnorm(as_heis(x))).f; };
    auto gradient = [prof](std::span<const double> x) {
      const HeisPoint pt = as_heis(x);
      const Jet j = prof.eval(hnorm(pt));
      Vector g = euclid_grad_rho(pt);
      for (double& v : g) v *= j.fp;
      return g;
    };
    auto hessian = [prof](std::span<const double> x) {
      const HeisPoint pt = as_heis(x);
      const Jet j = prof.eval(hnorm(pt));
      const Vector g = euclid_grad_rho(pt);
      return j.fpp * outer(g) + j.fp * euclid_hessian_rho(pt);
    };
    return ScalarField(p.name, dims.n(), Geometry::heisenberg, value, gradient, hessian, sing,
                       ScalarField::Provenance::closed_form);
  }
  const auto n = static_cast<std::size_t>(p.request.d);
  auto value = [prof](std::span<const double> x) { return prof.eval(norm(x)).f; };
  auto gradient = [prof](std::span<const double> x) {
    const double r = norm(x);
    const Jet j = prof.eval(r);
    Vector g(x.begin(), x.end());
    for (double& v : g) v *= j.fp / r;
    return g;
  };
  auto hessian = [prof](std::span<const double> x) {
    // f'' xh xh^T + (f'/r)(I - xh xh^T)
    const double r = norm(x);
    const Jet j = prof.eval(r);
    Vector xh(x.begin(), x.end());
    for (double& v : xh) v /= r;
    SymMatrix h = (j.fpp - j.fp / r) * outer(xh);
    for (std::size_t i = 0; i < xh.size(); ++i) h.set(i, i, h(i, i) + j.fp / r);
    return h;
  };
  return ScalarField(p.name, n, Geometry::euclidean, value, gradient, hessian, sing,
                     ScalarField::Provenance::closed_form);
}

ScalarField horizontal_quadratic_field(HeisDims dims) {
  const std::size_t n = dims.n();
  auto value = [](std::span<const double> x) { return norm_squared(x.first(x.size() - 1)); };
  auto gradient = [](std::span<const double> x) {
    Vector g(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) g[i] = 2.0 * x[i];
    return g;
  };
  auto hessian = [n](std::span<const double>) {
    SymMatrix h(n);
    for (std::size_t i = 0; i + 1 < n; ++i) h.set(i, i, 2.0);
    return h;
  };
  return ScalarField("quadratic", n, Geometry::heisenberg, value, gradient, hessian, Singularities{},
                     ScalarField::Provenance::closed_form);
}

Vector EuclidRadialSpectrum::sorted() const {
  Vector e(static_cast<std::size_t>(tangential_multiplicity), tangential);
  e.push_back(radial);
  std::sort(e.begin(), e.end());
  return e;
}

EuclidRadialSpectrum euclid_radial_spectrum(double fp, double fpp, std::span<const double> x) {
  const double r = norm(x);
  if (x.empty() || r == 0.0) throw std::domain_error("euclid_radial_spectrum: undefined at x = 0");
  return {fpp, fp / r, static_cast<int>(x.size()) - 1};
}

}  // namespace heis::gallery
