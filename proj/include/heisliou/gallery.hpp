#pragma once

// Closed-form radial profiles f(r) and the scalar fields f(rho(x)) or f(|x|)
// built from them, with exact first and second Euclidean derivatives.
//
// The counterexample profiles share one shape, parameterised by an exponent a
// and a sign s:
//   r < 1 :  s/8 [a(a-2) r^4 - 2(a^2-4) r^2 + a(a+2)]
//   r >= 1:  s r^{2-a}
// Across r = 1 value s, slope s(2-a) and curvature s(a-1)(a-2) all match;
// the third derivative jumps.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heisliou/hgroup.hpp"
#include "heisliou/linalg.hpp"

namespace heis::gallery {

/// Which radial coordinate a profile is composed with.
enum class Geometry { heisenberg, euclidean };

std::string_view to_string(Geometry g);

struct Jet {
  double f;
  double fp;
  double fpp;
};

struct ProfilePiece {
  double lo;  // piece covers [lo, hi)
  double hi;
  std::function<Jet(double)> eval;
};

struct ProfileRequest {
  std::string name;
  double lambda = 1.0;
  double Lambda = 1.0;
  /// Heisenberg d for Heisenberg profiles, Euclidean space dimension otherwise.
  int d = 1;
  /// Exponent for the generic "power" profile.
  std::optional<double> kappa;
};

struct RadialProfile {
  std::string name;
  Geometry geometry = Geometry::heisenberg;
  ProfileRequest request;
  double exponent = 0.0;  // a for the counterexamples, Q for folland, kappa for power
  std::vector<ProfilePiece> pieces;
  bool bounded_above = false;
  bool bounded_below = false;
  /// f itself is undefined at r = 0 (log, negative powers).
  bool singular_at_origin = false;

  Jet eval(double r) const;
  std::vector<double> breakpoints() const;
};

/// Builds a named profile. Throws std::invalid_argument for unknown names and
/// for parameter regimes where the profile is not the intended counterexample
/// (e.g. u4 with a <= 2).
RadialProfile make_profile(const ProfileRequest& req);

struct ProfileInfo {
  std::string name;
  Geometry geometry;
  std::string formula;
  std::string regime;
  std::string default_operator;
  std::string default_sense;
};

/// Every shipped profile with its formula and validity regime.
const std::vector<ProfileInfo>& profile_catalog();
const ProfileInfo& profile_info(std::string_view name);

// ----- fields -----

struct Singularities {
  /// Radii (in the field's radial coordinate) where the piecewise formula switches.
  std::vector<double> breakpoints;
  bool origin = false;
};

class ScalarField {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<Vector(std::span<const double>)>;
  using HessianFn = std::function<SymMatrix(std::span<const double>)>;

  enum class Provenance { closed_form, user };

  ScalarField(std::string name, std::size_t dim, Geometry geometry, ValueFn value, GradientFn gradient,
              HessianFn hessian, Singularities singular, Provenance provenance);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  Geometry geometry() const { return geometry_; }
  const Singularities& singularities() const { return singular_; }
  Provenance provenance() const { return provenance_; }
  /// Heisenberg dimensions; only valid for Heisenberg geometry.
  HeisDims heis_dims() const;

  /// rho(x) or |x|.
  double radius(std::span<const double> x) const;
  /// Distance in the radial coordinate to the nearest breakpoint (inf when none).
  double kink_distance(std::span<const double> x) const;

  double value(std::span<const double> x) const;
  Vector gradient(std::span<const double> x) const;
  /// Throws std::domain_error on a breakpoint or at the origin when declared singular.
  SymMatrix hessian(std::span<const double> x) const;

  const ValueFn& value_fn() const { return value_; }

 private:
  void check_point(std::span<const double> x, bool second_order) const;

  std::string name_;
  std::size_t dim_;
  Geometry geometry_;
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  Singularities singular_;
  Provenance provenance_;
};

/// f(rho(x)) on R^{2d+1} or f(|x|) on R^d, with chain-rule derivatives.
ScalarField field_from_profile(const RadialProfile& p);

/// u = |x_H|^2, a smooth quadratic on H^d (horizontal Hessian 2I).
ScalarField horizontal_quadratic_field(HeisDims dims);

struct EuclidRadialSpectrum {
  double radial;      // f''(|x|), simple
  double tangential;  // f'(|x|)/|x|, multiplicity n-1
  int tangential_multiplicity;

  Vector sorted() const;
};

/// Spectrum of the Euclidean Hessian of f(|x|) at x != 0.
EuclidRadialSpectrum euclid_radial_spectrum(double fp, double fpp, std::span<const double> x);

}  // namespace heis::gallery
