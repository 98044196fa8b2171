#pragma once

// Sampled checks of the Liouville sufficient conditions built on the
// Lyapunov function w = log rho. Every condition is of the form "holds for rho
// large", so besides the verdict on [rho_min, rho_max] the report carries a
// scan over a geometric ladder of radii R.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heisliou/checker.hpp"
#include "heisliou/hgroup.hpp"
#include "heisliou/operators.hpp"

namespace heis::check {

enum class Condition { condcor1, condcor1bis, condcor1p, outype, schrodinger };
enum class SchrodingerVariant { sign, order };

std::string_view to_string(Condition c);
std::string_view to_string(SchrodingerVariant v);
Condition condition_from_string(std::string_view s);
SchrodingerVariant variant_from_string(std::string_view s);

/// G(x,r,p) >= -bbar.p - g|p| + cbar r
struct GradientNormData {
  ops::VectorCoefficient bbar;
  ops::ScalarCoefficient g;
  ops::ScalarCoefficient cbar;
};

struct LyapunovData {
  Condition condition = Condition::condcor1;
  /// HJB family: horizontal drifts for condcor1/condcor1p, Euclidean for outype/schrodinger.
  std::optional<ops::HJBCoefficients> family;
  /// condcor1bis only.
  std::optional<GradientNormData> gradient_norm;
  /// outype only: gamma_1..gamma_{2d+1}, all positive.
  Vector gamma;
  /// condcor1p only: the parameter of P^-_alpha.
  double alpha = 0.0;
  SchrodingerVariant variant = SchrodingerVariant::sign;
};

struct MarginTerm {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs - lhs; the component holds when margin >= -allowed (or > allowed when strict).
  double margin = 0.0;
  double allowed = 0.0;
  bool strict = false;
  bool holds() const { return strict ? margin > allowed : margin >= -allowed; }
};

struct LyapunovSample {
  Vector x;
  double radius = 0.0;
  double char_ratio = 0.0;
  std::vector<MarginTerm> terms;
  /// sup_alpha |b^alpha| / rho, recorded for the order variant.
  std::optional<double> order_ratio;
  double margin() const;
  bool holds() const;
};

struct ScanRow {
  double R = 0.0;
  /// Samples with rho >= R.
  std::size_t n = 0;
  std::optional<double> worst_margin;
  /// Largest sup|b|/rho over the shell [R, next R); order variant only.
  std::optional<double> shell_order_max;
  bool holds = false;
};

struct LyapunovReport {
  Condition condition = Condition::condcor1;
  Verdict verdict = Verdict::vacuous;
  std::optional<double> worst_margin;
  std::optional<LyapunovSample> witness;
  std::size_t n_samples = 0;
  std::size_t n_evaluated = 0;
  ExclusionCounts excluded;
  std::size_t n_failed = 0;
  std::vector<ScanRow> scan;
  /// Smallest scanned R from which the condition holds on every sample.
  std::optional<double> threshold_R;
  std::string note;
  Region region;
  Tolerance tol;
  double wall_time_s = 0.0;

  std::size_t n_excluded() const { return excluded.total(); }
};

struct LyapunovOptions {
  Tolerance tol;
  unsigned threads = 0;
  std::size_t rungs = 8;
  double rung_factor = 2.0;
};

/// Throws std::invalid_argument when the data required by the condition is
/// missing or has the wrong shape.
LyapunovReport check_lyapunov(const LyapunovData& data, HeisDims dims, const ops::Ellipticity& e,
                              const Region& region, const LyapunovOptions& opts = {});

}  // namespace heis::check
