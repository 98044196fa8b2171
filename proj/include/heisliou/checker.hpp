#pragma once

// Sampled verification of pointwise sub/supersolution inequalities
//   F(u) = S((D^2_X u)*) + H(x, u, grad u)   with   F <= 0 (sub) or F >= 0 (super)
// on a region of H^d or R^n, minus the characteristic tube and kink shells.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heisliou/gallery.hpp"
#include "heisliou/operators.hpp"
#include "heisliou/sampling.hpp"

namespace heis::check {

enum class SecondOrder { pucci_max, pucci_min, pucci_plus_alpha, pucci_minus_alpha, pnorm, neg_trace };
enum class Envelope { inf, sup };
enum class Sense { subsolution, supersolution };
enum class Verdict { pass, fail, vacuous };

std::string_view to_string(SecondOrder s);
std::string_view to_string(Envelope e);
std::string_view to_string(Sense s);
std::string_view to_string(Verdict v);
SecondOrder second_order_from_string(std::string_view s);
Envelope envelope_from_string(std::string_view s);
Sense sense_from_string(std::string_view s);

struct FirstOrder {
  ops::HJBCoefficients coeffs;
  Envelope side = Envelope::inf;
};

struct OperatorSpec {
  SecondOrder second_order = SecondOrder::neg_trace;
  double lambda = 1.0;  // pucci_max / pucci_min
  double Lambda = 1.0;
  double alpha = 0.0;   // pucci_plus_alpha / pucci_minus_alpha
  double p = 2.0;       // pnorm
  std::optional<FirstOrder> first_order;
  ops::GradientSpace gradient_space = ops::GradientSpace::horizontal;
  Sense sense = Sense::subsolution;

  /// Checks parameters for Hessians of size m; throws std::invalid_argument.
  void validate(std::size_t m) const;
};

struct Tolerance {
  double rel = 1e-9;
  double abs_floor = 1e-12;

  /// max(abs_floor, rel * max(1, magnitude))
  double allowed(double magnitude) const;
};

/// Second-order part on a Hessian with known ascending spectrum `eig`.
/// `grad` is only read by pnorm.
double apply_second_order(const OperatorSpec& spec, const SymMatrix& hess, std::span<const double> eig,
                          std::span<const double> grad);

struct SampleRecord {
  Vector x;
  double radius = 0.0;
  double char_ratio = 0.0;
  double u = 0.0;
  double second_order = 0.0;
  double first_order = 0.0;
  double value = 0.0;
  /// value for subsolutions, -value for supersolutions; positive means violated.
  double excess = 0.0;
  double allowed = 0.0;
  Vector eigenvalues;
};

struct ExclusionCounts {
  std::size_t tube = 0;
  std::size_t kink = 0;
  std::size_t origin = 0;
  std::size_t total() const { return tube + kink + origin; }
};

struct CheckReport {
  Verdict verdict = Verdict::vacuous;
  /// Largest signed excess over evaluated samples; empty when vacuous.
  std::optional<double> worst_violation;
  /// The sample attaining worst_violation. Present whenever anything was evaluated.
  std::optional<SampleRecord> witness;
  std::size_t n_samples = 0;
  std::size_t n_evaluated = 0;
  ExclusionCounts excluded;
  std::size_t n_failed = 0;
  Region region;
  Tolerance tol;
  double wall_time_s = 0.0;
  /// Every evaluated sample in sampling order, when requested.
  std::vector<SampleRecord> samples;

  std::size_t n_excluded() const { return excluded.total(); }
};

struct CheckOptions {
  Tolerance tol;
  bool keep_samples = false;
  /// 0 picks HEIS_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

unsigned resolve_threads(unsigned requested);

CheckReport check_inequality(const gallery::ScalarField& field, const OperatorSpec& spec, const Region& region,
                             const CheckOptions& opts = {});

/// A user field given pointwise: value, Euclidean gradient and Hessian at x.
struct TabulatedSample {
  Vector x;
  double u = 0.0;
  Vector du;
  SymMatrix d2u;
};

/// Parses CSV rows "x_1..x_n, u, Du_1..Du_n, D2u upper triangle row-major".
/// A first line that does not parse as numbers is taken as a header.
std::vector<TabulatedSample> parse_tabulated_csv(std::string_view text, std::size_t n);

/// check_inequality on tabulated data; region supplies only the exclusion
/// thresholds (rho range, char_eps) and is echoed in the report.
CheckReport check_tabulated(const std::vector<TabulatedSample>& data, gallery::Geometry geometry,
                            const OperatorSpec& spec, const Region& region, const CheckOptions& opts = {});

}  // namespace heis::check
