#pragma once

// Central-difference Hessians used to cross-check the closed-form ones.

#include <optional>
#include <span>
#include <vector>

#include "heisliou/gallery.hpp"
#include "heisliou/sampling.hpp"

namespace heis::check {

struct FdOptions {
  /// Smallest step the stencil may shrink to before giving up.
  double h_min = 1e-7;
};

struct FdResult {
  /// Horizontal Hessian on H^d, Euclidean Hessian on R^n.
  SymMatrix hessian;
  /// Horizontal gradient on H^d, Euclidean gradient on R^n.
  Vector gradient;
  SymMatrix euclid_hessian;
  Vector euclid_gradient;
  double h_used = 0.0;
  int shrinks = 0;
};

/// Gradient (f(x+h e_i) - f(x-h e_i)) / 2h and Hessian with diagonal
/// (f+ - 2f + f-)/h^2 and the four-point mixed stencil, pushed through the
/// horizontal frame for Heisenberg fields. The step is halved while any
/// stencil point would land across a declared breakpoint or too near the
/// origin. Throws std::domain_error when that happens even at h_min.
FdResult fd_h_hessian(const gallery::ScalarField& field, std::span<const double> x, double h,
                      const FdOptions& opts = {});

/// True when the stencil of step h around x stays on one smooth piece.
bool stencil_is_clean(const gallery::ScalarField& field, std::span<const double> x, double h);

struct ConvergenceLevel {
  double h = 0.0;
  double max_error = 0.0;
  /// log2(error at previous level / error here); empty on the first level.
  std::optional<double> order;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  std::size_t n_samples = 0;
  std::size_t n_used = 0;
  /// Samples whose stencil at h0 would not be clean, or inside the characteristic tube.
  std::size_t n_excluded = 0;
  /// Stencils that crossed a singular set. Zero by construction; kept as a policy check.
  std::size_t stencil_crossings = 0;
  /// max over levels of max_error / h^2.
  double c_estimate = 0.0;
  Region region;
  double wall_time_s = 0.0;
};

/// Per level k (h = h0 / 2^k) the max entrywise |analytic - FD| over the
/// admissible samples of `region`. Requires levels >= 2.
ConvergenceReport convergence_study(const gallery::ScalarField& field, const Region& region, double h0, int levels,
                                    const FdOptions& opts = {});

}  // namespace heis::check
