#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "heisliou/gallery.hpp"
#include "heisliou/linalg.hpp"

namespace heis::check {

enum class SamplerKind { grid, quasi };

std::string_view to_string(SamplerKind k);
SamplerKind sampler_from_string(std::string_view s);

/// Sampling region in the radial coordinate of a field (rho on H^d, |x| on R^n).
struct Region {
  double rho_min = 0.05;
  double rho_max = 5.0;
  /// Points with |x_H|/rho < char_eps are excluded from Heisenberg checks.
  double char_eps = 1e-3;
  /// Points within kink_eps of a breakpoint radius are excluded.
  double kink_eps = 1e-6;
  SamplerKind sampler = SamplerKind::quasi;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 1;
  /// Number of geometric radial shells the samples are stratified over.
  std::size_t shells = 16;

  void validate() const;
};

/// Deterministic sample set for `region` in R^dim. Samples are stratified
/// round-robin over geometric radial shells; directions come from a Halton
/// sequence (Cranley-Patterson shifted by the seed for the quasi sampler) and
/// are scaled to the target radius by Heisenberg dilation or Euclidean scaling.
std::vector<Vector> sample_points(const Region& region, gallery::Geometry geometry, std::size_t dim);

}  // namespace heis::check
