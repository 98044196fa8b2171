#include "heisliou/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "heisliou/hgroup.hpp"

namespace heis::check {

std::string_view to_string(SamplerKind k) { return k == SamplerKind::grid ? "grid" : "quasi"; }

SamplerKind sampler_from_string(std::string_view s) {
  if (s == "grid") return SamplerKind::grid;
  if (s == "quasi") return SamplerKind::quasi;
  throw std::invalid_argument("unknown sampler '" + std::string(s) + "' (expected grid|quasi)");
}

void Region::validate() const {
  if (!(rho_min > 0.0) || !std::isfinite(rho_min)) throw std::invalid_argument("region: rho_min must be positive");
  if (!(rho_max > rho_min) || !std::isfinite(rho_max))
    throw std::invalid_argument("region: rho_max must exceed rho_min");
  if (!(char_eps > 0.0 && char_eps < 1.0)) throw std::invalid_argument("region: char_eps must lie in (0, 1)");
  if (!(kink_eps >= 0.0)) throw std::invalid_argument("region: kink_eps must be non-negative");
  if (n_samples < 1) throw std::invalid_argument("region: n_samples must be >= 1");
  if (shells < 1) throw std::invalid_argument("region: shells must be >= 1");
}

namespace {

constexpr unsigned kPrimes[] = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,
                                47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107,
                                109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173};

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

// splitmix64; portable, so seeded shifts are identical across platforms.
std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

Vector scale_to_radius(Vector z, double target, gallery::Geometry geometry) {
  if (geometry == gallery::Geometry::euclidean) {
    const double r = norm(z);
    for (double& v : z) v *= target / r;
    return z;
  }
  const HeisDims dims(static_cast<int>((z.size() - 1) / 2));
  const HeisPoint p(dims, std::move(z));
  const HeisPoint q = dilate(target / hnorm(p), p);
  return Vector(q.coords().begin(), q.coords().end());
}

}  // namespace

std::vector<Vector> sample_points(const Region& region, gallery::Geometry geometry, std::size_t dim) {
  region.validate();
  if (dim + 1 > std::size(kPrimes)) throw std::invalid_argument("sample_points: dimension too large");
  const std::size_t shells = std::min(region.shells, region.n_samples);
  const double log_span = std::log(region.rho_max / region.rho_min);

  Vector shift(dim + 1, 0.0);
  if (region.sampler == SamplerKind::quasi) {
    std::uint64_t state = region.seed;
    for (double& s : shift) s = unit_from_bits(splitmix(state));
  }

  std::vector<Vector> pts;
  pts.reserve(region.n_samples);
  for (std::size_t i = 0; i < region.n_samples; ++i) {
    const std::size_t shell = i % shells;
    // Halton index starts at 1 so the first direction is not the zero vector.
    const std::uint64_t j = i / shells + 1;
    double radius;
    if (region.sampler == SamplerKind::grid) {
      const double frac = shells == 1 ? 0.0 : static_cast<double>(shell) / static_cast<double>(shells - 1);
      radius = region.rho_min * std::exp(frac * log_span);
    } else {
      const double u = std::fmod(radical_inverse(j, kPrimes[0]) + shift[0], 1.0);
      const double frac = (static_cast<double>(shell) + u) / static_cast<double>(shells);
      radius = region.rho_min * std::exp(frac * log_span);
    }
    Vector z(dim);
    double zn = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      z[k] = 2.0 * std::fmod(radical_inverse(j, kPrimes[k + 1]) + shift[k + 1], 1.0) - 1.0;
      zn += z[k] * z[k];
    }
    if (zn == 0.0) z[0] = 1.0;
    pts.push_back(scale_to_radius(std::move(z), radius, geometry));
  }
  return pts;
}

}  // namespace heis::check
