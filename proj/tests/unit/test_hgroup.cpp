#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "heisliou/hgroup.hpp"
#include "oracles/oracles.hpp"

using namespace heis;

namespace {

HeisPoint pt(std::initializer_list<double> c) {
  return HeisPoint(HeisDims(static_cast<int>((c.size() - 1) / 2)), Vector(c));
}

HeisPoint random_point(HeisDims dims, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector x(dims.n());
  for (double& v : x) v = u(rng);
  return HeisPoint(dims, x);
}

// Euclidean derivatives of rho from the explicit formula rho^4 = |x_H|^4 + t^2.
Vector rho_grad_ref(const Vector& x) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += x[i] * x[i];
  const double t = x[n - 1];
  const double rho = std::pow(s * s + t * t, 0.25);
  Vector g(n);
  for (std::size_t i = 0; i + 1 < n; ++i) g[i] = s * x[i] / (rho * rho * rho);
  g[n - 1] = t / (2.0 * rho * rho * rho);
  return g;
}

}  // namespace

TEST_CASE("group law examples") {
  const HeisPoint z = group_mul(pt({1, 0, 0}), pt({0, 1, 0}));
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 1.0);
  CHECK(z[2] == 2.0);
  CHECK_THROWS_AS(group_mul(pt({1, 0, 0}), pt({0, 0, 0, 0, 1})), std::invalid_argument);
}

TEST_CASE("group axioms on random triples") {
  std::mt19937_64 rng(1);
  for (int d = 1; d <= 3; ++d) {
    const HeisDims dims(d);
    for (int trial = 0; trial < 1000; ++trial) {
      const HeisPoint x = random_point(dims, rng), y = random_point(dims, rng), w = random_point(dims, rng);
      const HeisPoint a = group_mul(group_mul(x, y), w);
      const HeisPoint b = group_mul(x, group_mul(y, w));
      const HeisPoint id = group_mul(x, HeisPoint::zero(dims));
      const HeisPoint inv = group_mul(x, -x);
      for (std::size_t i = 0; i < dims.n(); ++i) {
        CHECK(std::abs(a[i] - b[i]) <= 1e-12 * std::max(1.0, std::abs(a[i])));
        CHECK(id[i] == x[i]);
        CHECK(std::abs(inv[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("dilations and the homogeneous norm") {
  const HeisPoint x = dilate(2.0, pt({1, 1, 1}));
  CHECK(x[0] == 2.0);
  CHECK(x[1] == 2.0);
  CHECK(x[2] == 4.0);
  CHECK_THROWS_AS(dilate(0.0, x), std::invalid_argument);
  CHECK(hnorm(pt({1, 0, 0})) == doctest::Approx(1.0));
  CHECK(hnorm(pt({0, 0, 1})) == doctest::Approx(1.0));
  CHECK(hnorm(pt({1, 1, 1})) == doctest::Approx(std::pow(5.0, 0.25)).epsilon(1e-12));
  CHECK(hnorm(HeisPoint::zero(HeisDims(2))) == 0.0);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const HeisPoint p = random_point(HeisDims(2), rng);
    for (double lam : {0.5, 1.0, 3.0})
      CHECK(std::abs(hnorm(dilate(lam, p)) - lam * hnorm(p)) <= 1e-12 * lam * hnorm(p));
  }
}

TEST_CASE("eta") {
  const HorizontalVector e = eta(pt({1, 0, 5}));
  CHECK(e[0] == 1.0);
  CHECK(e[1] == -5.0);
  CHECK(e.norm() * e.norm() == doctest::Approx(26.0));
  const HorizontalVector z = eta(pt({0, 0, 0, 0, 3}));
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const HeisPoint p = random_point(HeisDims(3), rng);
    const double r = hnorm(p);
    const double lhs = eta(p).norm() * eta(p).norm();
    CHECK(std::abs(lhs - horizontal_norm_squared(p) * r * r * r * r) <= 1e-12 * std::max(1.0, lhs));
  }
}

TEST_CASE("frame and horizontal gradient") {
  const FrameMatrix z = frame(HeisPoint::zero(HeisDims(1)));
  CHECK(z(0, 0) == 1.0);
  CHECK(z(1, 1) == 1.0);
  CHECK(z(2, 0) == 0.0);
  CHECK(z(2, 1) == 0.0);
  const FrameMatrix f = frame(pt({1, 2, 7}));
  CHECK(f(2, 0) == 4.0);
  CHECK(f(2, 1) == -2.0);

  const Vector dt{0, 0, 1};
  const HorizontalVector g = h_gradient(dt, pt({1, 2, 0}));
  CHECK(g[0] == 4.0);
  CHECK(g[1] == -2.0);
  const HorizontalVector g1 = h_gradient(Vector{1, 0, 0}, pt({1, 2, 0}));
  CHECK(g1[0] == 1.0);
  CHECK(g1[1] == 0.0);
  CHECK_THROWS_AS(h_gradient(Vector{1, 0}, pt({1, 2, 0})), std::invalid_argument);

  // u = rho at (1, 0, 5): eta / rho^3
  const HeisPoint p = pt({1, 0, 5});
  const HorizontalVector gr = h_gradient(euclid_grad_rho(p), p);
  CHECK(gr[0] == doctest::Approx(1.0 / std::pow(26.0, 0.75)).epsilon(1e-12));
  CHECK(gr[1] == doctest::Approx(-5.0 / std::pow(26.0, 0.75)).epsilon(1e-12));
}

TEST_CASE("horizontal Hessian examples") {
  const HeisPoint p = pt({0.3, -0.7, 1.1});
  // u = x_3: the commutator part cancels after symmetrisation.
  const SymMatrix h = h_hessian(Vector{0, 0, 1}, SymMatrix(3), p);
  CHECK(h.max_abs() == 0.0);
  const Matrix raw = h_second_derivatives(Vector{0, 0, 1}, SymMatrix(3), p);
  CHECK(raw(0, 1) == -2.0);
  CHECK(raw(1, 0) == 2.0);

  // u = |x_H|^2
  const HeisPoint q = pt({0.3, -0.7, 0.2, 0.5, 1.1});
  Vector du(5, 0.0);
  SymMatrix d2(5);
  for (std::size_t i = 0; i < 4; ++i) {
    du[i] = 2.0 * q[i];
    d2.set(i, i, 2.0);
  }
  const SymMatrix hq = h_hessian(du, d2, q);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(hq(i, j) == doctest::Approx(i == j ? 2.0 : 0.0));
}

TEST_CASE("commutator [X_1, X_{1+d}] = -4 d_t on quadratic polynomials") {
  std::mt19937_64 rng(4);
  for (int d = 1; d <= 3; ++d) {
    const HeisDims dims(d);
    const std::size_t n = dims.n();
    for (int trial = 0; trial < 100; ++trial) {
      // u(x) = x^T A x / 2 + c . x
      const auto a = oracle::random_symmetric(n, rng);
      SymMatrix A(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) A.set(i, j, a[i][j]);
      const HeisPoint x = random_point(dims, rng);
      Vector c(n);
      std::normal_distribution<double> g;
      for (double& v : c) v = g(rng);
      Vector du = A.matrix() * x.coords();
      for (std::size_t i = 0; i < n; ++i) du[i] += c[i];
      const Matrix xx = h_second_derivatives(du, A, x);
      for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
        const double comm = xx(i, i + d) - xx(i + d, i);
        CHECK(std::abs(comm + 4.0 * du[n - 1]) <= 1e-12 * std::max(1.0, std::abs(du[n - 1])));
      }
    }
  }
}

TEST_CASE("unsymmetrised second derivatives agree with the vector-field definition") {
  std::mt19937_64 rng(6);
  const HeisDims dims(2);
  // u = sin(x1) x5 + x2^2 x3 + x4 x5^2
  const auto du = [](const oracle::Vec& y) {
    return oracle::Vec{std::cos(y[0]) * y[4], 2 * y[1] * y[2], y[1] * y[1], y[4] * y[4],
                       std::sin(y[0]) + 2 * y[3] * y[4]};
  };
  for (int trial = 0; trial < 20; ++trial) {
    const HeisPoint x = random_point(dims, rng, 1.0);
    const auto& y = x.coords();
    SymMatrix d2(5);
    d2.set(0, 0, -std::sin(y[0]) * y[4]);
    d2.set(0, 4, std::cos(y[0]));
    d2.set(1, 1, 2 * y[2]);
    d2.set(1, 2, 2 * y[1]);
    d2.set(3, 4, 2 * y[4]);
    d2.set(4, 4, 2 * y[3]);
    const oracle::Vec yv(y.begin(), y.end());
    const Matrix got = h_second_derivatives(du(yv), d2, x);
    const auto ref = oracle::vector_field_second_derivatives(du, yv);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(got(i, j) - ref[i][j]) <= 1e-7);
  }
}

TEST_CASE("radial gradient and Hessian against the Euclidean chain rule") {
  std::mt19937_64 rng(8);
  for (int d = 1; d <= 3; ++d) {
    const HeisDims dims(d);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const HeisPoint x = random_point(dims, rng);
      if (characteristic_ratio(x) < 1e-3) continue;
      ++checked;
      const double r = hnorm(x);
      // f = rho^3: f' = 3 rho^2, f'' = 6 rho
      const double fp = 3 * r * r, fpp = 6 * r;
      const Vector gr = euclid_grad_rho(x);
      const Vector gref = rho_grad_ref(Vector(x.coords().begin(), x.coords().end()));
      for (std::size_t i = 0; i < dims.n(); ++i) CHECK(std::abs(gr[i] - gref[i]) <= 1e-12 * std::max(1.0, std::abs(gref[i])));

      Vector du(gr);
      for (double& v : du) v *= fp;
      SymMatrix d2 = fpp * outer(gr) + fp * euclid_hessian_rho(x);
      const SymMatrix h = h_hessian(du, d2, x);
      const auto [closed, spec] = radial_h_hessian(fp, fpp, x);
      const double scale = std::max(1.0, h.max_abs());
      CHECK((h - closed).max_abs() <= 1e-10 * scale);

      const HorizontalVector g1 = h_gradient(du, x);
      const HorizontalVector g2 = radial_h_gradient(fp, x);
      for (std::size_t i = 0; i < dims.m(); ++i) CHECK(std::abs(g1[i] - g2[i]) <= 1e-10 * std::max(1.0, std::abs(g2[i])));

      const Vector num = sym_eigenvalues(closed);
      const Vector cf = spec.sorted(dims.m());
      for (std::size_t k = 0; k < dims.m(); ++k) CHECK(std::abs(num[k] - cf[k]) <= 1e-10 * scale);

      const HorizontalVector drho = radial_h_gradient(1.0, x);
      CHECK(drho.norm() * drho.norm() == doctest::Approx(horizontal_norm_squared(x) / (r * r)).epsilon(1e-12));
      CHECK(drho.norm() <= 1.0 + 1e-15);
    }
    CHECK(checked > 200);
  }
}

TEST_CASE("radial Hessian of log rho and the characteristic set") {
  const HeisPoint x = pt({0.4, -1.2, 0.3, 0.8, 2.0});
  const double r = hnorm(x);
  const double s = horizontal_norm_squared(x);
  const auto [h, spec] = radial_h_hessian(1.0 / r, -1.0 / (r * r), x);
  const double unit = s / (r * r * r * r);
  CHECK(spec.radial == doctest::Approx(-unit));
  CHECK(spec.twisted == doctest::Approx(3.0 * unit));
  CHECK(spec.tangential == doctest::Approx(unit));
  CHECK(spec.tangential_multiplicity == 2);

  const auto [h0, spec0] = radial_h_hessian(2.0, 2.0, pt({0, 0, 0, 0, 1.5}));
  CHECK(h0.max_abs() == 0.0);
  CHECK(spec0.radial == 0.0);
  CHECK_THROWS_AS(radial_h_hessian(1.0, 1.0, HeisPoint::zero(HeisDims(2))), std::domain_error);
  CHECK_THROWS_AS(radial_h_gradient(1.0, HeisPoint::zero(HeisDims(2))), std::domain_error);
  const HorizontalVector zero_fp = radial_h_gradient(0.0, x);
  CHECK(zero_fp.norm() == 0.0);
}

TEST_CASE("Euclidean gradient of rho") {
  const Vector g = euclid_grad_rho(pt({1, 0, 0}));
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);
  const Vector v = euclid_grad_rho(pt({0, 0, 0, 0, 4.0}));
  CHECK(v[4] == doctest::Approx(1.0 / (2.0 * std::sqrt(4.0))));
  CHECK_THROWS_AS(euclid_grad_rho(HeisPoint::zero(HeisDims(1))), std::domain_error);

  // Degree -1 homogeneity: |D rho| scales between layers, so compare per component.
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const HeisPoint x = random_point(HeisDims(2), rng);
    const double lam = 2.5;
    const Vector a = euclid_grad_rho(x);
    const Vector b = euclid_grad_rho(dilate(lam, x));
    for (std::size_t i = 0; i < 4; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
    CHECK(b[4] == doctest::Approx(a[4] / lam).epsilon(1e-12));
  }
}

TEST_CASE("dimension validation") {
  CHECK_THROWS_AS(HeisDims(0), std::invalid_argument);
  CHECK_THROWS_AS(HeisDims(17), std::invalid_argument);
  CHECK_NOTHROW(HeisDims(17, 32));
  CHECK_THROWS_AS(HeisPoint(HeisDims(1), Vector{1, 2}), std::invalid_argument);
}
