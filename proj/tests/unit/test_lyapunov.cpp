#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "heisliou/hgroup.hpp"
#include "heisliou/lyapunov.hpp"

using namespace heis;
using namespace heis::check;

namespace {

ops::HJBCoefficients family(ops::VectorCoefficient b, double c, ops::GradientSpace space) {
  return ops::HJBCoefficients({{std::move(b), [c](std::span<const double>) { return c; }}}, space);
}

ops::VectorCoefficient zero_drift(std::size_t n) {
  return [n](std::span<const double>) { return Vector(n, 0.0); };
}

// -gamma eta(x)
ops::VectorCoefficient eta_drift(double gamma) {
  return [gamma](std::span<const double> x) {
    const HorizontalVector e = eta(HeisPoint(HeisDims(static_cast<int>((x.size() - 1) / 2)), Vector(x.begin(), x.end())));
    Vector v(e.entries().begin(), e.entries().end());
    for (double& c : v) c *= -gamma;
    return v;
  };
}

Region lregion(std::size_t n = 1024) {
  Region r;
  r.rho_min = 10.0;
  r.rho_max = 2560.0;
  r.n_samples = n;
  return r;
}

LyapunovData data_for(Condition c) {
  LyapunovData d;
  d.condition = c;
  return d;
}

}  // namespace

TEST_CASE("condcor1: zero coefficients fail everywhere") {
  for (int d = 1; d <= 3; ++d) {
    const HeisDims dims(d);
    LyapunovData data = data_for(Condition::condcor1);
    data.family = family(zero_drift(dims.m()), 0.0, ops::GradientSpace::horizontal);
    const LyapunovReport rep = check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), lregion(512));
    CHECK(rep.verdict == Verdict::fail);
    CHECK(rep.n_failed == rep.n_evaluated);
    CHECK_FALSE(rep.threshold_R.has_value());
    CHECK(*rep.worst_margin == doctest::Approx(1.0 - 2.0 * (2 * d + 1)));
    CHECK(rep.scan.size() == 8);
    CHECK(rep.scan[7].R == 1280.0);
  }
}

TEST_CASE("condcor1: eta drift passes exactly above the quartic threshold") {
  const HeisDims dims(1);
  const ops::Ellipticity e(1.0, 2.0);
  const double gamma0 = (2.0 * 3.0 - 1.0) / std::pow(10.0, 4);
  LyapunovData good = data_for(Condition::condcor1);
  good.family = family(eta_drift(1.01 * gamma0), 0.0, ops::GradientSpace::horizontal);
  const LyapunovReport ok = check_lyapunov(good, dims, e, lregion());
  CHECK(ok.verdict == Verdict::pass);
  CHECK(ok.threshold_R == 10.0);

  LyapunovData bad = good;
  bad.family = family(eta_drift(0.5 * gamma0), 0.0, ops::GradientSpace::horizontal);
  const LyapunovReport no = check_lyapunov(bad, dims, e, lregion());
  CHECK(no.verdict == Verdict::fail);
  // Fails only below rho = 10 * 2^{1/4}; later rungs hold.
  CHECK(no.witness->radius < 10.0 * std::pow(2.0, 0.25));
  REQUIRE(no.threshold_R.has_value());
  CHECK(*no.threshold_R == 20.0);
}

TEST_CASE("condcor1 with a zeroth-order term and the tube exclusion") {
  const HeisDims dims(1);
  LyapunovData data = data_for(Condition::condcor1);
  data.family = family(zero_drift(2), 1.0, ops::GradientSpace::horizontal);
  Region r = lregion();
  r.char_eps = 0.3;
  const LyapunovReport rep = check_lyapunov(data, dims, ops::Ellipticity(1.0, 1.0), r);
  CHECK(rep.verdict == Verdict::pass);
  CHECK(rep.excluded.tube > 0);
  CHECK(rep.n_evaluated + rep.n_excluded() == rep.n_samples);
  CHECK(rep.note.find("[10, 2560]") != std::string::npos);
}

TEST_CASE("condcor1bis") {
  const HeisDims dims(2);
  LyapunovData data = data_for(Condition::condcor1bis);
  data.gradient_norm = GradientNormData{zero_drift(4), [](std::span<const double>) { return 0.0; },
                                        [](std::span<const double>) { return 1.0; }};
  CHECK(check_lyapunov(data, dims, ops::Ellipticity(1.0, 1.0), lregion()).verdict == Verdict::pass);
  data.gradient_norm->g = [](std::span<const double>) { return 5.0; };
  data.gradient_norm->cbar = [](std::span<const double>) { return 0.0; };
  CHECK(check_lyapunov(data, dims, ops::Ellipticity(1.0, 1.0), lregion()).verdict == Verdict::fail);
  data.gradient_norm->bbar = zero_drift(5);
  CHECK_THROWS_AS(check_lyapunov(data, dims, ops::Ellipticity(1.0, 1.0), lregion(8)), std::invalid_argument);
}

TEST_CASE("condcor1p") {
  const HeisDims dims(2);
  LyapunovData data = data_for(Condition::condcor1p);
  data.alpha = 1.0 / 8.0;
  data.family = family(zero_drift(4), 0.0, ops::GradientSpace::horizontal);
  const LyapunovReport zero = check_lyapunov(data, dims, ops::Ellipticity(1.0, 1.0), lregion());
  CHECK(zero.verdict == Verdict::fail);
  CHECK(*zero.worst_margin == doctest::Approx(-2.0));
  data.family = family(zero_drift(4), 1.0, ops::GradientSpace::horizontal);
  CHECK(check_lyapunov(data, dims, ops::Ellipticity(1.0, 1.0), lregion()).verdict == Verdict::pass);
  data.alpha = 0.5;
  CHECK_THROWS_AS(check_lyapunov(data, dims, ops::Ellipticity(1.0, 1.0), lregion(8)), std::invalid_argument);
}

TEST_CASE("outype") {
  const HeisDims dims(1);
  LyapunovData data = data_for(Condition::outype);
  data.gamma = Vector(3, 1.0);
  data.family = family(
      [](std::span<const double> x) {
        Vector v(x.begin(), x.end());
        for (double& c : v) c = -c;
        return v;
      },
      0.0, ops::GradientSpace::euclidean);
  const LyapunovReport rep = check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), lregion());
  CHECK(rep.verdict == Verdict::pass);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->terms.size() == 2);
  CHECK(rep.witness->terms[0].name == "outype");
  CHECK(rep.witness->terms[1].name == "supersolution");
  CHECK(rep.excluded.tube == 0);

  // A drift pushing outward violates the OU-type bound.
  data.family = family([](std::span<const double> x) { return Vector(x.begin(), x.end()); }, 0.0,
                       ops::GradientSpace::euclidean);
  CHECK(check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), lregion()).verdict == Verdict::fail);

  data.gamma = Vector(2, 1.0);
  CHECK_THROWS_AS(check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), lregion(8)), std::invalid_argument);
  data.gamma = Vector{1.0, 0.0, 1.0};
  CHECK_THROWS_AS(check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), lregion(8)), std::invalid_argument);
}

TEST_CASE("schrodinger, sign variant") {
  const HeisDims dims(1);
  LyapunovData data = data_for(Condition::schrodinger);
  data.family = family(zero_drift(3), 1.0, ops::GradientSpace::euclidean);
  Region r = lregion();
  r.char_eps = 0.3;
  const LyapunovReport rep = check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), r);
  CHECK(rep.verdict == Verdict::pass);
  CHECK(rep.excluded.tube == 0);
  CHECK(rep.witness->terms[0].name == "c_a");
  CHECK(rep.witness->terms[1].name == "sign");

  data.family = family(zero_drift(3), 0.0, ops::GradientSpace::euclidean);
  CHECK(check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), lregion()).verdict == Verdict::fail);
}

TEST_CASE("schrodinger, order variant") {
  const HeisDims dims(1);
  LyapunovData data = data_for(Condition::schrodinger);
  data.variant = SchrodingerVariant::order;
  data.family = family([](std::span<const double>) { return Vector{1.0, -1.0, 0.5}; }, 1.0,
                       ops::GradientSpace::euclidean);
  const LyapunovReport ok = check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), lregion());
  CHECK(ok.verdict == Verdict::pass);
  for (std::size_t k = 1; k < ok.scan.size(); ++k)
    if (ok.scan[k].shell_order_max && ok.scan[k - 1].shell_order_max)
      CHECK(*ok.scan[k].shell_order_max < *ok.scan[k - 1].shell_order_max);

  // |b| ~ rho^2 along the vertical direction: sup|b|/rho grows.
  data.family = family([](std::span<const double> x) { return Vector(x.begin(), x.end()); }, 1.0,
                       ops::GradientSpace::euclidean);
  const LyapunovReport no = check_lyapunov(data, dims, ops::Ellipticity(1.0, 2.0), lregion());
  CHECK(no.verdict == Verdict::fail);
  CHECK(no.n_failed == 0);
}

TEST_CASE("missing or mismatched data is rejected") {
  const HeisDims dims(1);
  const ops::Ellipticity e(1.0, 1.0);
  CHECK_THROWS_AS(check_lyapunov(data_for(Condition::condcor1), dims, e, lregion(8)), std::invalid_argument);
  CHECK_THROWS_AS(check_lyapunov(data_for(Condition::condcor1bis), dims, e, lregion(8)), std::invalid_argument);
  CHECK_THROWS_AS(check_lyapunov(data_for(Condition::schrodinger), dims, e, lregion(8)), std::invalid_argument);
  LyapunovData wrong = data_for(Condition::condcor1);
  wrong.family = family(zero_drift(3), 0.0, ops::GradientSpace::euclidean);
  CHECK_THROWS_AS(check_lyapunov(wrong, dims, e, lregion(8)), std::invalid_argument);
  LyapunovData ok = data_for(Condition::condcor1);
  ok.family = family(zero_drift(2), 0.0, ops::GradientSpace::horizontal);
  LyapunovOptions opts;
  opts.rung_factor = 1.0;
  CHECK_THROWS_AS(check_lyapunov(ok, dims, e, lregion(8), opts), std::invalid_argument);
  CHECK(condition_from_string("outype") == Condition::outype);
  CHECK_THROWS_AS(condition_from_string("cond9"), std::invalid_argument);
  CHECK_THROWS_AS(variant_from_string("size"), std::invalid_argument);
}
