// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//   acceptance [--work-dir DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heisliou/checker.hpp"
#include "heisliou/cli.hpp"
#include "heisliou/finite_diff.hpp"
#include "heisliou/gallery.hpp"
#include "heisliou/hgroup.hpp"
#include "heisliou/lyapunov.hpp"
#include "heisliou/operators.hpp"
#include "oracles/oracles.hpp"

namespace fs = std::filesystem;
using namespace heis;
using heis::check::CheckReport;
using heis::check::OperatorSpec;
using heis::check::Region;
using heis::check::SecondOrder;
using heis::check::Sense;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

gallery::ScalarField make_field(const std::string& name, int d, double l, double L) {
  gallery::ProfileRequest r;
  r.name = name;
  r.d = d;
  r.lambda = l;
  r.Lambda = L;
  return gallery::field_from_profile(gallery::make_profile(r));
}

OperatorSpec op(SecondOrder s, double l, double L, Sense sense) {
  OperatorSpec spec;
  spec.second_order = s;
  spec.lambda = l;
  spec.Lambda = L;
  spec.sense = sense;
  return spec;
}

CheckReport sampled(const gallery::ScalarField& f, const OperatorSpec& spec, std::size_t n) {
  Region r;
  r.n_samples = n;
  check::CheckOptions o;
  o.keep_samples = true;
  return check::check_inequality(f, spec, r, o);
}

// |x_H|^2 / rho^4 straight from the coordinates.
double s_over_rho4(const Vector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += x[i] * x[i];
  const double t = x.back();
  return s / (s * s + t * t);
}

// ----- 1, 2: closed forms for log rho -----

Outcome log_rho_formula(bool trace_normalised) {
  double worst = 0.0;
  std::size_t fewest = SIZE_MAX;
  int runs = 0;
  for (int d = 1; d <= 3; ++d) {
    const std::vector<std::pair<double, double>> ell =
        trace_normalised ? std::vector<std::pair<double, double>>{{1.0, 1.0}}
                         : std::vector<std::pair<double, double>>{{1.0, 1.0}, {1.0, 2.0}, {1.0, 5.0}};
    for (const auto& [l, L] : ell) {
      OperatorSpec spec = op(SecondOrder::pucci_min, l, L, Sense::subsolution);
      const double alpha = 1.0 / (4.0 * d);
      double coef = l - L * (2.0 * d + 1.0);
      if (trace_normalised) {
        spec.second_order = SecondOrder::pucci_minus_alpha;
        spec.alpha = alpha;
        coef = 4.0 * d * alpha - 3.0;
      }
      const CheckReport rep = sampled(make_field("log_rho", d, l, L), spec, 10200);
      fewest = std::min(fewest, rep.n_evaluated);
      ++runs;
      for (const auto& s : rep.samples) {
        const double ref = coef * s_over_rho4(s.x);
        worst = std::max(worst, std::abs(s.second_order - ref) / std::abs(ref));
      }
    }
  }
  return {worst <= 1e-9 && fewest >= 10000,
          fmt("%d configurations, >= %zu admissible samples each, max relative error %.3g (limit 1e-9)", runs, fewest,
              worst)};
}

// ----- 3-6: counterexamples -----

struct SignScan {
  double max_value = -INFINITY;
  double min_value = INFINITY;
  double max_abs_outer = 0.0;  // over radius >= 1
  double max_inner = -INFINITY;
  double min_inner = INFINITY;
  std::size_t n = 0;
};

SignScan scan(const CheckReport& rep) {
  SignScan s;
  s.n = rep.n_evaluated;
  for (const auto& r : rep.samples) {
    s.max_value = std::max(s.max_value, r.value);
    s.min_value = std::min(s.min_value, r.value);
    if (r.radius >= 1.0) {
      s.max_abs_outer = std::max(s.max_abs_outer, std::abs(r.value));
    } else {
      s.max_inner = std::max(s.max_inner, r.value);
      s.min_inner = std::min(s.min_inner, r.value);
    }
  }
  return s;
}

Outcome u4_check() {
  const auto f = make_field("u4", 2, 1.0, 2.0);
  const double a = gallery::make_profile({"u4", 1.0, 2.0, 2, {}}).exponent;
  const SignScan s = scan(sampled(f, op(SecondOrder::pucci_max, 1.0, 2.0, Sense::subsolution), 10000));
  return {std::abs(a - 3.5) < 1e-15 && s.max_value <= 1e-9 && s.max_abs_outer <= 1e-8 && s.n > 9000,
          fmt("exponent %.3g, %zu samples, max M+ %.3g, max |M+| on rho>=1 %.3g", a, s.n, s.max_value,
              s.max_abs_outer)};
}

Outcome u5_check() {
  const auto f = make_field("u5", 2, 1.0, 2.0);
  const double b = gallery::make_profile({"u5", 1.0, 2.0, 2, {}}).exponent;
  const SignScan s = scan(sampled(f, op(SecondOrder::pucci_max, 1.0, 2.0, Sense::supersolution), 10000));
  return {std::abs(b - 11.0) < 1e-15 && s.min_value >= -1e-9 && s.max_abs_outer <= 1e-8 && s.n > 9000,
          fmt("exponent %.3g, %zu samples, min M+ %.3g, max |M+| on rho>=1 %.3g", b, s.n, s.min_value,
              s.max_abs_outer)};
}

Outcome u_tilde_check() {
  bool ok = true;
  std::string detail;
  for (int d : {1, 2}) {
    OperatorSpec spec;
    spec.second_order = SecondOrder::neg_trace;
    spec.sense = Sense::supersolution;
    const SignScan s = scan(sampled(make_field("u_tilde", d, 1.0, 1.0), spec, 10000));
    ok = ok && s.min_inner >= -1e-10 && s.max_abs_outer <= 1e-9 && s.n > 9000;
    detail += fmt("d=%d: min inner %.3g, max |outer| %.3g; ", d, s.min_inner, s.max_abs_outer);
  }
  return {ok, detail};
}

Outcome euclid_check() {
  bool ok = true;
  std::string detail;
  const auto run = [&](const char* name, int d, double L, Sense sense) {
    OperatorSpec spec = op(SecondOrder::pucci_max, 1.0, L, sense);
    spec.gradient_space = ops::GradientSpace::euclidean;
    const SignScan s = scan(sampled(make_field(name, d, 1.0, L), spec, 10000));
    const bool good = sense == Sense::supersolution ? s.min_value >= -1e-9 : s.max_value <= 1e-9;
    ok = ok && good && s.n > 9000;
    detail += fmt("%s d=%d Lambda=%g: %s %.3g; ", name, d, L, sense == Sense::supersolution ? "min" : "max",
                  sense == Sense::supersolution ? s.min_value : s.max_value);
  };
  run("u2", 3, 2.0, Sense::supersolution);
  run("u3", 4, 2.0, Sense::subsolution);
  run("u3", 3, 1.5, Sense::subsolution);
  int rejected = 0;
  for (double L : {2.0, 3.0}) {
    try {
      (void)gallery::make_profile({"u3", 1.0, L, 3, {}});
    } catch (const std::invalid_argument&) {
      ++rejected;
    }
  }
  ok = ok && rejected == 2;
  detail += fmt("u3 d=3 outside regime rejected %d/2", rejected);
  return {ok, detail};
}

// ----- 7, 8: operator algebra -----

SymMatrix to_sym(const oracle::Mat& a) {
  SymMatrix m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i; j < a.size(); ++j) m.set(i, j, a[i][j]);
  return m;
}

Outcome pucci_oracle() {
  std::mt19937_64 rng(20240);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_oracle = 0.0, worst_dom = -INFINITY;
  const int n_mats = 1000, n_feasible = 10000;
  for (int k = 0; k < n_mats; ++k) {
    const std::size_t m = 2 + static_cast<std::size_t>(k % 5);
    const auto a = oracle::random_symmetric(m, rng);
    const double l = 0.2 + 1.8 * u(rng);
    const double L = l * (1.0 + 4.0 * u(rng));
    const ops::Ellipticity e(l, L);
    const SymMatrix s = to_sym(a);
    const double hi = ops::pucci_max(e, s), lo = ops::pucci_min(e, s);
    const double bhi = oracle::brute_force_pucci(a, l, L, true), blo = oracle::brute_force_pucci(a, l, L, false);
    worst_oracle = std::max({worst_oracle, std::abs(hi - bhi) / std::max(1.0, std::abs(bhi)),
                             std::abs(lo - blo) / std::max(1.0, std::abs(blo))});
    // Random feasible A = R diag(c) R^T; R follows a random walk of Givens rotations.
    oracle::Mat r = oracle::random_orthogonal(m, rng);
    oracle::Vec c(m);
    for (int j = 0; j < n_feasible; ++j) {
      for (int g = 0; g < 3; ++g) {
        const std::size_t p = rng() % m, q = (p + 1 + rng() % (m - 1)) % m;
        const double th = 2.0 * std::numbers::pi * u(rng), cs = std::cos(th), sn = std::sin(th);
        for (std::size_t i = 0; i < m; ++i) {
          const double x = r[p][i], y = r[q][i];
          r[p][i] = cs * x - sn * y;
          r[q][i] = sn * x + cs * y;
        }
      }
      double v = 0.0;
      for (std::size_t i = 0; i < m; ++i) v -= (l + (L - l) * u(rng)) * oracle::quad(a, r[i]);
      const double scale = std::max(1.0, std::abs(v));
      worst_dom = std::max({worst_dom, (v - hi) / scale, (lo - v) / scale});
    }
  }
  return {worst_oracle <= 1e-10 && worst_dom <= 1e-10,
          fmt("%d matrices: max |formula - brute force| %.3g; %d feasible A each, worst excess %.3g", n_mats,
              worst_oracle, n_feasible, worst_dom)};
}

Outcome operator_algebra() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int cases = 1000;
  int fails[6] = {0, 0, 0, 0, 0, 0};
  const char* names[6] = {"duality", "sandwich", "homogeneity", "monotonicity", "collapse", "P-vs-M"};
  for (int k = 0; k < cases; ++k) {
    const std::size_t m = 2 + static_cast<std::size_t>(k % 5);
    const SymMatrix x = to_sym(oracle::random_symmetric(m, rng));
    const SymMatrix y = to_sym(oracle::random_symmetric(m, rng));
    const double l = 0.1 + 2.0 * u(rng), L = l * (1.0 + 3.0 * u(rng));
    const ops::Ellipticity e(l, L);
    const double tol = 1e-12 * (1.0 + L * (x.frobenius_norm() + y.frobenius_norm()));
    const double alpha = (0.05 + 0.95 * u(rng)) / static_cast<double>(m);
    const ops::PucciAlpha pa(alpha, m);

    if (std::abs(ops::pucci_min(e, x) + ops::pucci_max(e, -x)) > tol ||
        std::abs(ops::pucci_minus_alpha(pa, x) + ops::pucci_plus_alpha(pa, -x)) > tol)
      ++fails[0];

    const double a1 = ops::pucci_min(e, x) + ops::pucci_min(e, y), a2 = ops::pucci_min(e, x + y),
                 a3 = ops::pucci_min(e, x) + ops::pucci_max(e, y), a4 = ops::pucci_max(e, x + y),
                 a5 = ops::pucci_max(e, x) + ops::pucci_max(e, y);
    if (a1 > a2 + tol || a2 > a3 + tol || a3 > a4 + tol || a4 > a5 + tol) ++fails[1];

    const double t = 0.01 + 10.0 * u(rng);
    if (std::abs(ops::pucci_max(e, t * x) - t * ops::pucci_max(e, x)) > t * tol ||
        std::abs(ops::pucci_min(e, t * x) - t * ops::pucci_min(e, x)) > t * tol)
      ++fails[2];

    oracle::Mat b = oracle::random_symmetric(m, rng);
    SymMatrix psd(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < m; ++q) s += b[i][q] * b[j][q];
        psd.set(i, j, s);
      }
    const double mtol = tol * (1.0 + psd.frobenius_norm());
    if (ops::pucci_max(e, x + psd) > ops::pucci_max(e, x) + mtol ||
        ops::pucci_min(e, x + psd) > ops::pucci_min(e, x) + mtol ||
        ops::pucci_plus_alpha(pa, x + psd) > ops::pucci_plus_alpha(pa, x) + mtol)
      ++fails[3];

    const ops::Ellipticity flat(l, l);
    if (std::abs(ops::pucci_max(flat, x) + l * x.trace()) > tol || std::abs(ops::pucci_min(flat, x) + l * x.trace()) > tol)
      ++fails[4];

    const ops::Ellipticity band(alpha, 1.0 - (static_cast<double>(m) - 1.0) * alpha);
    if (ops::pucci_plus_alpha(pa, x) > ops::pucci_max(band, x) + tol ||
        ops::pucci_minus_alpha(pa, x) < ops::pucci_min(band, x) - tol)
      ++fails[5];
  }
  std::string detail = fmt("%d cases each:", cases);
  int total = 0;
  for (int i = 0; i < 6; ++i) {
    detail += fmt(" %s %d", names[i], fails[i]);
    total += fails[i];
  }
  return {total == 0, detail + " failures"};
}

// ----- 9: Lyapunov fixtures -----

int run_lyapunov_cfg(const cli::json& overlay) {
  cli::json cfg = cli::lyapunov_defaults();
  cli::merge_config(cfg, overlay);
  std::ostringstream sink;
  return cli::run_lyapunov(cfg, sink).exit_code;
}

Outcome lyapunov_fixtures() {
  bool ok = true;
  int zero_fail = 0, zero_total = 0, hou_ok = 0, hou_total = 0;
  for (int d = 1; d <= 3; ++d)
    for (const auto& [l, L] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}, std::pair{1.0, 5.0}}) {
      cli::json z = cli::lyapunov_fixture_config("zero-coeffs", {}, {});
      z["d"] = d;
      z["lambda"] = l;
      z["Lambda"] = L;
      ++zero_total;
      zero_fail += run_lyapunov_cfg(z) == cli::kFail;

      const double rho_min = 10.0;
      const double gamma0 = (L * (2.0 * d + 1.0) - l) / std::pow(rho_min, 4);
      for (const auto& [factor, expect] : {std::pair{1.01, cli::kPass}, std::pair{0.5, cli::kFail}}) {
        cli::json h = cli::lyapunov_fixture_config("hou", factor * gamma0, {});
        h["d"] = d;
        h["lambda"] = l;
        h["Lambda"] = L;
        ++hou_total;
        hou_ok += run_lyapunov_cfg(h) == expect;
      }
    }
  const int schro = run_lyapunov_cfg(cli::lyapunov_fixture_config("schro", {}, {}));
  const int outype = run_lyapunov_cfg(cli::lyapunov_fixture_config("outype", 1.0, {}));
  ok = zero_fail == zero_total && hou_ok == hou_total && schro == cli::kPass && outype == cli::kPass;
  return {ok, fmt("zero-coeffs failed %d/%d; hou threshold behaved %d/%d; schro exit %d; outype exit %d", zero_fail,
                  zero_total, hou_ok, hou_total, schro, outype)};
}

// ----- 10: finite differences -----

Outcome fd_crosscheck() {
  const auto f = make_field("folland", 1, 1.0, 1.0);
  Region r;
  r.rho_min = 0.5;
  r.rho_max = 2.0;
  r.n_samples = 256;
  const double h0 = 1e-2;
  const check::ConvergenceReport rep = check::convergence_study(f, r, h0, 4);
  double min_order = INFINITY;
  for (const auto& l : rep.levels)
    if (l.order) min_order = std::min(min_order, *l.order);
  const double C = rep.c_estimate;

  Region fresh = r;
  fresh.seed = 98765;
  const double h = h0 / 4.0;
  double worst_ratio = 0.0;
  std::size_t used = 0;
  for (const auto& x : check::sample_points(fresh, gallery::Geometry::heisenberg, 3)) {
    const HeisPoint p(HeisDims(1), x);
    if (characteristic_ratio(p) < fresh.char_eps || !check::stencil_is_clean(f, x, h)) continue;
    const check::FdResult fd = check::fd_h_hessian(f, x, h);
    const SymMatrix exact = h_hessian(f.gradient(x), f.hessian(x), p);
    worst_ratio = std::max(worst_ratio, (fd.hessian - exact).max_abs() / (10.0 * C * fd.h_used * fd.h_used));
    ++used;
  }
  return {min_order >= 1.9 && rep.levels.size() == 4 && worst_ratio <= 1.0 && used > 200 &&
              rep.stencil_crossings == 0,
          fmt("orders >= %.4f over 3 halvings, C = %.4g; fresh samples %zu, max err / (10 C h^2) = %.3g", min_order, C,
              used, worst_ratio)};
}

// ----- 11: determinism -----

std::string strip_lines(const fs::path& p, const std::vector<std::string>& keys) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line)) {
    bool drop = false;
    for (const auto& k : keys) drop = drop || line.find("\"" + k + "\"") != std::string::npos;
    if (!drop) out += line + '\n';
  }
  return out;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "heisliou");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  return cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::map<std::string, std::string> snapshot(const fs::path& dir, const std::vector<std::string>& keys) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") m[e.path().filename().string()] = strip_lines(e.path(), keys);
  return m;
}

// Same arguments twice into the same directory must reproduce every report
// byte for byte apart from wall time. A single-threaded rerun must match too
// once the echoed thread count is dropped.
Outcome determinism(const fs::path& work) {
  const fs::path dir = work / "fixtures_run";
  fs::remove_all(dir);
  const std::vector<std::string> args = {"fixtures", "run", "--out", dir.string(), "--seed", "1"};
  auto with_threads = [&](const char* t) {
    auto a = args;
    a.insert(a.end(), {"--threads", t});
    return run_cli(a);
  };
  const std::vector<std::string> wall = {"wall_time_s"}, wall_threads = {"wall_time_s", "threads"};
  const int c1 = with_threads("4");
  const auto first = snapshot(dir, wall);
  const auto first_nt = snapshot(dir, wall_threads);
  const int c2 = with_threads("4");
  const auto second = snapshot(dir, wall);
  const int c3 = with_threads("1");
  const auto single = snapshot(dir, wall_threads);
  std::size_t same = 0, same_threads = 0;
  for (const auto& [name, text] : first) {
    auto it = second.find(name);
    same += it != second.end() && it->second == text;
    auto jt = single.find(name);
    same_threads += jt != single.end() && jt->second == first_nt.at(name);
  }
  const std::size_t files = first.size();
  return {c1 == 0 && c2 == 0 && c3 == 0 && files == cli::fixtures().size() + 1 && same == files &&
              same_threads == files && second.size() == files && single.size() == files,
          fmt("exits %d/%d/%d; %zu/%zu reports identical on rerun, %zu/%zu with 1 vs 4 threads", c1, c2, c3, same,
              files, same_threads, files)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "heisliou_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work-dir" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--work-dir DIR]\n");
      return 2;
    }
  }
  fs::create_directories(work);

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, [] { return log_rho_formula(false); }},
      {2, [] { return log_rho_formula(true); }},
      {3, u4_check},
      {4, u5_check},
      {5, u_tilde_check},
      {6, euclid_check},
      {7, pucci_oracle},
      {8, operator_algebra},
      {9, lyapunov_fixtures},
      {10, fd_crosscheck},
      {11, [&] { return determinism(work); }},
  };
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("AC%d %s: %s [%.2fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
