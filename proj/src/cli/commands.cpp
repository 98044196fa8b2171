#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "heisliou/cli.hpp"

namespace heis::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int exit_for(check::Verdict v) {
  switch (v) {
    case check::Verdict::pass: return kPass;
    case check::Verdict::fail: return kFail;
    case check::Verdict::vacuous: return kVacuous;
  }
  return kError;
}

json envelope(const char* command, const json& effective, std::uint64_t seed) {
  return json{{"schema", kReportSchema}, {"command", command}, {"config", effective}, {"seed", seed}};
}

void finish(json& report, int exit_code, Clock::time_point t0) {
  report["exit_code"] = exit_code;
  report["wall_time_s"] = std::chrono::duration<double>(Clock::now() - t0).count();
}

void maybe_write(const json& cfg_output, const char* key, const std::string& text) {
  if (cfg_output.contains(key) && cfg_output[key].is_string()) write_atomic(cfg_output[key].get<std::string>(), text);
}

// ----- flag plumbing -----

struct RegionFlags {
  std::optional<double> rho_min, rho_max, char_eps, kink_eps;
  std::optional<std::string> sampler;
  std::optional<std::int64_t> n_samples, shells;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--rho-min", rho_min, "smallest sampled radius");
    app->add_option("--rho-max", rho_max, "largest sampled radius");
    app->add_option("--char-eps", char_eps, "characteristic tube ratio |x_H|/rho");
    app->add_option("--kink-eps", kink_eps, "breakpoint exclusion width");
    app->add_option("--sampler", sampler, "grid|quasi");
    app->add_option("--n-samples", n_samples, "number of samples");
    app->add_option("--shells", shells, "radial strata");
    app->add_option("--seed", seed, "sampler seed");
  }

  json overlay() const {
    json r = json::object();
    if (rho_min) r["rho_min"] = *rho_min;
    if (rho_max) r["rho_max"] = *rho_max;
    if (char_eps) r["char_eps"] = *char_eps;
    if (kink_eps) r["kink_eps"] = *kink_eps;
    if (sampler) r["sampler"] = *sampler;
    if (n_samples) r["n_samples"] = *n_samples;
    if (shells) r["shells"] = *shells;
    if (seed) r["seed"] = *seed;
    return r;
  }
};

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

json layered(json defaults, const std::vector<json>& overlays) {
  for (const json& o : overlays)
    if (!o.is_null()) merge_config(defaults, o);
  return defaults;
}

Vector parse_numbers(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',' || c == ';' || c == '[' || c == ']') c = ' ';
  std::istringstream is(t);
  Vector v;
  std::string tok;
  while (is >> tok) {
    char* end = nullptr;
    const double d = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw ConfigError("cannot parse number '" + tok + "'");
    v.push_back(d);
  }
  return v;
}

SymMatrix parse_matrix(const std::string& text) {
  std::vector<Vector> rows;
  std::string row;
  std::istringstream is(text);
  while (std::getline(is, row, '\n')) {
    std::istringstream rs(row);
    std::string part;
    while (std::getline(rs, part, ';')) {
      Vector v = parse_numbers(part);
      if (!v.empty()) rows.push_back(std::move(v));
    }
  }
  if (rows.empty()) throw ConfigError("empty matrix");
  const std::size_t n = rows.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw ConfigError("matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  try {
    return SymMatrix(m);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("matrix: ") + e.what());
  }
}

}  // namespace

RunOutcome run_verify(const json& cfg, std::ostream& out) {
  const auto t0 = Clock::now();
  VerifySetup s = resolve_verify(cfg);
  const check::CheckReport rep = s.field ? check::check_inequality(*s.field, s.spec, s.region, s.options)
                                         : check::check_tabulated(s.table, s.geometry, s.spec, s.region, s.options);
  int code = exit_for(rep.verdict);
  json report = envelope("verify", s.effective, s.region.seed);
  report["result"] = report_json(rep);
  out << "verify: " << check::to_string(rep.verdict) << "  evaluated " << rep.n_evaluated << "/" << rep.n_samples
      << "  excluded " << rep.n_excluded() << "  failed " << rep.n_failed;
  if (rep.worst_violation) out << "  worst violation " << num(*rep.worst_violation);
  out << '\n';
  if (s.formula) {
    const FormulaComparison c = compare_log_rho_formula(rep, s.spec, static_cast<int>(s.effective["d"].get<int>()));
    const bool ok = c.max_rel_deviation <= s.options.tol.rel;
    report["formula"] = json{{"name", c.name}, {"n", c.n}, {"max_rel_deviation", c.max_rel_deviation}, {"pass", ok}};
    out << "formula " << c.name << ": max relative deviation " << num(c.max_rel_deviation) << '\n';
    if (!ok && code == kPass) code = kFail;
  }
  finish(report, code, t0);
  maybe_write(s.effective["output"], "csv", samples_csv(rep));
  maybe_write(s.effective["output"], "report", dump_json(report));
  return {code, report};
}

RunOutcome run_lyapunov(const json& cfg, std::ostream& out) {
  const auto t0 = Clock::now();
  LyapunovSetup s = resolve_lyapunov(cfg);
  const check::LyapunovReport rep = check::check_lyapunov(s.data, s.dims, s.ellipticity, s.region, s.options);
  const int code = exit_for(rep.verdict);
  json report = envelope("lyapunov", s.effective, s.region.seed);
  report["result"] = report_json(rep);
  out << "lyapunov " << check::to_string(rep.condition) << ": " << check::to_string(rep.verdict) << "  evaluated "
      << rep.n_evaluated << "/" << rep.n_samples << "  failed " << rep.n_failed;
  if (rep.worst_margin) out << "  worst margin " << num(*rep.worst_margin);
  out << "\n  R-scan:";
  for (const auto& row : rep.scan) out << "  R=" << short_num(row.R) << (row.holds ? " ok" : " no");
  out << "\n  " << rep.note << '\n';
  finish(report, code, t0);
  maybe_write(s.effective["output"], "report", dump_json(report));
  return {code, report};
}

RunOutcome run_convergence(const json& cfg, std::ostream& out) {
  const auto t0 = Clock::now();
  ConvergenceSetup s = resolve_convergence(cfg);
  const check::ConvergenceReport rep = check::convergence_study(*s.field, s.region, s.h0, s.levels);
  int code = kPass;
  const auto& last = rep.levels.back();
  if (s.min_order && (!last.order || *last.order < *s.min_order)) code = kFail;
  if (rep.stencil_crossings > 0) code = kFail;
  json report = envelope("convergence", s.effective, s.region.seed);
  report["result"] = report_json(rep);
  out << std::left << std::setw(26) << "h" << std::setw(26) << "max_err" << "order\n";
  for (const auto& l : rep.levels)
    out << std::setw(26) << num(l.h) << std::setw(26) << num(l.max_error) << (l.order ? num(*l.order) : "-") << '\n';
  out << "samples used " << rep.n_used << "/" << rep.n_samples << ", stencil crossings " << rep.stencil_crossings
      << ", C estimate " << num(rep.c_estimate) << '\n';
  finish(report, code, t0);
  maybe_write(s.effective["output"], "csv", convergence_csv(rep));
  maybe_write(s.effective["output"], "report", dump_json(report));
  return {code, report};
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampled Liouville-condition checks on the Heisenberg group", "heisliou"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "check a sub/supersolution inequality for a field");
  std::optional<std::string> v_config, v_profile, v_field_csv, v_geometry, v_op, v_sense, v_report, v_csv;
  std::optional<std::int64_t> v_d, v_threads;
  std::optional<double> v_lambda, v_Lambda, v_alpha, v_kappa, v_p, v_tol, v_abs_tol;
  bool v_compare = false;
  RegionFlags v_region;
  verify->add_option("--config", v_config, "JSON config file");
  verify->add_option("--profile", v_profile, "gallery profile (see: gallery list)");
  verify->add_option("--field-csv", v_field_csv, "tabulated user field");
  verify->add_option("--geometry", v_geometry, "heisenberg|euclidean (tabulated fields)");
  verify->add_option("--d", v_d, "Heisenberg d, or Euclidean dimension for u2/u3");
  verify->add_option("--lambda", v_lambda, "lower ellipticity");
  verify->add_option("--Lambda", v_Lambda, "upper ellipticity");
  verify->add_option("--alpha", v_alpha, "parameter of P+/P-");
  verify->add_option("--kappa", v_kappa, "exponent of the power profile");
  verify->add_option("--p", v_p, "exponent of the normalized p-Laplacian");
  verify->add_option("--op", v_op, "pucci-max|pucci-min|pucci-plus-alpha|pucci-minus-alpha|pnorm|neg-trace");
  verify->add_option("--sense", v_sense, "sub|super");
  verify->add_option("--tol", v_tol, "relative tolerance");
  verify->add_option("--abs-tol", v_abs_tol, "absolute tolerance floor");
  verify->add_flag("--compare-formula", v_compare, "compare log_rho values with the closed form");
  verify->add_option("--threads", v_threads, "worker threads (0: HEIS_THREADS or hardware)");
  verify->add_option("--report", v_report, "JSON report path");
  verify->add_option("--csv", v_csv, "per-sample CSV path");
  v_region.add(verify);

  // lyapunov
  auto* lyap = app.add_subcommand("lyapunov", "check a Liouville sufficient condition");
  std::optional<std::string> l_config, l_fixture, l_condition, l_variant, l_report;
  std::optional<std::int64_t> l_d, l_rungs, l_threads;
  std::optional<double> l_lambda, l_Lambda, l_alpha, l_gamma, l_c0, l_tol;
  RegionFlags l_region;
  lyap->add_option("--config", l_config, "JSON config file");
  lyap->add_option("--fixture", l_fixture, "zero-coeffs|schro|hou|outype");
  lyap->add_option("--condition", l_condition, "condcor1|condcor1bis|condcor1p|outype|schrodinger");
  lyap->add_option("--variant", l_variant, "sign|order (schrodinger)");
  lyap->add_option("--d", l_d, "Heisenberg d");
  lyap->add_option("--lambda", l_lambda, "lower ellipticity");
  lyap->add_option("--Lambda", l_Lambda, "upper ellipticity");
  lyap->add_option("--alpha", l_alpha, "parameter of P- (condcor1p)");
  lyap->add_option("--gamma", l_gamma, "OU rate (hou fixture) or constant gamma_i (outype)");
  lyap->add_option("--c0", l_c0, "zeroth-order constant (schro fixture)");
  lyap->add_option("--rungs", l_rungs, "R-scan rungs");
  lyap->add_option("--tol", l_tol, "relative tolerance");
  lyap->add_option("--threads", l_threads, "worker threads");
  lyap->add_option("--report", l_report, "JSON report path");
  l_region.add(lyap);

  // op-eval
  auto* opeval = app.add_subcommand("op-eval", "evaluate an operator on one symmetric matrix");
  std::optional<std::string> o_matrix, o_matrix_file, o_q;
  std::string o_op = "pucci-max";
  double o_lambda = 1.0, o_Lambda = 1.0, o_p = 2.0;
  std::optional<double> o_alpha;
  opeval->add_option("--matrix", o_matrix, "rows separated by ';', entries by ','");
  opeval->add_option("--matrix-file", o_matrix_file, "CSV file with one row per line");
  opeval->add_option("--op", o_op, "operator name");
  opeval->add_option("--lambda", o_lambda, "lower ellipticity");
  opeval->add_option("--Lambda", o_Lambda, "upper ellipticity");
  opeval->add_option("--alpha", o_alpha, "parameter of P+/P-");
  opeval->add_option("--p", o_p, "p of the normalized p-Laplacian");
  opeval->add_option("--q", o_q, "gradient direction for pnorm");

  // convergence
  auto* conv = app.add_subcommand("convergence", "finite-difference convergence study");
  std::optional<std::string> c_config, c_profile, c_report, c_csv;
  std::optional<std::int64_t> c_d, c_levels;
  std::optional<double> c_lambda, c_Lambda, c_kappa, c_h0, c_min_order;
  RegionFlags c_region;
  conv->add_option("--config", c_config, "JSON config file");
  conv->add_option("--profile", c_profile, "gallery profile or 'quadratic'");
  conv->add_option("--d", c_d, "dimension parameter");
  conv->add_option("--lambda", c_lambda, "lower ellipticity");
  conv->add_option("--Lambda", c_Lambda, "upper ellipticity");
  conv->add_option("--kappa", c_kappa, "exponent of the power profile");
  conv->add_option("--h0", c_h0, "initial step");
  conv->add_option("--levels", c_levels, "number of halvings + 1 (>= 2)");
  conv->add_option("--min-order", c_min_order, "fail when the last observed order is below this");
  conv->add_option("--report", c_report, "JSON report path");
  conv->add_option("--csv", c_csv, "CSV path (h, max_err, order)");
  c_region.add(conv);

  // gallery list
  auto* gallery_cmd = app.add_subcommand("gallery", "profile catalog");
  gallery_cmd->require_subcommand(1);
  auto* glist = gallery_cmd->add_subcommand("list", "list shipped profiles");
  bool g_json = false;
  glist->add_flag("--json", g_json, "print JSON");

  // fixtures
  auto* fix = app.add_subcommand("fixtures", "built-in fixture suite");
  fix->require_subcommand(1);
  auto* flist = fix->add_subcommand("list", "list fixtures");
  auto* frun = fix->add_subcommand("run", "run fixtures and write one report per fixture");
  std::string f_out;
  std::optional<std::uint64_t> f_seed;
  std::vector<std::string> f_only;
  std::optional<std::int64_t> f_threads;
  frun->add_option("--out", f_out, "output directory")->required();
  frun->add_option("--seed", f_seed, "seed for every fixture");
  frun->add_option("--only", f_only, "run only these fixtures");
  frun->add_option("--threads", f_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kPass : kError;
  }

  try {
    if (*verify) {
      json flags = json::object();
      put(flags, "profile", v_profile);
      put(flags, "field_csv", v_field_csv);
      put(flags, "geometry", v_geometry);
      put(flags, "d", v_d);
      put(flags, "lambda", v_lambda);
      put(flags, "Lambda", v_Lambda);
      put(flags, "alpha", v_alpha);
      put(flags, "kappa", v_kappa);
      put(flags, "p", v_p);
      put(flags, "operator", v_op);
      put(flags, "sense", v_sense);
      put(flags, "threads", v_threads);
      if (v_compare) flags["compare_formula"] = true;
      json tol = json::object();
      put(tol, "rel", v_tol);
      put(tol, "abs", v_abs_tol);
      if (!tol.empty()) flags["tolerance"] = tol;
      json output = json::object();
      put(output, "report", v_report);
      put(output, "csv", v_csv);
      if (!output.empty()) flags["output"] = output;
      if (const json r = v_region.overlay(); !r.empty()) flags["region"] = r;
      const json cfg = layered(verify_defaults(), {v_config ? load_json_file(*v_config) : json(nullptr), flags});
      return run_verify(cfg, out).exit_code;
    }

    if (*lyap) {
      json base = nullptr;
      if (l_fixture) {
        base = lyapunov_fixture_config(*l_fixture, l_gamma, l_c0);
      } else if (l_c0) {
        throw ConfigError("--c0 applies to the schro fixture only");
      }
      json flags = json::object();
      put(flags, "condition", l_condition);
      put(flags, "variant", l_variant);
      put(flags, "d", l_d);
      put(flags, "lambda", l_lambda);
      put(flags, "Lambda", l_Lambda);
      put(flags, "alpha", l_alpha);
      put(flags, "threads", l_threads);
      if (l_gamma && !l_fixture) flags["gamma"] = *l_gamma;
      if (l_rungs) flags["scan"] = json{{"rungs", *l_rungs}};
      if (l_tol) flags["tolerance"] = json{{"rel", *l_tol}};
      if (l_report) flags["output"] = json{{"report", *l_report}};
      if (const json r = l_region.overlay(); !r.empty()) flags["region"] = r;
      const json cfg =
          layered(lyapunov_defaults(), {base, l_config ? load_json_file(*l_config) : json(nullptr), flags});
      return run_lyapunov(cfg, out).exit_code;
    }

    if (*opeval) {
      if (o_matrix.has_value() == o_matrix_file.has_value())
        throw ConfigError("give exactly one of --matrix and --matrix-file");
      std::string text;
      if (o_matrix) {
        text = *o_matrix;
      } else {
        std::ifstream in(*o_matrix_file);
        if (!in) throw ConfigError("cannot read '" + *o_matrix_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
      }
      const SymMatrix m = parse_matrix(text);
      check::OperatorSpec spec;
      spec.second_order = check::second_order_from_string(o_op);
      spec.lambda = o_lambda;
      spec.Lambda = o_Lambda;
      spec.p = o_p;
      if (spec.second_order == check::SecondOrder::pucci_plus_alpha ||
          spec.second_order == check::SecondOrder::pucci_minus_alpha) {
        if (!o_alpha) throw ConfigError("--alpha is required for " + o_op);
        spec.alpha = *o_alpha;
      }
      spec.validate(m.size());
      Vector q;
      if (spec.second_order == check::SecondOrder::pnorm) {
        if (!o_q) throw ConfigError("--q is required for pnorm");
        q = parse_numbers(*o_q);
        if (q.size() != m.size()) throw ConfigError("--q must have one entry per matrix row");
      }
      const Vector eig = sym_eigenvalues(m);
      out << "spectrum:";
      for (double e : eig) out << ' ' << num(e);
      out << "\nvalue: " << num(check::apply_second_order(spec, m, eig, q)) << '\n';
      return kPass;
    }

    if (*conv) {
      json flags = json::object();
      put(flags, "profile", c_profile);
      put(flags, "d", c_d);
      put(flags, "lambda", c_lambda);
      put(flags, "Lambda", c_Lambda);
      put(flags, "kappa", c_kappa);
      put(flags, "h0", c_h0);
      put(flags, "levels", c_levels);
      put(flags, "min_order", c_min_order);
      json output = json::object();
      put(output, "report", c_report);
      put(output, "csv", c_csv);
      if (!output.empty()) flags["output"] = output;
      if (const json r = c_region.overlay(); !r.empty()) flags["region"] = r;
      const json cfg = layered(convergence_defaults(), {c_config ? load_json_file(*c_config) : json(nullptr), flags});
      return run_convergence(cfg, out).exit_code;
    }

    if (*glist) {
      if (g_json) {
        json a = json::array();
        for (const auto& p : gallery::profile_catalog())
          a.push_back(json{{"name", p.name},
                           {"geometry", std::string(gallery::to_string(p.geometry))},
                           {"formula", p.formula},
                           {"regime", p.regime},
                           {"operator", p.default_operator},
                           {"sense", p.default_sense}});
        out << dump_json(a);
      } else {
        for (const auto& p : gallery::profile_catalog())
          out << std::left << std::setw(12) << p.name << std::setw(11) << gallery::to_string(p.geometry)
              << std::setw(11) << p.default_operator << std::setw(6) << p.default_sense << p.formula << "  ["
              << p.regime << "]\n";
      }
      return kPass;
    }

    if (*flist) {
      for (const auto& f : fixtures())
        out << std::left << std::setw(28) << f.name << "expect exit " << f.expected_exit << "  " << f.description
            << '\n';
      return kPass;
    }

    if (*frun) {
      std::filesystem::create_directories(f_out);
      std::vector<const Fixture*> chosen;
      if (f_only.empty()) {
        for (const auto& f : fixtures()) chosen.push_back(&f);
      } else {
        for (const auto& n : f_only) chosen.push_back(&fixture(n));
      }
      json summary = json::array();
      bool all_ok = true;
      for (const Fixture* f : chosen) {
        json overlay = f->config;
        if (f_seed) overlay["region"]["seed"] = *f_seed;
        if (f_threads && f->kind != FixtureKind::convergence) overlay["threads"] = *f_threads;
        overlay["output"]["report"] = (std::filesystem::path(f_out) / (f->name + ".json")).string();
        std::ostringstream sink;
        RunOutcome r;
        switch (f->kind) {
          case FixtureKind::verify: r = run_verify(layered(verify_defaults(), {overlay}), sink); break;
          case FixtureKind::lyapunov: r = run_lyapunov(layered(lyapunov_defaults(), {overlay}), sink); break;
          case FixtureKind::convergence: r = run_convergence(layered(convergence_defaults(), {overlay}), sink); break;
        }
        const bool ok = r.exit_code == f->expected_exit;
        all_ok = all_ok && ok;
        out << std::left << std::setw(28) << f->name << "exit " << r.exit_code << " (expected " << f->expected_exit
            << ")  " << (ok ? "ok" : "MISMATCH") << '\n';
        summary.push_back(json{{"name", f->name}, {"exit_code", r.exit_code}, {"expected", f->expected_exit}, {"ok", ok}});
      }
      write_atomic(std::filesystem::path(f_out) / "summary.json",
                   dump_json(json{{"schema", kReportSchema}, {"command", "fixtures"}, {"fixtures", summary}}));
      return all_ok ? kPass : kFail;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace heis::cli
