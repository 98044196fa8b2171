#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "heisliou/cli.hpp"
#include "heisliou/hgroup.hpp"

namespace heis::cli {

namespace {

json region_defaults(double rho_min, double rho_max, std::size_t n) {
  return json{{"rho_min", rho_min}, {"rho_max", rho_max}, {"char_eps", 1e-3}, {"kink_eps", 1e-6},
              {"sampler", "quasi"},  {"n_samples", n},      {"seed", 1},         {"shells", 16}};
}

json tolerance_defaults() { return json{{"rel", 1e-9}, {"abs", 1e-12}}; }

std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

const json& at(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing key '" + path_of(where, key) + "'");
  return j.at(key);
}

double get_double(const json& j, const std::string& key, const std::string& where = "") {
  const json& v = at(j, key, where);
  if (!v.is_number()) throw ConfigError("'" + path_of(where, key) + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("'" + path_of(where, key) + "' must be finite");
  return d;
}

std::optional<double> get_opt_double(const json& j, const std::string& key, const std::string& where = "") {
  if (at(j, key, where).is_null()) return std::nullopt;
  return get_double(j, key, where);
}

std::int64_t get_int(const json& j, const std::string& key, const std::string& where = "") {
  const json& v = at(j, key, where);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw ConfigError("'" + path_of(where, key) + "' must be an integer");
}

std::uint64_t get_uint(const json& j, const std::string& key, const std::string& where = "") {
  const json& v = at(j, key, where);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t i = get_int(j, key, where);
  if (i < 0) throw ConfigError("'" + path_of(where, key) + "' must be non-negative");
  return static_cast<std::uint64_t>(i);
}

std::string get_string(const json& j, const std::string& key, const std::string& where = "") {
  const json& v = at(j, key, where);
  if (!v.is_string()) throw ConfigError("'" + path_of(where, key) + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> get_opt_string(const json& j, const std::string& key, const std::string& where = "") {
  if (at(j, key, where).is_null()) return std::nullopt;
  return get_string(j, key, where);
}

bool get_bool(const json& j, const std::string& key, const std::string& where = "") {
  const json& v = at(j, key, where);
  if (!v.is_boolean()) throw ConfigError("'" + path_of(where, key) + "' must be true or false");
  return v.get<bool>();
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError("unknown key '" + path_of(where, k) + "'");
}

// Library precondition failures surface as configuration errors.
template <typename F>
auto guarded(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

check::Region parse_region(const json& j) {
  check::Region r;
  r.rho_min = get_double(j, "rho_min", "region");
  r.rho_max = get_double(j, "rho_max", "region");
  r.char_eps = get_double(j, "char_eps", "region");
  r.kink_eps = get_double(j, "kink_eps", "region");
  r.sampler = guarded("region.sampler", [&] { return check::sampler_from_string(get_string(j, "sampler", "region")); });
  const std::int64_t n = get_int(j, "n_samples", "region");
  if (n < 1) throw ConfigError("region.n_samples must be >= 1");
  r.n_samples = static_cast<std::size_t>(n);
  r.seed = get_uint(j, "seed", "region");
  const std::int64_t shells = get_int(j, "shells", "region");
  if (shells < 1) throw ConfigError("region.shells must be >= 1");
  r.shells = static_cast<std::size_t>(shells);
  guarded("region", [&] { r.validate(); });
  return r;
}

check::Tolerance parse_tolerance(const json& j) {
  check::Tolerance t;
  t.rel = get_double(j, "rel", "tolerance");
  t.abs_floor = get_double(j, "abs", "tolerance");
  if (!(t.rel >= 0.0) || !(t.abs_floor >= 0.0)) throw ConfigError("tolerances must be non-negative");
  return t;
}

unsigned parse_threads(const json& cfg) {
  const std::int64_t t = get_int(cfg, "threads");
  if (t < 0 || t > 1024) throw ConfigError("'threads' must lie in [0, 1024]");
  return static_cast<unsigned>(t);
}

int parse_d(const json& cfg) {
  const std::int64_t d = get_int(cfg, "d");
  if (d < 1 || d > HeisDims::kDefaultMaxD) throw ConfigError("'d' must lie in [1, 16]");
  return static_cast<int>(d);
}

ops::VectorCoefficient parse_drift(const json& j, std::size_t n, std::size_t len, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  const std::string kind = get_string(j, "kind", where);
  if (kind == "zero") {
    only_keys(j, {"kind"}, where);
    return [len](std::span<const double>) { return Vector(len, 0.0); };
  }
  if (kind == "constant") {
    only_keys(j, {"kind", "value"}, where);
    const json& v = at(j, "value", where);
    if (!v.is_array() || v.size() != len)
      throw ConfigError("'" + where + ".value' must be an array of " + std::to_string(len) + " numbers");
    Vector c;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("'" + where + ".value' must hold numbers");
      c.push_back(e.get<double>());
    }
    return [c](std::span<const double>) { return c; };
  }
  if (kind == "linear") {
    only_keys(j, {"kind", "scale"}, where);
    const double s = get_double(j, "scale", where);
    return [s, len](std::span<const double> x) {
      Vector b(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(len));
      for (double& v : b) v *= s;
      return b;
    };
  }
  if (kind == "eta") {
    only_keys(j, {"kind", "scale"}, where);
    if (len != n - 1) throw ConfigError("'" + where + "': eta drifts are horizontal");
    const double s = get_double(j, "scale", where);
    const HeisDims dims(static_cast<int>((n - 1) / 2));
    return [s, dims](std::span<const double> x) {
      const HorizontalVector e = eta(HeisPoint(dims, Vector(x.begin(), x.end())));
      Vector b(e.entries().begin(), e.entries().end());
      for (double& v : b) v *= s;
      return b;
    };
  }
  throw ConfigError("'" + where + ".kind' must be one of zero|constant|linear|eta");
}

double parse_nonneg(const json& j, const std::string& key, const std::string& where) {
  const double v = get_double(j, key, where);
  if (v < 0.0) throw ConfigError("'" + path_of(where, key) + "' must be non-negative");
  return v;
}

ops::GradientSpace parse_space(const std::string& s, const std::string& where) {
  if (s == "horizontal") return ops::GradientSpace::horizontal;
  if (s == "euclidean") return ops::GradientSpace::euclidean;
  throw ConfigError("'" + where + "' must be horizontal|euclidean");
}

gallery::ScalarField make_field(const std::string& profile, int d, double lambda, double Lambda,
                                std::optional<double> kappa) {
  if (profile == "quadratic") return gallery::horizontal_quadratic_field(HeisDims(d));
  gallery::ProfileRequest req{profile, lambda, Lambda, d, kappa};
  return guarded("profile", [&] { return gallery::field_from_profile(gallery::make_profile(req)); });
}

}  // namespace

json verify_defaults() {
  return json{{"d", 2},
              {"lambda", 1.0},
              {"Lambda", 2.0},
              {"alpha", nullptr},
              {"kappa", nullptr},
              {"p", 2.0},
              {"profile", nullptr},
              {"field_csv", nullptr},
              {"geometry", "heisenberg"},
              {"operator", nullptr},
              {"sense", nullptr},
              {"hjb", nullptr},
              {"region", region_defaults(0.05, 5.0, 10000)},
              {"tolerance", tolerance_defaults()},
              {"compare_formula", false},
              {"threads", 0},
              {"output", json{{"report", nullptr}, {"csv", nullptr}}}};
}

json lyapunov_defaults() {
  return json{{"condition", "condcor1"},
              {"d", 1},
              {"lambda", 1.0},
              {"Lambda", 1.0},
              {"alpha", nullptr},
              {"variant", "sign"},
              {"family", nullptr},
              {"gamma", nullptr},
              {"gradient_norm", nullptr},
              {"region", region_defaults(10.0, 2560.0, 4096)},
              {"scan", json{{"rungs", 8}, {"factor", 2.0}}},
              {"tolerance", tolerance_defaults()},
              {"threads", 0},
              {"output", json{{"report", nullptr}}}};
}

json convergence_defaults() {
  return json{{"profile", "folland"},
              {"d", 1},
              {"lambda", 1.0},
              {"Lambda", 1.0},
              {"kappa", nullptr},
              {"h0", 1e-2},
              {"levels", 4},
              {"min_order", nullptr},
              {"region", region_defaults(0.5, 2.0, 256)},
              {"output", json{{"report", nullptr}, {"csv", nullptr}}}};
}

void merge_config(json& base, const json& overlay, const std::string& where) {
  if (!overlay.is_object())
    throw ConfigError(where.empty() ? "config must be a JSON object" : "'" + where + "' must be an object");
  for (const auto& [k, v] : overlay.items()) {
    const std::string p = path_of(where, k);
    if (!base.contains(k)) throw ConfigError("unknown key '" + p + "'");
    json& b = base[k];
    if (b.is_object()) {
      merge_config(b, v, p);
    } else if (b.is_null() || v.is_null()) {
      b = v;
    } else if ((b.is_number() && !v.is_number()) || (b.is_string() && !v.is_string()) ||
               (b.is_boolean() && !v.is_boolean())) {
      throw ConfigError("'" + p + "' has the wrong type");
    } else {
      b = v;
    }
  }
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ops::HJBCoefficients parse_family(const json& j, std::size_t n) {
  only_keys(j, {"space", "side", "terms"}, "family");
  const ops::GradientSpace space = parse_space(get_string(j, "space", "family"), "family.space");
  const std::size_t len = space == ops::GradientSpace::horizontal ? n - 1 : n;
  const json& terms = at(j, "terms", "family");
  if (!terms.is_array() || terms.empty()) throw ConfigError("'family.terms' must be a non-empty array");
  std::vector<ops::HJBTerm> out;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string w = "family.terms[" + std::to_string(k) + "]";
    only_keys(terms[k], {"drift", "c"}, w);
    const double c = parse_nonneg(terms[k], "c", w);
    out.push_back({parse_drift(at(terms[k], "drift", w), n, len, w + ".drift"), [c](std::span<const double>) { return c; }});
  }
  return ops::HJBCoefficients(std::move(out), space);
}

VerifySetup resolve_verify(json cfg) {
  VerifySetup s;
  const int d = parse_d(cfg);
  const double lambda = get_double(cfg, "lambda");
  const double Lambda = get_double(cfg, "Lambda");
  guarded("ellipticity", [&] { (void)ops::Ellipticity(lambda, Lambda); });
  const auto profile = get_opt_string(cfg, "profile");
  const auto csv = get_opt_string(cfg, "field_csv");
  if (profile.has_value() == csv.has_value()) throw ConfigError("exactly one of 'profile' and 'field_csv' is required");

  std::size_t n = 0;
  if (profile) {
    s.field = make_field(*profile, d, lambda, Lambda, get_opt_double(cfg, "kappa"));
    s.geometry = s.field->geometry();
    n = s.field->dim();
    cfg["geometry"] = std::string(gallery::to_string(s.geometry));
    if (*profile != "quadratic") {
      const auto& info = gallery::profile_info(*profile);
      if (cfg["operator"].is_null()) cfg["operator"] = info.default_operator;
      if (cfg["sense"].is_null()) cfg["sense"] = info.default_sense;
    }
  } else {
    const std::string g = get_string(cfg, "geometry");
    if (g == "heisenberg") {
      s.geometry = gallery::Geometry::heisenberg;
      n = HeisDims(d).n();
    } else if (g == "euclidean") {
      s.geometry = gallery::Geometry::euclidean;
      n = static_cast<std::size_t>(d);
    } else {
      throw ConfigError("'geometry' must be heisenberg|euclidean");
    }
    std::ifstream in(*csv);
    if (!in) throw ConfigError("cannot read field_csv '" + *csv + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    s.table = guarded("field_csv", [&] { return check::parse_tabulated_csv(ss.str(), n); });
    if (s.table.empty()) throw ConfigError("field_csv has no data rows");
  }
  if (cfg["operator"].is_null()) throw ConfigError("'operator' is required");
  if (cfg["sense"].is_null()) throw ConfigError("'sense' is required");

  check::OperatorSpec& spec = s.spec;
  spec.second_order = guarded("operator", [&] { return check::second_order_from_string(get_string(cfg, "operator")); });
  spec.sense = guarded("sense", [&] { return check::sense_from_string(get_string(cfg, "sense")); });
  spec.lambda = lambda;
  spec.Lambda = Lambda;
  spec.p = get_double(cfg, "p");
  if (spec.second_order == check::SecondOrder::pucci_plus_alpha ||
      spec.second_order == check::SecondOrder::pucci_minus_alpha) {
    const auto a = get_opt_double(cfg, "alpha");
    if (!a) throw ConfigError("'alpha' is required for " + get_string(cfg, "operator"));
    spec.alpha = *a;
  }
  spec.gradient_space =
      s.geometry == gallery::Geometry::heisenberg ? ops::GradientSpace::horizontal : ops::GradientSpace::euclidean;
  if (!cfg["hjb"].is_null()) {
    const json& h = cfg["hjb"];
    auto fam = guarded("hjb", [&] { return parse_family(h, n); });
    spec.gradient_space = fam.space();
    const check::Envelope side =
        guarded("hjb.side", [&] { return check::envelope_from_string(h.contains("side") ? h["side"].get<std::string>() : "inf"); });
    spec.first_order = check::FirstOrder{std::move(fam), side};
  }
  const std::size_t m = s.geometry == gallery::Geometry::heisenberg ? n - 1 : n;
  guarded("operator", [&] {
    spec.validate(m);
    if (s.geometry == gallery::Geometry::euclidean && spec.gradient_space == ops::GradientSpace::horizontal)
      throw std::invalid_argument("horizontal gradient needs a Heisenberg field");
  });

  s.region = parse_region(cfg["region"]);
  s.options.tol = parse_tolerance(cfg["tolerance"]);
  s.options.threads = parse_threads(cfg);
  const json& out = cfg["output"];
  (void)get_opt_string(out, "report", "output");
  s.options.keep_samples = get_opt_string(out, "csv", "output").has_value();

  if (get_bool(cfg, "compare_formula")) {
    if (!profile || *profile != "log_rho")
      throw ConfigError("compare_formula is available for the log_rho profile only");
    if (spec.second_order == check::SecondOrder::pucci_min)
      s.formula = "pucci-min";
    else if (spec.second_order == check::SecondOrder::pucci_minus_alpha)
      s.formula = "pucci-minus-alpha";
    else
      throw ConfigError("compare_formula needs operator pucci-min or pucci-minus-alpha");
    if (spec.first_order) throw ConfigError("compare_formula needs a purely second-order operator");
    s.options.keep_samples = true;
  }
  s.effective = std::move(cfg);
  return s;
}

LyapunovSetup resolve_lyapunov(json cfg) {
  LyapunovSetup s;
  const int d = parse_d(cfg);
  s.dims = HeisDims(d);
  const double lambda = get_double(cfg, "lambda");
  const double Lambda = get_double(cfg, "Lambda");
  s.ellipticity = guarded("ellipticity", [&] { return ops::Ellipticity(lambda, Lambda); });
  auto& data = s.data;
  data.condition = guarded("condition", [&] { return check::condition_from_string(get_string(cfg, "condition")); });
  data.variant = guarded("variant", [&] { return check::variant_from_string(get_string(cfg, "variant")); });
  if (const auto a = get_opt_double(cfg, "alpha")) data.alpha = *a;
  else if (data.condition == check::Condition::condcor1p)
    throw ConfigError("'alpha' is required for condcor1p");
  if (!cfg["family"].is_null()) data.family = guarded("family", [&] { return parse_family(cfg["family"], s.dims.n()); });
  if (const json& g = cfg["gamma"]; !g.is_null()) {
    if (g.is_number()) {
      data.gamma.assign(s.dims.n(), g.get<double>());
    } else if (g.is_array()) {
      for (const auto& e : g) {
        if (!e.is_number()) throw ConfigError("'gamma' must hold numbers");
        data.gamma.push_back(e.get<double>());
      }
    } else {
      throw ConfigError("'gamma' must be a number or an array");
    }
  }
  if (const json& gn = cfg["gradient_norm"]; !gn.is_null()) {
    only_keys(gn, {"bbar", "g", "cbar"}, "gradient_norm");
    const double g = parse_nonneg(gn, "g", "gradient_norm");
    const double c = parse_nonneg(gn, "cbar", "gradient_norm");
    data.gradient_norm = check::GradientNormData{
        parse_drift(at(gn, "bbar", "gradient_norm"), s.dims.n(), s.dims.m(), "gradient_norm.bbar"),
        [g](std::span<const double>) { return g; }, [c](std::span<const double>) { return c; }};
  }
  s.region = parse_region(cfg["region"]);
  const std::int64_t rungs = get_int(cfg["scan"], "rungs", "scan");
  if (rungs < 1 || rungs > 64) throw ConfigError("'scan.rungs' must lie in [1, 64]");
  s.options.rungs = static_cast<std::size_t>(rungs);
  s.options.rung_factor = get_double(cfg["scan"], "factor", "scan");
  if (!(s.options.rung_factor > 1.0)) throw ConfigError("'scan.factor' must exceed 1");
  s.options.tol = parse_tolerance(cfg["tolerance"]);
  s.options.threads = parse_threads(cfg);
  (void)get_opt_string(cfg["output"], "report", "output");

  // Surface missing or malformed condition data now rather than mid-run.
  guarded("lyapunov", [&] {
    check::Region probe = s.region;
    probe.n_samples = 1;
    (void)check::check_lyapunov(data, s.dims, s.ellipticity, probe, {s.options.tol, 1, s.options.rungs, s.options.rung_factor});
  });
  s.effective = std::move(cfg);
  return s;
}

ConvergenceSetup resolve_convergence(json cfg) {
  ConvergenceSetup s;
  const int d = parse_d(cfg);
  const double lambda = get_double(cfg, "lambda");
  const double Lambda = get_double(cfg, "Lambda");
  guarded("ellipticity", [&] { (void)ops::Ellipticity(lambda, Lambda); });
  s.field = make_field(get_string(cfg, "profile"), d, lambda, Lambda, get_opt_double(cfg, "kappa"));
  s.h0 = get_double(cfg, "h0");
  if (!(s.h0 > 0.0)) throw ConfigError("'h0' must be positive");
  const std::int64_t levels = get_int(cfg, "levels");
  if (levels < 2 || levels > 30) throw ConfigError("'levels' must lie in [2, 30]");
  s.levels = static_cast<int>(levels);
  s.min_order = get_opt_double(cfg, "min_order");
  s.region = parse_region(cfg["region"]);
  (void)get_opt_string(cfg["output"], "report", "output");
  (void)get_opt_string(cfg["output"], "csv", "output");
  s.effective = std::move(cfg);
  return s;
}

}  // namespace heis::cli
