#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "heisliou/cli.hpp"

namespace heis::cli {

namespace {

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump_rec(const json& j, int indent, int level, std::string& out) {
  const auto newline = [&](int lv) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lv), ' ');
  };
  switch (j.type()) {
    case json::value_t::null: out += "null"; break;
    case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case json::value_t::number_float: out += fmt_double(j.get<double>()); break;
    case json::value_t::string: out += j.dump(); break;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      // Short numeric arrays stay on one line.
      bool flat = j.size() <= 16;
      for (const auto& e : j) flat = flat && e.is_number();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        if (flat) {
          if (!first && indent >= 0) out += ' ';
        } else {
          newline(level + 1);
        }
        dump_rec(e, indent, level + 1, out);
        first = false;
      }
      if (!flat) newline(level);
      out += ']';
      break;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        newline(level + 1);
        out += json(k).dump();
        out += indent < 0 ? ":" : ": ";
        dump_rec(v, indent, level + 1, out);
        first = false;
      }
      newline(level);
      out += '}';
      break;
    }
    default: out += "null"; break;
  }
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json vec(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json region_json(const check::Region& r) {
  return json{{"rho_min", r.rho_min},
              {"rho_max", r.rho_max},
              {"char_eps", r.char_eps},
              {"kink_eps", r.kink_eps},
              {"sampler", std::string(check::to_string(r.sampler))},
              {"n_samples", r.n_samples},
              {"seed", r.seed},
              {"shells", r.shells}};
}

json excluded_json(const check::ExclusionCounts& e) {
  return json{{"tube", e.tube}, {"kink", e.kink}, {"origin", e.origin}};
}

json sample_json(const check::SampleRecord& s) {
  return json{{"x", vec(s.x)},
              {"rho", s.radius},
              {"char_ratio", s.char_ratio},
              {"u", s.u},
              {"second_order", s.second_order},
              {"first_order", s.first_order},
              {"value", s.value},
              {"excess", s.excess},
              {"allowed", s.allowed},
              {"eigenvalues", vec(s.eigenvalues)}};
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += '\n';
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'");
    f << text;
    f.close();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ConfigError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ConfigError("cannot move report into place at '" + path.string() + "'");
  }
}

json report_json(const check::CheckReport& r) {
  return json{{"verdict", std::string(check::to_string(r.verdict))},
              {"worst_violation", opt(r.worst_violation)},
              {"n_samples", r.n_samples},
              {"n_evaluated", r.n_evaluated},
              {"n_excluded", r.n_excluded()},
              {"excluded", excluded_json(r.excluded)},
              {"n_failed", r.n_failed},
              {"witness", r.witness ? sample_json(*r.witness) : json(nullptr)},
              {"tolerance", json{{"rel", r.tol.rel}, {"abs", r.tol.abs_floor}}},
              {"region", region_json(r.region)},
              {"seed", r.region.seed}};
}

json report_json(const check::LyapunovReport& r) {
  json witness = nullptr;
  if (r.witness) {
    json terms = json::array();
    for (const auto& t : r.witness->terms)
      terms.push_back(json{{"name", t.name},
                           {"lhs", t.lhs},
                           {"rhs", t.rhs},
                           {"margin", t.margin},
                           {"allowed", t.allowed},
                           {"strict", t.strict},
                           {"holds", t.holds()}});
    witness = json{{"x", vec(r.witness->x)},
                   {"rho", r.witness->radius},
                   {"char_ratio", r.witness->char_ratio},
                   {"terms", terms},
                   {"order_ratio", opt(r.witness->order_ratio)}};
  }
  json scan = json::array();
  for (const auto& row : r.scan)
    scan.push_back(json{{"R", row.R},
                        {"n", row.n},
                        {"worst_margin", opt(row.worst_margin)},
                        {"shell_order_max", opt(row.shell_order_max)},
                        {"holds", row.holds}});
  return json{{"verdict", std::string(check::to_string(r.verdict))},
              {"condition", std::string(check::to_string(r.condition))},
              {"worst_margin", opt(r.worst_margin)},
              {"n_samples", r.n_samples},
              {"n_evaluated", r.n_evaluated},
              {"n_excluded", r.n_excluded()},
              {"excluded", excluded_json(r.excluded)},
              {"n_failed", r.n_failed},
              {"witness", witness},
              {"scan", scan},
              {"threshold_R", opt(r.threshold_R)},
              {"note", r.note},
              {"tolerance", json{{"rel", r.tol.rel}, {"abs", r.tol.abs_floor}}},
              {"region", region_json(r.region)},
              {"seed", r.region.seed}};
}

json report_json(const check::ConvergenceReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) levels.push_back(json{{"h", l.h}, {"max_error", l.max_error}, {"order", opt(l.order)}});
  return json{{"levels", levels},
              {"n_samples", r.n_samples},
              {"n_used", r.n_used},
              {"n_excluded", r.n_excluded},
              {"stencil_crossings", r.stencil_crossings},
              {"c_estimate", r.c_estimate},
              {"region", region_json(r.region)},
              {"seed", r.region.seed}};
}

std::string samples_csv(const check::CheckReport& r) {
  std::ostringstream os;
  const std::size_t n = r.samples.empty() ? 0 : r.samples.front().x.size();
  const std::size_t m = r.samples.empty() ? 0 : r.samples.front().eigenvalues.size();
  for (std::size_t i = 0; i < n; ++i) os << "x" << i + 1 << ',';
  os << "rho,char_ratio,u,second_order,first_order,value";
  for (std::size_t i = 0; i < m; ++i) os << ",eig" << i + 1;
  os << '\n';
  for (const auto& s : r.samples) {
    for (double v : s.x) os << csv_num(v) << ',';
    os << csv_num(s.radius) << ',' << csv_num(s.char_ratio) << ',' << csv_num(s.u) << ',' << csv_num(s.second_order)
       << ',' << csv_num(s.first_order) << ',' << csv_num(s.value);
    for (double e : s.eigenvalues) os << ',' << csv_num(e);
    os << '\n';
  }
  return os.str();
}

std::string convergence_csv(const check::ConvergenceReport& r) {
  std::ostringstream os;
  os << "h,max_err,order\n";
  for (const auto& l : r.levels) os << csv_num(l.h) << ',' << csv_num(l.max_error) << ',' << (l.order ? csv_num(*l.order) : "") << '\n';
  return os.str();
}

FormulaComparison compare_log_rho_formula(const check::CheckReport& r, const check::OperatorSpec& spec, int d) {
  FormulaComparison c;
  double coeff;
  if (spec.second_order == check::SecondOrder::pucci_min) {
    c.name = "(lambda - Lambda(Q-1)) |x_H|^2 / rho^4";
    coeff = spec.lambda - spec.Lambda * (2.0 * d + 1.0);
  } else if (spec.second_order == check::SecondOrder::pucci_minus_alpha) {
    c.name = "(4 d alpha - 3) |x_H|^2 / rho^4";
    coeff = 4.0 * d * spec.alpha - 3.0;
  } else {
    throw ConfigError("no closed form for this operator");
  }
  const std::size_t m = static_cast<std::size_t>(2 * d);
  for (const auto& s : r.samples) {
    double h2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) h2 += s.x[i] * s.x[i];
    const double rho2 = s.radius * s.radius;
    const double expected = coeff * h2 / (rho2 * rho2);
    const double dev = expected == 0.0 ? std::abs(s.value) : std::abs(s.value - expected) / std::abs(expected);
    c.max_rel_deviation = std::max(c.max_rel_deviation, dev);
    ++c.n;
  }
  return c;
}

}  // namespace heis::cli
