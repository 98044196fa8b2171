#pragma once

// Command-line front end. Configuration is one JSON document per command;
// command-line flags override it. Exit codes: 0 pass, 1 fail, 2 error, 3 vacuous.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "heisliou/checker.hpp"
#include "heisliou/finite_diff.hpp"
#include "heisliou/gallery.hpp"
#include "heisliou/lyapunov.hpp"

namespace heis::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kPass = 0, kFail = 1, kError = 2, kVacuous = 3 };

inline constexpr const char* kReportSchema = "heisliou.report/1";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ----- config.cpp -----

json verify_defaults();
json lyapunov_defaults();
json convergence_defaults();

/// Copies overlay into base. Keys absent from base are rejected with
/// ConfigError naming the dotted path. Null defaults accept any value.
void merge_config(json& base, const json& overlay, const std::string& where = "");

json load_json_file(const std::filesystem::path& path);

struct VerifySetup {
  std::optional<gallery::ScalarField> field;
  std::vector<check::TabulatedSample> table;  // when field_csv is set
  gallery::Geometry geometry = gallery::Geometry::heisenberg;
  check::OperatorSpec spec;
  check::Region region;
  check::CheckOptions options;
  /// Name of the closed-form comparison to run, if any.
  std::optional<std::string> formula;
  json effective;
};

/// Validates every sub-record of a merged verify config and resolves
/// profile-dependent defaults (operator, sense) into `effective`.
VerifySetup resolve_verify(json cfg);

struct LyapunovSetup {
  check::LyapunovData data;
  HeisDims dims{1};
  ops::Ellipticity ellipticity{1.0, 1.0};
  check::Region region;
  check::LyapunovOptions options;
  json effective;
};

LyapunovSetup resolve_lyapunov(json cfg);

struct ConvergenceSetup {
  std::optional<gallery::ScalarField> field;
  check::Region region;
  double h0 = 1e-2;
  int levels = 4;
  std::optional<double> min_order;
  json effective;
};

ConvergenceSetup resolve_convergence(json cfg);

/// The HJB family description used by verify ("hjb") and lyapunov ("family").
ops::HJBCoefficients parse_family(const json& j, std::size_t n);

// ----- report.cpp -----

/// JSON text with every double printed with 17 significant digits.
std::string dump_json(const json& j, int indent = 2);

/// Writes text to a sibling temporary file and renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& text);

json report_json(const check::CheckReport& r);
json report_json(const check::LyapunovReport& r);
json report_json(const check::ConvergenceReport& r);

std::string samples_csv(const check::CheckReport& r);
std::string convergence_csv(const check::ConvergenceReport& r);

struct FormulaComparison {
  std::string name;
  double max_rel_deviation = 0.0;
  std::size_t n = 0;
};

/// Compares operator values of a log-rho field against the closed forms
/// (lambda - Lambda(Q-1))|x_H|^2/rho^4 for pucci-min and (4d alpha - 3)|x_H|^2/rho^4
/// for pucci-minus-alpha. Throws ConfigError for other combinations.
FormulaComparison compare_log_rho_formula(const check::CheckReport& r, const check::OperatorSpec& spec, int d);

// ----- fixtures.cpp -----

enum class FixtureKind { verify, lyapunov, convergence };

struct Fixture {
  std::string name;
  FixtureKind kind;
  std::string description;
  json config;  // overlay on the command defaults
  int expected_exit;
};

const std::vector<Fixture>& fixtures();
const Fixture& fixture(const std::string& name);

/// Lyapunov fixtures parameterised on the command line (hou --gamma, schro --c0).
json lyapunov_fixture_config(const std::string& name, std::optional<double> gamma, std::optional<double> c0);

// ----- commands.cpp -----

struct RunOutcome {
  int exit_code = kError;
  json report;  // empty on error
};

RunOutcome run_verify(const json& cfg, std::ostream& out);
RunOutcome run_lyapunov(const json& cfg, std::ostream& out);
RunOutcome run_convergence(const json& cfg, std::ostream& out);

/// Entry point used by the binary; never throws.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace heis::cli
