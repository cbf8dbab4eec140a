#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pbih/acceptance.hpp"
#include "pbih/catalog.hpp"
#include "pbih/evaluation.hpp"
#include "pbih/grid.hpp"
#include "pbih/search.hpp"

namespace pbih {

enum class Mode { check, verify, search, convergence };
enum class Format { csv, json };

std::string_view to_string(Mode m);
std::string_view to_string(Format f);

struct AxisSpec {
  std::string variable;
  GridAxis axis;
};

/// Everything a run needs, as read from a config file plus flag overrides.
struct RunConfig {
  Mode mode = Mode::check;

  // [surface]
  std::string builtin;  // empty for an inline surface
  std::vector<std::string> chart_variables;
  std::vector<std::string> components;
  std::optional<Orientation> orientation;

  // [parameters]
  std::map<std::string, double, std::less<>> parameters;
  std::optional<std::string> profile;

  // [ambient]
  std::optional<std::string> gamma;
  std::vector<std::string> coordinates;
  std::optional<double> einstein_scalar_curvature;

  // [run]
  std::optional<double> p;
  double tolerance = 1e-8;
  /// Search defaults to 1, verify to the suite's own seed.
  std::optional<std::uint64_t> seed;
  std::optional<Verdict> expect;
  std::string filter;
  std::optional<double> verify_tolerance;

  // [grid]
  std::optional<int> count;
  std::vector<AxisSpec> axes;
  double margin = 1e-3;

  // [search]
  std::string family = "log_quadratic_z";
  Interval p_range{2.0, 4.0};
  int max_iters = 200;
  int restarts = 10;
  double simplex_scale = 0.1;

  /// Checks the invariants: tolerance > 0, grid counts >= 2, expressions parse.
  void validate() const;
};

/// Parses the sectioned key-value format. Throws ConfigError with the
/// offending line number.
RunConfig parse_config(std::string_view text);
/// Canonical text that parse_config maps back to an equal configuration.
std::string to_config_text(const RunConfig& config);

/// The immersion, ambient and problem a check/convergence config describes.
struct Problem {
  Immersion immersion;
  AmbientSpace ambient;
  ProblemConfig cfg;
  std::optional<Verdict> expected;
  Grid grid;
};

Problem build_problem(const RunConfig& config);

struct RunOptions {
  int workers = 1;
};

/// A finished run: the document to emit and the process exit status.
struct Report {
  Mode mode = Mode::check;
  nlohmann::json document;
  /// Row-major CSV body, header first.
  std::vector<std::string> csv_rows;
  int exit_code = 0;

  std::string render(Format format) const;
};

Report run_check(const RunConfig& config, const RunOptions& options = {});
Report run_convergence(const RunConfig& config, const RunOptions& options = {});
Report run_search(const RunConfig& config, const RunOptions& options = {});
Report run_verify(const RunConfig& config, const RunOptions& options = {},
                  const std::function<void(const CheckOutcome&)>& on_result = {});

/// Plain-text registry listing for --list-builtins.
std::string builtins_listing();

/// "%.17g".
std::string format_real(double x);

}  // namespace pbih
