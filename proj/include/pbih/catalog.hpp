#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbih/geometry.hpp"
#include "pbih/residuals.hpp"

namespace pbih {

enum class Verdict { p_harmonic, proper_p_biharmonic, neither };

std::string_view to_string(Verdict v);
/// Throws Error on an unknown name.
Verdict parse_verdict(std::string_view name);

struct NamedConfiguration {
  std::string name;
  Immersion immersion;
  AmbientSpace ambient;
  ProblemConfig cfg;
  std::map<std::string, double, std::less<>> parameters;
  /// Profile function of the surfaces of revolution, empty otherwise.
  std::string profile;
  Verdict expected = Verdict::neither;
  double tolerance = 1e-8;
};

struct Overrides {
  std::map<std::string, double, std::less<>> values;
  std::optional<std::string> profile;
};

struct BuiltinParameter {
  std::string key;
  std::string default_value;
  std::string meaning;
};

struct BuiltinInfo {
  std::string name;
  std::string summary;
  std::vector<BuiltinParameter> parameters;
};

/// Registry entries, in a fixed order.
const std::vector<BuiltinInfo>& list_builtins();

/// Instantiates a built-in configuration. Throws ConfigError for an unknown
/// name, an undeclared key or a value outside the parameter domain.
NamedConfiguration builtin(std::string_view name, const Overrides& overrides = {});

}  // namespace pbih
