#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "pbih/errors.hpp"
#include "pbih/run.hpp"

namespace pbih {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::check: return "check";
    case Mode::verify: return "verify";
    case Mode::search: return "search";
    case Mode::convergence: return "convergence";
  }
  return "check";
}

std::string_view to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Value {
  std::string text;
  bool quoted = false;
  std::size_t line = 0;
};

Value read_value(std::string_view raw, std::size_t line) {
  raw = trim(raw);
  if (raw.empty() || raw.front() != '"') {
    for (std::size_t i = 1; i < raw.size(); ++i)
      if ((raw[i] == '#' || raw[i] == ';') && (raw[i - 1] == ' ' || raw[i - 1] == '\t')) {
        raw = trim(raw.substr(0, i));
        break;
      }
    return {std::string(raw), false, line};
  }
  std::string out;
  std::size_t i = 1;
  for (; i < raw.size() && raw[i] != '"'; ++i) {
    if (raw[i] == '\\' && i + 1 < raw.size()) ++i;
    out += raw[i];
  }
  if (i >= raw.size()) throw ConfigError(line, "unterminated quoted string");
  const std::string_view rest = trim(raw.substr(i + 1));
  if (!rest.empty() && rest.front() != '#' && rest.front() != ';')
    throw ConfigError(line, "unexpected text after quoted value");
  return {out, true, line};
}

double to_real(const Value& v, std::string_view key) {
  double x = 0.0;
  const char* b = v.text.data();
  const char* e = b + v.text.size();
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e || v.text.empty())
    throw ConfigError(v.line, std::string(key) + ": expected a number, got '" + v.text + "'");
  return x;
}

long long to_integer(const Value& v, std::string_view key) {
  long long x = 0;
  const char* b = v.text.data();
  const char* e = b + v.text.size();
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e || v.text.empty())
    throw ConfigError(v.line, std::string(key) + ": expected an integer, got '" + v.text + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const std::string_view t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void check_expression(const Value& v, std::string_view key) {
  try {
    (void)parse(v.text);
  } catch (const ParseError& e) {
    throw ConfigError(v.line, std::string(key) + ": " + e.what());
  }
}

GridAxis to_axis(const Value& v, std::string_view key) {
  const auto parts = split_list(v.text);
  if (parts.size() != 3) throw ConfigError(v.line, std::string(key) + ": expected 'min, max, count'");
  GridAxis a;
  a.min = to_real({parts[0], false, v.line}, key);
  a.max = to_real({parts[1], false, v.line}, key);
  a.count = static_cast<int>(to_integer({parts[2], false, v.line}, key));
  if (a.count < 2) throw ConfigError(v.line, std::string(key) + ": grid count must be at least 2");
  if (!(a.min < a.max)) throw ConfigError(v.line, std::string(key) + ": need min < max");
  return a;
}

Orientation to_orientation(const Value& v) {
  if (v.text == "plus") return Orientation::plus;
  if (v.text == "minus") return Orientation::minus;
  throw ConfigError(v.line, "orientation must be 'plus' or 'minus'");
}

Mode to_mode(const Value& v) {
  for (Mode m : {Mode::check, Mode::verify, Mode::search, Mode::convergence})
    if (v.text == to_string(m)) return m;
  throw ConfigError(v.line, "unknown mode '" + v.text + "'");
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(tolerance > 0.0)) throw ConfigError(0, "tolerance must be positive");
  if (verify_tolerance && !(*verify_tolerance > 0.0)) throw ConfigError(0, "verify_tolerance must be positive");
  if (count && *count < 2) throw ConfigError(0, "grid count must be at least 2");
  for (const auto& a : axes)
    if (a.axis.count < 2) throw ConfigError(0, "grid count for '" + a.variable + "' must be at least 2");
  if (!builtin.empty() && !components.empty())
    throw ConfigError(0, "[surface] takes either a builtin or inline components, not both");
  if (!components.empty() && components.size() != chart_variables.size() + 1)
    throw ConfigError(0, "an inline surface needs one more component than chart variables");
  auto parses = [](const std::string& text, const char* what) {
    try {
      (void)parse(text);
    } catch (const ParseError& e) {
      throw ConfigError(0, std::string(what) + ": " + e.what());
    }
  };
  for (const auto& c : components) parses(c, "component");
  if (gamma) parses(*gamma, "gamma");
  if (profile) parses(*profile, "profile");
  if (!(p_range.lo <= p_range.hi)) throw ConfigError(0, "[search] needs p_min <= p_max");
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::map<int, std::string> component_text;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view raw = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (raw.empty() || raw.front() == '#' || raw.front() == ';') continue;
    if (raw.front() == '[') {
      if (raw.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = std::string(trim(raw.substr(1, raw.size() - 2)));
      static const std::set<std::string> known{"run", "surface", "parameters", "ambient", "grid", "search"};
      if (!known.contains(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key(trim(raw.substr(0, eq)));
    if (key.empty()) throw ConfigError(line_no, "missing key");
    if (section.empty()) throw ConfigError(line_no, "key '" + key + "' outside any section");
    if (!seen.insert(section + "." + key).second) throw ConfigError(line_no, "duplicate key '" + key + "'");
    const Value v = read_value(raw.substr(eq + 1), line_no);

    if (section == "run") {
      if (key == "mode") cfg.mode = to_mode(v);
      else if (key == "p") cfg.p = to_real(v, key);
      else if (key == "tolerance") cfg.tolerance = to_real(v, key);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_integer(v, key));
      else if (key == "expect") {
        try {
          cfg.expect = parse_verdict(v.text);
        } catch (const Error& e) {
          throw ConfigError(line_no, e.what());
        }
      } else if (key == "filter") cfg.filter = v.text;
      else if (key == "verify_tolerance") cfg.verify_tolerance = to_real(v, key);
      else throw ConfigError(line_no, "unknown key '" + key + "' in [run]");
      if (key == "tolerance" && !(cfg.tolerance > 0.0)) throw ConfigError(line_no, "tolerance must be positive");
    } else if (section == "surface") {
      if (key == "builtin") cfg.builtin = v.text;
      else if (key == "variables") cfg.chart_variables = split_list(v.text);
      else if (key == "orientation") cfg.orientation = to_orientation(v);
      else if (key.rfind("component", 0) == 0) {
        const Value index{key.substr(9), false, line_no};
        const long long k = to_integer(index, key);
        if (k < 1) throw ConfigError(line_no, "components are numbered from 1");
        check_expression(v, key);
        component_text[static_cast<int>(k)] = v.text;
      } else throw ConfigError(line_no, "unknown key '" + key + "' in [surface]");
    } else if (section == "parameters") {
      if (key == "profile") {
        check_expression(v, key);
        cfg.profile = v.text;
      } else {
        cfg.parameters[key] = to_real(v, key);
      }
    } else if (section == "ambient") {
      if (key == "gamma") {
        check_expression(v, key);
        cfg.gamma = v.text;
      } else if (key == "coordinates") cfg.coordinates = split_list(v.text);
      else if (key == "einstein_S") cfg.einstein_scalar_curvature = to_real(v, key);
      else throw ConfigError(line_no, "unknown key '" + key + "' in [ambient]");
    } else if (section == "grid") {
      if (key == "count") {
        cfg.count = static_cast<int>(to_integer(v, key));
        if (*cfg.count < 2) throw ConfigError(line_no, "grid count must be at least 2");
      } else if (key == "margin") cfg.margin = to_real(v, key);
      else cfg.axes.push_back({key, to_axis(v, key)});
    } else if (section == "search") {
      if (key == "family") cfg.family = v.text;
      else if (key == "p_min") cfg.p_range.lo = to_real(v, key);
      else if (key == "p_max") cfg.p_range.hi = to_real(v, key);
      else if (key == "max_iters") cfg.max_iters = static_cast<int>(to_integer(v, key));
      else if (key == "restarts") cfg.restarts = static_cast<int>(to_integer(v, key));
      else if (key == "simplex_scale") cfg.simplex_scale = to_real(v, key);
      else throw ConfigError(line_no, "unknown key '" + key + "' in [search]");
    }
  }
  int expected_index = 1;
  for (const auto& [k, c] : component_text) {
    if (k != expected_index++) throw ConfigError(0, "components must be numbered 1..n without gaps");
    cfg.components.push_back(c);
  }
  cfg.validate();
  return cfg;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  out << "[run]\n";
  out << "mode = " << to_string(c.mode) << "\n";
  if (c.p) out << "p = " << format_real(*c.p) << "\n";
  out << "tolerance = " << format_real(c.tolerance) << "\n";
  if (c.seed) out << "seed = " << *c.seed << "\n";
  if (c.expect) out << "expect = " << to_string(*c.expect) << "\n";
  if (!c.filter.empty()) out << "filter = " << quote(c.filter) << "\n";
  if (c.verify_tolerance) out << "verify_tolerance = " << format_real(*c.verify_tolerance) << "\n";

  if (!c.builtin.empty() || !c.components.empty() || c.orientation) {
    out << "\n[surface]\n";
    if (!c.builtin.empty()) out << "builtin = " << c.builtin << "\n";
    if (!c.chart_variables.empty()) out << "variables = " << quote(join(c.chart_variables)) << "\n";
    for (std::size_t i = 0; i < c.components.size(); ++i)
      out << "component" << i + 1 << " = " << quote(c.components[i]) << "\n";
    if (c.orientation) out << "orientation = " << (*c.orientation == Orientation::plus ? "plus" : "minus") << "\n";
  }
  if (!c.parameters.empty() || c.profile) {
    out << "\n[parameters]\n";
    for (const auto& [k, v] : c.parameters) out << k << " = " << format_real(v) << "\n";
    if (c.profile) out << "profile = " << quote(*c.profile) << "\n";
  }
  if (c.gamma || !c.coordinates.empty() || c.einstein_scalar_curvature) {
    out << "\n[ambient]\n";
    if (c.gamma) out << "gamma = " << quote(*c.gamma) << "\n";
    if (!c.coordinates.empty()) out << "coordinates = " << quote(join(c.coordinates)) << "\n";
    if (c.einstein_scalar_curvature) out << "einstein_S = " << format_real(*c.einstein_scalar_curvature) << "\n";
  }
  out << "\n[grid]\n";
  if (c.count) out << "count = " << *c.count << "\n";
  out << "margin = " << format_real(c.margin) << "\n";
  for (const auto& a : c.axes)
    out << a.variable << " = " << format_real(a.axis.min) << ", " << format_real(a.axis.max) << ", " << a.axis.count
        << "\n";
  if (c.mode == Mode::search) {
    out << "\n[search]\n";
    out << "family = " << c.family << "\n";
    out << "p_min = " << format_real(c.p_range.lo) << "\n";
    out << "p_max = " << format_real(c.p_range.hi) << "\n";
    out << "max_iters = " << c.max_iters << "\n";
    out << "restarts = " << c.restarts << "\n";
    out << "simplex_scale = " << format_real(c.simplex_scale) << "\n";
  }
  return out.str();
}

}  // namespace pbih
