#include "pbih/catalog.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "pbih/errors.hpp"

namespace pbih {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::p_harmonic: return "p_harmonic";
    case Verdict::proper_p_biharmonic: return "proper_p_biharmonic";
    case Verdict::neither: return "neither";
  }
  return "neither";
}

Verdict parse_verdict(std::string_view name) {
  if (name == "p_harmonic") return Verdict::p_harmonic;
  if (name == "proper_p_biharmonic") return Verdict::proper_p_biharmonic;
  if (name == "neither") return Verdict::neither;
  throw Error("unknown verdict '" + std::string(name) + "'");
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::vector<std::string> kXYZ{"x", "y", "z"};

using Values = std::map<std::string, double, std::less<>>;

Values merged(const std::string& name, Values defaults, const Overrides& overrides, bool accepts_profile) {
  for (const auto& [key, value] : overrides.values) {
    auto it = defaults.find(key);
    if (it == defaults.end()) throw ConfigError(0, "builtin '" + name + "' has no parameter '" + key + "'");
    if (!std::isfinite(value)) throw ConfigError(0, "parameter '" + key + "' must be finite");
    it->second = value;
  }
  if (overrides.profile && !accepts_profile)
    throw ConfigError(0, "builtin '" + name + "' has no parameter 'profile'");
  if (defaults.contains("p") && !(defaults["p"] >= 2.0))
    throw ConfigError(0, "parameter 'p' must be at least 2");
  return defaults;
}

ProblemConfig problem(const Values& v, Orientation orientation = Orientation::plus) {
  return ProblemConfig{v.at("p"), 2, orientation};
}

NamedConfiguration hyperplane_example1(const Overrides& o) {
  const std::string name = "hyperplane_example1";
  Values v = merged(name, {{"p", 3.0}, {"c1", 1.0}, {"c2", 1.0}, {"c", 0.0}}, o, false);
  const double p = v["p"], c1 = v["c1"], c2 = v["c2"], c = v["c"];
  if (!(c1 * c + c2 > 0.0)) throw ConfigError(0, "hyperplane_example1 requires c1*c + c2 > 0");
  Immersion imm({"x", "y"}, {Expr::variable("x"), Expr::variable("y"), Expr::constant(c)},
                {{-1.0, 1.0}, {-1.0, 1.0}});
  AmbientSpace amb = AmbientSpace::conformal(parse("ln((p - 1)*(c1*z + c2))/(p - 1)"), kXYZ, {"p", "c1", "c2"},
                                             {p, c1, c2});
  const Verdict expected = c1 != 0.0 ? Verdict::proper_p_biharmonic : Verdict::p_harmonic;
  return {name, std::move(imm), std::move(amb), problem(v), v, "", expected, 1e-8};
}

NamedConfiguration revolution_disk_example2(const Overrides& o) {
  const std::string name = "revolution_disk_example2";
  Values v = merged(name, {{"p", 3.0}, {"c", 1.0}}, o, true);
  const double p = v["p"], c = v["c"];
  if (!(c > 0.0)) throw ConfigError(0, "revolution_disk_example2 requires c > 0 (the plane z = c must lie in z > 0)");
  const std::string profile_text = o.profile.value_or("1 + x2^2");
  Expr profile;
  try {
    profile = parse(profile_text);
  } catch (const ParseError& e) {
    throw ConfigError(0, std::string("profile: ") + e.what());
  }
  for (const auto& var : free_variables(profile))
    if (var != "x2") throw ConfigError(0, "profile may only depend on x2 (found '" + var + "')");
  const Interval x2_range{-1.0, 1.0};
  const Program prof(profile, {"x2"});
  for (int k = 0; k <= 200; ++k) {
    const double x2 = x2_range.lo + (x2_range.hi - x2_range.lo) * k / 200.0;
    double value = 0.0;
    try {
      value = prof(std::span<const double>(&x2, 1));
    } catch (const DomainError&) {
      value = 0.0;
    }
    if (!(value > 0.0)) throw ConfigError(0, "profile must be positive on the chart domain");
  }
  const Expr x1 = Expr::variable("x1");
  Immersion imm({"x1", "x2"}, {profile * cos(x1), profile * sin(x1), Expr::constant(c)},
                {{0.1, kTwoPi - 0.1}, x2_range});
  AmbientSpace amb = AmbientSpace::conformal(parse("ln(z)/(p - 1)"), kXYZ, {"p"}, {p});
  return {name, std::move(imm), std::move(amb), problem(v), v, profile_text, Verdict::proper_p_biharmonic, 1e-8};
}

NamedConfiguration catenoid(const Overrides& o) {
  const std::string name = "catenoid";
  Values v = merged(name, {{"p", 2.0}, {"a", 1.0}, {"b", 0.0}}, o, false);
  const double a = v["a"], b = v["b"];
  if (a == 0.0) throw ConfigError(0, "catenoid requires a != 0");
  const Expr x1 = Expr::variable("x1");
  const Expr r = Expr::constant(a) * cosh(Expr::variable("x2") / Expr::constant(a) + Expr::constant(b));
  const double reach = 3.0 * std::abs(a);
  Immersion imm({"x1", "x2"}, {r * cos(x1), r * sin(x1), Expr::variable("x2")}, {{0.0, kTwoPi}, {-reach, reach}});
  return {name, std::move(imm), AmbientSpace::euclidean(3), problem(v), v, "", Verdict::p_harmonic, 1e-8};
}

NamedConfiguration sphere(const Overrides& o) {
  const std::string name = "sphere";
  Values v = merged(name, {{"p", 2.0}, {"radius", 1.0}}, o, false);
  const double radius = v["radius"];
  if (!(radius > 0.0)) throw ConfigError(0, "sphere requires radius > 0");
  const Expr t = Expr::variable("theta"), ph = Expr::variable("phi"), R = Expr::constant(radius);
  Immersion imm({"theta", "phi"}, {R * sin(t) * cos(ph), R * sin(t) * sin(ph), R * cos(t)},
                {{0.0, std::numbers::pi}, {0.0, kTwoPi}});
  return {name, std::move(imm), AmbientSpace::euclidean(3), problem(v, Orientation::minus), v, "", Verdict::neither,
          1e-8};
}

NamedConfiguration flat_plane(const Overrides& o) {
  const std::string name = "flat_plane";
  Values v = merged(name, {{"p", 2.0}}, o, false);
  Immersion imm({"u", "v"}, {Expr::variable("u"), Expr::variable("v"), Expr::constant(0.0)},
                {{-1.0, 1.0}, {-1.0, 1.0}});
  return {name, std::move(imm), AmbientSpace::euclidean(3), problem(v), v, "", Verdict::p_harmonic, 1e-8};
}

}  // namespace

const std::vector<BuiltinInfo>& list_builtins() {
  static const std::vector<BuiltinInfo> registry{
      {"hyperplane_example1",
       "plane z = c in (R^3, e^{2 gamma(z)} h), gamma = ln((p-1)(c1 z + c2))/(p-1), chart [-1,1]^2",
       {{"p", "3", "exponent, >= 2"},
        {"c1", "1", "slope of the log argument"},
        {"c2", "1", "offset of the log argument, c1*c + c2 > 0"},
        {"c", "0", "height of the plane"}}},
      {"revolution_disk_example2",
       "planar disk (f(x2) cos x1, f(x2) sin x1, c) in (R^3, z^{2/(p-1)} h), chart [0.1, 2pi-0.1] x [-1,1]",
       {{"p", "3", "exponent, >= 2"},
        {"c", "1", "height of the plane, > 0"},
        {"profile", "\"1 + x2^2\"", "f(x2), positive on [-1,1]"}}},
      {"catenoid",
       "(a cosh(x2/a + b) cos x1, a cosh(x2/a + b) sin x1, x2) in Euclidean R^3, chart [0,2pi] x [-3|a|,3|a|]",
       {{"p", "2", "exponent, >= 2"}, {"a", "1", "neck radius, != 0"}, {"b", "0", "phase"}}},
      {"sphere",
       "round sphere of the given radius in Euclidean R^3, inward normal, chart (theta, phi) in [0,pi] x [0,2pi]",
       {{"p", "2", "exponent, >= 2"}, {"radius", "1", "> 0"}}},
      {"flat_plane", "plane (u, v, 0) in Euclidean R^3, chart [-1,1]^2", {{"p", "2", "exponent, >= 2"}}},
  };
  return registry;
}

NamedConfiguration builtin(std::string_view name, const Overrides& overrides) {
  if (name == "hyperplane_example1") return hyperplane_example1(overrides);
  if (name == "revolution_disk_example2") return revolution_disk_example2(overrides);
  if (name == "catenoid") return catenoid(overrides);
  if (name == "sphere") return sphere(overrides);
  if (name == "flat_plane") return flat_plane(overrides);
  throw ConfigError(0, "unknown builtin '" + std::string(name) + "'");
}

}  // namespace pbih
