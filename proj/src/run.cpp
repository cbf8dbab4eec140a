#include "pbih/run.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Core>

#include "pbih/errors.hpp"

namespace pbih {

namespace {

constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

std::vector<std::string> default_coordinates(int n) {
  if (n == 3) return {"x", "y", "z"};
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

Expr parse_field(const std::string& text, std::string_view what) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(0, std::string(what) + ": " + e.what());
  }
}

void require_free_in(const Expr& e, const std::set<std::string>& allowed, std::string_view what) {
  std::string unknown;
  for (const auto& v : free_variables(e))
    if (!allowed.contains(v)) unknown += (unknown.empty() ? "" : ", ") + v;
  if (!unknown.empty()) throw ConfigError(0, std::string(what) + " uses unknown names: " + unknown);
}

AmbientSpace custom_ambient(const RunConfig& c, int n, double p, const std::map<std::string, double, std::less<>>& extra) {
  const std::vector<std::string> coords = c.coordinates.empty() ? default_coordinates(n) : c.coordinates;
  if (static_cast<int>(coords.size()) != n)
    throw ConfigError(0, "[ambient] coordinates must name " + std::to_string(n) + " variables");
  Expr gamma = parse_field(*c.gamma, "gamma");
  std::map<std::string, double, std::less<>> values = extra;
  values["p"] = p;
  for (const auto& x : coords) values.erase(x);
  std::set<std::string> allowed(coords.begin(), coords.end());
  for (const auto& v : values) allowed.insert(v.first);
  require_free_in(gamma, allowed, "gamma");
  return AmbientSpace::conformal(substitute_values(gamma, values), coords);
}

Grid make_grid(const RunConfig& c, const Immersion& imm) {
  Grid g;
  g.margin = c.margin;
  if (!c.axes.empty()) {
    const auto& vars = imm.variables();
    if (c.axes.size() != vars.size()) throw ConfigError(0, "[grid] needs one range per chart variable");
    for (const auto& v : vars) {
      auto it = std::find_if(c.axes.begin(), c.axes.end(), [&](const AxisSpec& a) { return a.variable == v; });
      if (it == c.axes.end()) throw ConfigError(0, "[grid] has no range for chart variable '" + v + "'");
      g.axes.push_back(it->axis);
    }
    if (c.count)
      for (auto& a : g.axes) a.count = *c.count;
  } else {
    if (imm.domain().empty()) throw ConfigError(0, "an inline surface needs a range per variable in [grid]");
    g = grid_over_domain(imm, c.count.value_or(8), c.margin);
  }
  g.validate();
  return g;
}

json point_json(const Eigen::VectorXd& u) { return json(std::vector<double>(u.data(), u.data() + u.size())); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json environment(const RunConfig& config) {
  return {{"version", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"tolerance", config.tolerance},
          {"config", to_config_text(config)}};
}

EvaluationOptions evaluation_options(const RunConfig& config, const RunOptions& options) {
  EvaluationOptions e;
  e.tolerance = config.tolerance;
  e.workers = options.workers;
  return e;
}

json summary_json(const GridEvaluation& ev) {
  const GridSummary& s = ev.summary;
  return {{"points", s.points},
          {"degenerate", s.degenerate},
          {"route", to_string(ev.route)},
          {"max_normal", s.max_normal},
          {"mean_normal", s.mean_normal},
          {"max_tangential", s.max_tangential},
          {"mean_tangential", s.mean_tangential},
          {"max_p_tension", s.max_p_tension},
          {"dual_route", {{"checked", s.dual_route_checked},
                          {"max_discrepancy", s.max_route_discrepancy},
                          {"flagged", s.dual_route_flagged}}},
          {"verdict", to_string(s.verdict)}};
}

}  // namespace

Problem build_problem(const RunConfig& c) {
  c.validate();
  if (c.builtin.empty() && c.components.empty()) throw ConfigError(0, "[surface] needs a builtin or inline components");
  if (!c.builtin.empty()) {
    Overrides o{c.parameters, c.profile};
    if (c.p) o.values["p"] = *c.p;
    NamedConfiguration nc = builtin(c.builtin, o);
    if (c.orientation) nc.cfg.orientation = *c.orientation;
    AmbientSpace amb = nc.ambient;
    if (c.gamma) amb = custom_ambient(c, nc.immersion.ambient_dim(), nc.cfg.p, {});
    if (c.einstein_scalar_curvature) {
      if (amb.kind() != AmbientKind::conformal) throw ConfigError(0, "einstein_S needs a conformal ambient");
      amb = amb.declared_einstein(*c.einstein_scalar_curvature);
    }
    std::optional<Verdict> expected = c.expect;
    if (!expected && !c.gamma) expected = nc.expected;
    Grid grid = make_grid(c, nc.immersion);
    return {nc.immersion, amb, nc.cfg, expected, grid};
  }

  if (c.chart_variables.empty()) throw ConfigError(0, "[surface] needs 'variables' for an inline surface");
  const double p = c.p ? *c.p : (c.parameters.contains("p") ? c.parameters.at("p") : 2.0);
  auto values = c.parameters;
  values["p"] = p;
  std::set<std::string> allowed(c.chart_variables.begin(), c.chart_variables.end());
  for (const auto& v : values) allowed.insert(v.first);
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < c.components.size(); ++i) {
    const std::string what = "component" + std::to_string(i + 1);
    Expr e = parse_field(c.components[i], what);
    require_free_in(e, allowed, what);
    comps.push_back(substitute_values(e, values));
  }
  std::vector<Interval> domain;
  for (const auto& v : c.chart_variables) {
    auto it = std::find_if(c.axes.begin(), c.axes.end(), [&](const AxisSpec& a) { return a.variable == v; });
    if (it == c.axes.end()) {
      domain.clear();
      break;
    }
    domain.push_back({it->axis.min, it->axis.max});
  }
  Immersion imm(c.chart_variables, comps, domain);
  ProblemConfig cfg{p, imm.dim(), c.orientation.value_or(Orientation::plus)};
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(0, e.what());
  }
  AmbientSpace amb = c.gamma ? custom_ambient(c, imm.ambient_dim(), p, c.parameters)
                             : AmbientSpace::euclidean(imm.ambient_dim());
  if (c.einstein_scalar_curvature) {
    if (amb.kind() != AmbientKind::conformal) throw ConfigError(0, "einstein_S needs a conformal ambient");
    amb = amb.declared_einstein(*c.einstein_scalar_curvature);
  }
  Grid grid = make_grid(c, imm);
  return {imm, amb, cfg, c.expect, grid};
}

std::string Report::render(Format format) const {
  if (format == Format::json) return document.dump(2) + "\n";
  std::string out;
  for (const auto& row : csv_rows) out += row + "\n";
  return out;
}

Report run_check(const RunConfig& config, const RunOptions& options) {
  const Problem pr = build_problem(config);
  const GridEvaluation ev =
      evaluate_grid(pr.immersion, pr.ambient, pr.cfg, pr.grid.points(), evaluation_options(config, options));

  Report r;
  r.mode = Mode::check;
  json records = json::array();
  std::string header;
  for (int i = 1; i <= pr.immersion.dim(); ++i) header += "u" + std::to_string(i) + ",";
  r.csv_rows.push_back(header + "f,A_norm_sq,res_normal,res_tangential_norm");
  for (const PointRecord& rec : ev.records) {
    records.push_back({{"u", point_json(rec.u)},
                       {"f", rec.f},
                       {"A_norm_sq", rec.A_norm_sq},
                       {"res_normal", rec.res_normal},
                       {"res_tangential_norm", rec.res_tangential_norm}});
    std::string row;
    for (Eigen::Index i = 0; i < rec.u.size(); ++i) row += format_real(rec.u[i]) + ",";
    row += format_real(rec.f) + "," + format_real(rec.A_norm_sq) + "," + format_real(rec.res_normal) + "," +
           format_real(rec.res_tangential_norm);
    r.csv_rows.push_back(row);
  }
  json degenerate = json::array();
  for (const DegeneratePoint& d : ev.degenerate_points) degenerate.push_back({{"u", point_json(d.u)}, {"reason", d.reason}});

  json summary = summary_json(ev);
  summary["expected"] = pr.expected ? json(to_string(*pr.expected)) : json(nullptr);
  const bool matches = !pr.expected || *pr.expected == ev.summary.verdict;
  summary["matches"] = matches;
  r.exit_code = matches ? 0 : 1;

  r.document = {{"mode", "check"},
                {"records", records},
                {"degenerate", degenerate},
                {"summary", summary},
                {"environment", environment(config)}};
  for (const auto& [k, v] : summary.items()) {
    if (k == "dual_route") {
      for (const auto& [k2, v2] : v.items())
        r.csv_rows.push_back("# dual_route_" + k2 + " = " + (v2.is_number_float() ? format_real(v2.get<double>()) : v2.dump()));
    } else if (v.is_number_float()) {
      r.csv_rows.push_back("# " + k + " = " + format_real(v.get<double>()));
    } else {
      r.csv_rows.push_back("# " + k + " = " + (v.is_string() ? v.get<std::string>() : v.dump()));
    }
  }
  for (const DegeneratePoint& d : ev.degenerate_points) {
    std::string row = "# degenerate";
    for (Eigen::Index i = 0; i < d.u.size(); ++i) row += " " + format_real(d.u[i]);
    r.csv_rows.push_back(row + ": " + d.reason);
  }
  return r;
}

Report run_convergence(const RunConfig& config, const RunOptions& options) {
  const Problem pr = build_problem(config);
  Report r;
  r.mode = Mode::convergence;
  r.csv_rows.push_back("level,points,degenerate,max_normal,max_tangential,max_p_tension,verdict");
  json levels = json::array();
  std::set<Verdict> verdicts;
  for (int level = 0, factor = 1; level < 3; ++level, factor *= 2) {
    const Grid g = pr.grid.refined(factor);
    const GridEvaluation ev =
        evaluate_grid(pr.immersion, pr.ambient, pr.cfg, g.points(), evaluation_options(config, options));
    std::vector<int> counts;
    for (const auto& a : g.axes) counts.push_back(a.count);
    json s = summary_json(ev);
    s["counts"] = counts;
    levels.push_back(s);
    verdicts.insert(ev.summary.verdict);
    r.csv_rows.push_back(std::to_string(level) + "," + std::to_string(ev.summary.points) + "," +
                         std::to_string(ev.summary.degenerate) + "," + format_real(ev.summary.max_normal) + "," +
                         format_real(ev.summary.max_tangential) + "," + format_real(ev.summary.max_p_tension) + "," +
                         std::string(to_string(ev.summary.verdict)));
  }
  const bool consistent = verdicts.size() == 1;
  const Verdict verdict = *verdicts.begin();
  const bool matches = consistent && (!pr.expected || *pr.expected == verdict);
  r.exit_code = matches ? 0 : 1;
  r.document = {{"mode", "convergence"},
                {"levels", levels},
                {"consistent", consistent},
                {"verdict", consistent ? json(to_string(verdict)) : json(nullptr)},
                {"expected", pr.expected ? json(to_string(*pr.expected)) : json(nullptr)},
                {"matches", matches},
                {"environment", environment(config)}};
  r.csv_rows.push_back("# consistent = " + std::string(consistent ? "true" : "false"));
  r.csv_rows.push_back("# matches = " + std::string(matches ? "true" : "false"));
  return r;
}

Report run_search(const RunConfig& config, const RunOptions& options) {
  const Problem pr = build_problem(config);
  GammaFamily family;
  try {
    family = gamma_family(config.family);
  } catch (const Error& e) {
    throw ConfigError(0, e.what());
  }
  const Interval p_range = config.p ? Interval{*config.p, *config.p} : config.p_range;
  const SearchProblem problem(pr.immersion, family, p_range, pr.grid.points(), pr.cfg.orientation);
  SearchOptions so;
  so.max_iters = config.max_iters;
  so.restarts = config.restarts;
  so.simplex_scale = config.simplex_scale;
  so.seed = config.seed.value_or(1);
  so.workers = options.workers;
  so.tolerance = config.tolerance;
  const SearchResult res = minimize(problem, so);

  Report r;
  r.mode = Mode::search;
  json restarts = json::array();
  for (const RestartOutcome& o : res.restarts)
    restarts.push_back({{"params", o.params}, {"p", o.p}, {"objective", o.objective}, {"iterations", o.iterations}});
  json history = json::array();
  r.csv_rows.push_back("restart,iteration,best_objective");
  for (const HistoryEntry& h : res.history) {
    history.push_back({{"restart", h.restart}, {"iteration", h.iteration}, {"best_objective", h.best_objective}});
    r.csv_rows.push_back(std::to_string(h.restart) + "," + std::to_string(h.iteration) + "," +
                         format_real(h.best_objective));
  }
  r.document = {{"mode", "search"},
                {"family", res.family},
                {"best_params", res.best_params},
                {"best_p", res.best_p},
                {"objective", res.objective},
                {"verdict", to_string(res.verdict)},
                {"restarts", restarts},
                {"history", history},
                {"environment", environment(config)}};
  r.csv_rows.push_back("# family = " + res.family);
  for (const auto& [k, v] : res.best_params) r.csv_rows.push_back("# best_" + k + " = " + format_real(v));
  r.csv_rows.push_back("# best_p = " + format_real(res.best_p));
  r.csv_rows.push_back("# objective = " + format_real(res.objective));
  r.csv_rows.push_back("# verdict = " + std::string(to_string(res.verdict)));
  return r;
}

Report run_verify(const RunConfig& config, const RunOptions& options,
                  const std::function<void(const CheckOutcome&)>& on_result) {
  AcceptanceOptions ao;
  ao.tolerance = config.verify_tolerance;
  ao.filter = config.filter;
  if (config.seed) ao.seed = *config.seed;
  ao.workers = options.workers;
  const std::vector<CheckOutcome> outcomes = run_acceptance(ao, on_result);

  Report r;
  r.mode = Mode::verify;
  r.csv_rows.push_back("id,name,passed,seconds,detail");
  json checks = json::array();
  std::size_t failed = 0;
  for (const CheckOutcome& o : outcomes) {
    failed += o.passed ? 0 : 1;
    checks.push_back(
        {{"id", o.id}, {"name", o.name}, {"passed", o.passed}, {"detail", o.detail}, {"seconds", o.seconds}});
    r.csv_rows.push_back(std::to_string(o.id) + "," + o.name + "," + (o.passed ? "true" : "false") + "," +
                         format_real(o.seconds) + "," + csv_escape(o.detail));
  }
  r.exit_code = failed == 0 && !outcomes.empty() ? 0 : 1;
  r.document = {{"mode", "verify"},
                {"checks", checks},
                {"passed", outcomes.size() - failed},
                {"failed", failed},
                {"environment", environment(config)}};
  return r;
}

std::string builtins_listing() {
  std::ostringstream out;
  for (const BuiltinInfo& b : list_builtins()) {
    out << b.name << "\n  " << b.summary << "\n";
    for (const BuiltinParameter& p : b.parameters)
      out << "    " << p.key << " = " << p.default_value << "  " << p.meaning << "\n";
  }
  out << "\nsearch families:\n";
  for (const auto& name : list_gamma_families()) out << "  " << name << "  gamma = " << to_string(gamma_family(name).gamma) << "\n";
  return out.str();
}

}  // namespace pbih
