#include <cmath>
#include <sstream>

#include "doctest.h"

#include "pbih/errors.hpp"
#include "pbih/run.hpp"

using namespace pbih;
using nlohmann::json;

namespace {

std::size_t error_line(const char* text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return 999;
}

std::vector<std::vector<double>> csv_numbers(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

const char* kExample1 = R"cfg(
# hyperplane in the logarithmic conformal factor
[run]
p = 3
expect = proper_p_biharmonic

[surface]
builtin = hyperplane_example1

[parameters]
c1 = 1
c2 = 1
c = 0

[grid]
count = 4
)cfg";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"cfg(
[run]
mode = search
p = 2.5
tolerance = 1e-9   ; trailing comment
seed = 7
[surface]
variables = "u, v"
component1 = "u"
component2 = "v"
component3 = "a*u^2 - a*v^2"
orientation = minus
[parameters]
a = 0.25
[ambient]
gamma = "ln(1 + z^2)"
[grid]
u = -1, 1, 5
v = -0.5, 0.5, 3
margin = 0
[search]
family = radial
p_min = 2
p_max = 3
restarts = 2
)cfg");
  CHECK(c.mode == Mode::search);
  CHECK(*c.p == 2.5);
  CHECK(c.tolerance == 1e-9);
  CHECK(*c.seed == 7);
  CHECK(c.chart_variables == std::vector<std::string>{"u", "v"});
  CHECK(c.components.size() == 3);
  CHECK(*c.orientation == Orientation::minus);
  CHECK(c.parameters.at("a") == 0.25);
  CHECK(*c.gamma == "ln(1 + z^2)");
  REQUIRE(c.axes.size() == 2);
  CHECK(c.axes[1].axis.count == 3);
  CHECK(c.margin == 0.0);
  CHECK(c.family == "radial");
  CHECK(c.p_range.hi == 3.0);
  CHECK(c.restarts == 2);
  CHECK(to_config_text(parse_config(to_config_text(c))) == to_config_text(c));
}

TEST_CASE("quoted strings keep escapes") {
  const RunConfig c = parse_config("[run]\nfilter = \"a \\\"b\\\" \\\\ c\"\n");
  CHECK(c.filter == "a \"b\" \\ c");
  CHECK(parse_config(to_config_text(c)).filter == c.filter);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("p = 3\n") == 1);
  CHECK(error_line("[run]\np = 3\np = 4\n") == 3);
  CHECK(error_line("[run]\n\np = three\n") == 3);
  CHECK(error_line("[run]\nspeed = 1\n") == 2);
  CHECK(error_line("[grid]\nu = 0, 1, 1\n") == 2);
  CHECK(error_line("[grid]\ncount = 1\n") == 2);
  CHECK(error_line("[surface]\ncomponent1 = \"sin(\"\n") == 2);
  CHECK(error_line("[run]\ntolerance = 0\n") == 2);
  CHECK(error_line("[nowhere]\n") == 1);
  CHECK(error_line("[run]\nexpect = maybe\n") == 2);
}

TEST_CASE("builtins listing names every builtin and family") {
  const std::string text = builtins_listing();
  for (const char* name : {"hyperplane_example1", "revolution_disk_example2", "catenoid", "sphere", "flat_plane",
                           "log_quadratic_z"})
    CHECK(text.find(name) != std::string::npos);
}

TEST_CASE("check on the logarithmic hyperplane") {
  const Report r = run_check(parse_config(kExample1));
  CHECK(r.exit_code == 0);
  const json& s = r.document["summary"];
  CHECK(s["verdict"] == "proper_p_biharmonic");
  CHECK(s["max_normal"].get<double>() <= 1e-10);
  CHECK(s["max_tangential"].get<double>() <= 1e-10);
  CHECK(s["points"] == 16);
  CHECK(s["route"] == "conformal_tilde");
}

TEST_CASE("check on the sphere") {
  const Report r = run_check(parse_config("[surface]\nbuiltin = sphere\n[run]\np = 2\n"));
  CHECK(r.exit_code == 0);
  CHECK(r.document["summary"]["verdict"] == "neither");
  CHECK(std::abs(r.document["summary"]["max_normal"].get<double>() - 2.0) <= 1e-8);
}

TEST_CASE("check on the catenoid") {
  const Report r = run_check(parse_config("[surface]\nbuiltin = catenoid\n"));
  CHECK(r.exit_code == 0);
  CHECK(r.document["summary"]["verdict"] == "p_harmonic");
}

TEST_CASE("a verdict mismatch exits 1") {
  const Report r = run_check(parse_config("[surface]\nbuiltin = catenoid\n[run]\nexpect = neither\n"));
  CHECK(r.exit_code == 1);
  CHECK(r.document["summary"]["matches"] == false);
}

TEST_CASE("csv and json carry the same records") {
  const Report r = run_check(parse_config("[surface]\nbuiltin = revolution_disk_example2\n[grid]\ncount = 5\n"));
  const auto rows = csv_numbers(r.render(Format::csv));
  const json doc = json::parse(r.render(Format::json));
  const json& records = doc["records"];
  REQUIRE(rows.size() == records.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& rec = records[i];
    std::vector<double> expect = rec["u"].get<std::vector<double>>();
    for (const char* k : {"f", "A_norm_sq", "res_normal", "res_tangential_norm"}) expect.push_back(rec[k]);
    CHECK(rows[i] == expect);
  }
  const std::string header = r.render(Format::csv).substr(0, r.render(Format::csv).find('\n'));
  CHECK(header == "u1,u2,f,A_norm_sq,res_normal,res_tangential_norm");
}

TEST_CASE("summary maxima are the maxima of the records") {
  const Report r = run_check(parse_config("[surface]\nbuiltin = sphere\n[run]\np = 3\n[grid]\ncount = 5\n"));
  double mn = 0.0, mt = 0.0;
  for (const json& rec : r.document["records"]) {
    mn = std::max(mn, rec["res_normal"].get<double>());
    mt = std::max(mt, rec["res_tangential_norm"].get<double>());
  }
  CHECK(r.document["summary"]["max_normal"].get<double>() == mn);
  CHECK(r.document["summary"]["max_tangential"].get<double>() == mt);
}

TEST_CASE("reports re-run from their config echo") {
  const Report first = run_check(parse_config(kExample1));
  const std::string echo = first.document["environment"]["config"];
  const Report again = run_check(parse_config(echo));
  for (const char* k : {"max_normal", "max_tangential", "mean_normal", "max_p_tension"})
    CHECK(std::abs(first.document["summary"][k].get<double>() - again.document["summary"][k].get<double>()) <= 1e-12);
  CHECK(first.document["summary"]["verdict"] == again.document["summary"]["verdict"]);
}

TEST_CASE("output does not depend on the worker count") {
  const RunConfig c = parse_config("[surface]\nbuiltin = catenoid\n[grid]\ncount = 7\n");
  CHECK(run_check(c, {1}).render(Format::json) == run_check(c, {4}).render(Format::json));
}

TEST_CASE("inline surface with parameters and a custom factor") {
  const Report r = run_check(parse_config(R"cfg(
[surface]
variables = "u, v"
component1 = "u"
component2 = "v"
component3 = "h"
[parameters]
h = 0.5
[ambient]
gamma = "ln(2*z + 1)/(p - 1)"
[run]
p = 3
expect = proper_p_biharmonic
[grid]
u = -1, 1, 3
v = -1, 1, 3
)cfg"));
  CHECK(r.exit_code == 0);
  CHECK(r.document["records"].size() == 9);
}

TEST_CASE("unknown names in expressions are config errors") {
  CHECK_THROWS_AS(build_problem(parse_config("[surface]\nbuiltin = catenoid\n[ambient]\ngamma = \"q*z\"\n")),
                  ConfigError);
  CHECK_THROWS_AS(build_problem(parse_config(
                      "[surface]\nvariables = \"u, v\"\ncomponent1 = \"u\"\ncomponent2 = \"v\"\ncomponent3 = \"w\"\n"
                      "[grid]\nu = 0, 1, 2\nv = 0, 1, 2\n")),
                  ConfigError);
  CHECK_THROWS_AS(build_problem(parse_config("[surface]\nbuiltin = catenoid\n[parameters]\nzeta = 1\n")), ConfigError);
}

TEST_CASE("degenerate points are listed, not fatal") {
  const Report r = run_check(parse_config("[surface]\nbuiltin = sphere\n[grid]\nmargin = 0\ntheta = 0, 3.141592653589793, 3\nphi = 0, 1, 2\n"));
  CHECK(r.document["degenerate"].size() == 4);
  CHECK(r.document["records"].size() == 2);
}

TEST_CASE("an everywhere degenerate chart is an error") {
  const RunConfig c = parse_config(
      "[surface]\nvariables = \"u, v\"\ncomponent1 = \"u\"\ncomponent2 = \"0\"\ncomponent3 = \"0\"\n"
      "[grid]\nu = 0, 1, 2\nv = 0, 1, 2\n");
  CHECK_THROWS_AS(run_check(c), PreconditionError);
}

TEST_CASE("convergence on the revolution disk") {
  const Report r = run_convergence(parse_config("[surface]\nbuiltin = revolution_disk_example2\n[grid]\ncount = 8\n"));
  CHECK(r.exit_code == 0);
  const json& levels = r.document["levels"];
  REQUIRE(levels.size() == 3);
  const int counts[] = {8, 16, 32};
  for (int i = 0; i < 3; ++i) {
    CHECK(levels[i]["counts"][0] == counts[i]);
    CHECK(levels[i]["max_normal"].get<double>() <= 1e-9);
    CHECK(levels[i]["max_tangential"].get<double>() <= 1e-9);
  }
}

TEST_CASE("convergence on the sphere") {
  const Report r = run_convergence(parse_config("[surface]\nbuiltin = sphere\n[run]\np = 2\n[grid]\ncount = 4\n"));
  CHECK(r.exit_code == 0);
  for (const json& level : r.document["levels"])
    CHECK(std::abs(level["max_normal"].get<double>() - 2.0) <= 1e-8);
}

TEST_CASE("search report") {
  const Report r = run_search(parse_config(
      "[surface]\nbuiltin = hyperplane_example1\n[run]\np = 3\nseed = 2\n[grid]\ncount = 4\n"
      "[search]\nfamily = log_affine_z\nrestarts = 3\nmax_iters = 150\n"));
  CHECK(r.document["verdict"] == "candidate_found");
  CHECK(r.document["objective"].get<double>() <= 1e-8);
  CHECK(r.document["restarts"].size() == 3);
  CHECK(!r.document["history"].empty());
}

TEST_CASE("verify filtered to the expression engine") {
  RunConfig c;
  c.mode = Mode::verify;
  c.filter = "expr";
  int seen = 0;
  const Report r = run_verify(c, {}, [&](const CheckOutcome&) { ++seen; });
  CHECK(seen == 1);
  CHECK(r.exit_code == 0);
  CHECK(r.document["checks"][0]["id"] == 11);
  c.filter = "no_such_check";
  CHECK(run_verify(c).exit_code == 1);
}

}
