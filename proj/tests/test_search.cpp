#include <cmath>

#include "doctest.h"

#include "pbih/catalog.hpp"
#include "pbih/errors.hpp"
#include "pbih/grid.hpp"
#include "pbih/search.hpp"

using namespace pbih;

namespace {

std::vector<Eigen::VectorXd> small_grid(const Immersion& imm) { return grid_over_domain(imm, 4).points(); }

std::vector<double> ordered(const SearchProblem& sp, const SearchResult& r) {
  std::vector<double> out;
  for (const auto& name : sp.family().parameter_names) out.push_back(r.best_params.at(name));
  return out;
}

SearchProblem hyperplane_problem(const std::string& family, Interval p_range = {3.0, 3.0}) {
  const Immersion plane = builtin("hyperplane_example1").immersion;
  return SearchProblem(plane, gamma_family(family), p_range, small_grid(plane));
}

SearchProblem catenoid_problem(const std::string& family, Interval p_range) {
  const Immersion cat = builtin("catenoid").immersion;
  return SearchProblem(cat, gamma_family(family), p_range, small_grid(cat));
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("known solution has a vanishing objective") {
  const SearchProblem sp = hyperplane_problem("log_affine_z");
  const double params[] = {1.0, 1.0};
  CHECK(sp.objective(params, 3.0) <= 1e-9);
}

TEST_CASE("a vanishing factor triggers the properness penalty") {
  const SearchProblem sp = catenoid_problem("power_z", {2.0, 2.0});
  const double zero[] = {0.0, 0.0, 0.0};
  CHECK(sp.objective(zero, 2.0) >= sp.proper_tolerance());
}

TEST_CASE("a linear factor on the catenoid is not a solution") {
  const SearchProblem sp = catenoid_problem("power_z", {2.0, 2.0});
  const double linear[] = {0.1, 0.0, 0.0};
  CHECK(sp.objective(linear, 2.0) > 0.0);
}

TEST_CASE("a non-minimal base is rejected") {
  const Immersion sphere = builtin("sphere").immersion;
  CHECK_THROWS_AS(SearchProblem(sphere, gamma_family("radial"), {2.0, 2.0}, small_grid(sphere)), PreconditionError);
}

TEST_CASE("unknown family") { CHECK_THROWS_AS(gamma_family("nope"), Error); }

TEST_CASE("zero iterations return the starting point") {
  const SearchProblem sp = hyperplane_problem("log_affine_z");
  SearchOptions opt;
  opt.max_iters = 0;
  opt.restarts = 1;
  const SearchResult r = minimize(sp, opt);
  REQUIRE(r.restarts.size() == 1);
  CHECK(r.restarts[0].iterations == 0);
  CHECK(r.objective == sp.objective(ordered(sp, r), r.best_p));
}

TEST_CASE("recovery on the hyperplane and reproducibility") {
  const SearchProblem sp = hyperplane_problem("log_affine_z");
  SearchOptions opt;
  opt.seed = 42;
  opt.workers = 1;
  const SearchResult a = minimize(sp, opt);
  opt.workers = 4;
  const SearchResult b = minimize(sp, opt);
  CHECK(a.verdict == SearchVerdict::candidate_found);
  CHECK(a.objective <= 1e-8);
  CHECK(a.objective == b.objective);
  CHECK(a.best_params == b.best_params);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 1; i < a.history.size(); ++i)
    CHECK(a.history[i].best_objective <= a.history[i - 1].best_objective);
  CHECK(std::abs(sp.objective(ordered(sp, a), a.best_p) - a.objective) <= 1e-12);
}

TEST_CASE("parameters stay inside the family bounds") {
  const SearchProblem sp = catenoid_problem("log_quadratic_z", {2.0, 4.0});
  SearchOptions opt;
  opt.max_iters = 60;
  opt.restarts = 4;
  const SearchResult r = minimize(sp, opt);
  const GammaFamily& fam = sp.family();
  for (const RestartOutcome& o : r.restarts) {
    for (std::size_t i = 0; i < fam.bounds.size(); ++i) {
      CHECK(o.params[i] >= fam.bounds[i].lo);
      CHECK(o.params[i] <= fam.bounds[i].hi);
    }
    CHECK(o.p >= 2.0);
    CHECK(o.p <= 4.0);
  }
  CHECK(std::isfinite(r.objective));
}

TEST_CASE("scaled family recovers the exponent 1/(p-1)") {
  const SearchProblem sp = hyperplane_problem("scaled_log_affine_z");
  SearchOptions opt;
  opt.seed = 3;
  const SearchResult r = minimize(sp, opt);
  CHECK(r.objective <= 1e-8);
  CHECK(r.best_params.at("k") == doctest::Approx(0.5).epsilon(1e-4));
}

}
