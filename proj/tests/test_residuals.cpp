#include <cmath>
#include <random>

#include "doctest.h"

#include "pbih/catalog.hpp"
#include "pbih/errors.hpp"
#include "pbih/geometry.hpp"
#include "pbih/grid.hpp"
#include "pbih/linalg.hpp"
#include "pbih/residuals.hpp"

using namespace pbih;

namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};

GeometryAtPoint at(const Immersion& imm, const AmbientSpace& amb, double a, double b,
                   Orientation o = Orientation::plus) {
  const Eigen::VectorXd u = Eigen::Vector2d(a, b);
  return geometry_at(imm, amb, linalg::as_span(u), o);
}

GeometryAtPoint base(const Immersion& imm, const AmbientSpace& amb, double a, double b) {
  const Eigen::VectorXd u = Eigen::Vector2d(a, b);
  return base_geometry_at(imm, amb, linalg::as_span(u));
}

AmbientSpace stereographic_s3() {
  return AmbientSpace::conformal(parse("ln(2/(1 + x^2 + y^2 + z^2))"), kXYZ);
}

Immersion ellipsoid() {
  return Immersion({"theta", "phi"}, {parse("0.5*sin(theta)*cos(phi)"), parse("0.4*sin(theta)*sin(phi)"),
                                      parse("0.3*cos(theta)")},
                   {{0.0, 3.14159265358979}, {0.0, 6.28318530717959}});
}

}  // namespace

TEST_SUITE("residuals") {

TEST_CASE("p-tension") {
  const NamedConfiguration cat = builtin("catenoid");
  const PTension t = p_tension(at(cat.immersion, cat.ambient, 0.3, 0.7), {3.0, 2, Orientation::plus});
  CHECK(t.norm <= 1e-9);
  CHECK(t.is_p_harmonic);
  const NamedConfiguration sphere = builtin("sphere");
  const PTension s = p_tension(at(sphere.immersion, sphere.ambient, 1.0, 2.0, Orientation::minus),
                               {2.0, 2, Orientation::minus});
  CHECK(s.norm == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(s.is_p_harmonic);
  const NamedConfiguration plane = builtin("flat_plane");
  CHECK(p_tension(at(plane.immersion, plane.ambient, 0.1, 0.2), {}).norm == 0.0);
}

TEST_CASE("sphere residuals scale like m(p-1)/r^3") {
  const Immersion unit = builtin("sphere").immersion;
  const AmbientSpace flat = AmbientSpace::euclidean(3);
  for (double lambda : {1.0, 2.0})
    for (double p : {2.0, 3.0, 4.0}) {
      const ProblemConfig cfg{p, 2, Orientation::minus};
      const SystemResidual r = residual_general(at(unit.scaled(lambda), flat, 1.2, 0.8, cfg.orientation), cfg);
      CHECK(r.normal == doctest::Approx(2.0 * (p - 1.0) / std::pow(lambda, 3)).epsilon(1e-10));
      CHECK(r.tangential_norm <= 1e-10);
    }
}

TEST_CASE("minimal surfaces in Euclidean space have zero residual") {
  for (const char* name : {"catenoid", "flat_plane"}) {
    const NamedConfiguration nc = builtin(name);
    const SystemResidual r = residual_general(at(nc.immersion, nc.ambient, 0.5, 0.25), {3.0, 2, Orientation::plus});
    CHECK(r.normal_abs <= 1e-10);
    CHECK(r.tangential_norm <= 1e-10);
  }
}

TEST_CASE("umbilic classification") {
  for (double p : {2.0, 3.0, 7.5}) {
    const UmbilicResult neg = umbilic_classification({p, 2, Orientation::plus}, -6.0);
    CHECK(neg.is_minimal_only);
    CHECK(neg.beta_solutions == std::vector<double>{0.0});
  }
  const UmbilicResult pos = umbilic_classification({2.0, 2, Orientation::plus}, 6.0);
  CHECK_FALSE(pos.is_minimal_only);
  REQUIRE(pos.beta_solutions.size() == 3);
  CHECK(pos.beta_solutions[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pos.beta_solutions[1] == 0.0);
  CHECK(pos.beta_solutions[2] == doctest::Approx(1.0).epsilon(1e-15));
  const UmbilicResult zero = umbilic_classification({3.0, 2, Orientation::plus}, 0.0);
  CHECK(zero.beta_solutions == std::vector<double>{0.0});
}

TEST_CASE("Einstein system agrees with the general system in the round ambient") {
  const AmbientSpace s3 = stereographic_s3().declared_einstein(6.0);
  const Immersion imm = ellipsoid();
  std::vector<Eigen::VectorXd> pts;
  for (double a : {0.4, 1.3, 2.2}) pts.push_back(at(imm, s3, a, 1.0).x);
  const ValidatedEinstein v = validate_einstein(s3, pts);
  for (double a : {0.4, 1.3, 2.2}) {
    const GeometryAtPoint geo = at(imm, s3, a, 1.0);
    const ProblemConfig cfg{3.0, 2, Orientation::plus};
    const SystemResidual e = residual_einstein(geo, cfg, v);
    const SystemResidual g = residual_general(geo, cfg);
    CHECK(std::abs(e.normal - g.normal) <= 1e-8);
    CHECK((e.tangential - g.tangential).norm() <= 1e-8);
  }
}

TEST_CASE("Einstein system with zero curvature reduces to the flat general system") {
  const NamedConfiguration sphere = builtin("sphere");
  const AmbientSpace flat = AmbientSpace::conformal(parse("0"), kXYZ).declared_einstein(0.0);
  const GeometryAtPoint geo = at(sphere.immersion, flat, 1.0, 1.0, Orientation::minus);
  const ValidatedEinstein v = validate_einstein(flat, std::vector<Eigen::VectorXd>{geo.x});
  const ProblemConfig cfg{2.0, 2, Orientation::minus};
  CHECK(residual_einstein(geo, cfg, v).normal == doctest::Approx(residual_general(geo, cfg).normal).epsilon(1e-14));
}

TEST_CASE("ellipsoid in the round ambient is far from biharmonic") {
  const AmbientSpace s3 = stereographic_s3();
  const Immersion imm = ellipsoid();
  const auto points = grid_over_domain(imm, 8, 0.02).points();
  int large = 0;
  for (const auto& u : points) {
    const SystemResidual r = residual_general(geometry_at(imm, s3, linalg::as_span(u)), {2.0, 2, Orientation::plus});
    large += std::max(r.normal_abs, r.tangential_norm) > 0.1 ? 1 : 0;
  }
  CHECK(large * 2 > static_cast<int>(points.size()));
}

TEST_CASE("closed form and tilde route on the logarithmic hyperplane") {
  const NamedConfiguration nc = builtin("hyperplane_example1");
  const GeometryAtPoint b = base(nc.immersion, nc.ambient, -0.4, 0.2);
  const SystemResidual closed = residual_conformal_closed_form(b, nc.cfg);
  CHECK(closed.normal_abs <= 1e-10);
  CHECK(closed.tangential_norm == 0.0);
  const SystemResidual tilde = residual_conformal_tilde_route(b, nc.cfg);
  CHECK(tilde.normal_abs <= 1e-9);
  const SystemResidual scaled = closed_form_on_tilde_scale(closed, b);
  CHECK(std::abs(scaled.normal - tilde.normal) <= 1e-8);
}

TEST_CASE("constant factor gives zero conformal residuals") {
  const AmbientSpace amb = AmbientSpace::conformal(parse("-0.4"), kXYZ);
  const GeometryAtPoint b = base(builtin("catenoid").immersion, amb, 0.3, 0.5);
  const ProblemConfig cfg{3.0, 2, Orientation::plus};
  CHECK(residual_conformal_closed_form(b, cfg).normal_abs <= 1e-14);
  CHECK(residual_conformal_closed_form(b, cfg).tangential_norm <= 1e-14);
  CHECK(residual_conformal_tilde_route(b, cfg).normal_abs <= 1e-14);
}

TEST_CASE("the three routes agree on a catenoid") {
  const Immersion cat = builtin("catenoid").immersion;
  const AmbientSpace amb = AmbientSpace::conformal(parse("0.2*sin(x) - 0.3*cos(y + z) + 0.1*sin(z)"), kXYZ);
  const ProblemConfig cfg{3.0, 2, Orientation::plus};
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> a(0.0, 6.28), c(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const double u1 = a(rng), u2 = c(rng);
    const GeometryAtPoint b = base(cat, amb, u1, u2);
    const SystemResidual direct = residual_general(at(cat, amb, u1, u2), cfg);
    const SystemResidual tilde = residual_conformal_tilde_route(b, cfg);
    const SystemResidual closed = closed_form_on_tilde_scale(residual_conformal_closed_form(b, cfg), b);
    CHECK(std::abs(direct.normal - tilde.normal) <= 1e-6);
    CHECK(std::abs(closed.normal - tilde.normal) <= 1e-6);
    CHECK((direct.tangential - tilde.tangential).norm() <= 1e-6);
    CHECK((closed.tangential - tilde.tangential).norm() <= 1e-6);
  }
}

TEST_CASE("condition for constant normal derivative of the factor") {
  const Immersion plane = builtin("flat_plane").immersion;
  for (double k : {0.0, 0.5}) {
    const AmbientSpace amb = AmbientSpace::conformal(parse(std::to_string(k) + "*z"), kXYZ);
    const RemarkCondition rc = remark_condition(base(plane, amb, 0.1, 0.2), {3.0, 2, Orientation::plus});
    CHECK(rc.lhs == 0.0);
    CHECK(rc.rhs == doctest::Approx(2.0 * (1.0 - 3.0) * k * k));
    CHECK(rc.satisfied == (k == 0.0));
  }
  const NamedConfiguration ex1 = builtin("hyperplane_example1");
  const RemarkCondition rc = remark_condition(base(ex1.immersion, ex1.ambient, 0.0, 0.0), ex1.cfg);
  CHECK(std::abs(rc.rhs) <= 1e-12);
  CHECK(rc.satisfied);
  const AmbientSpace z = AmbientSpace::conformal(parse("z"), kXYZ);
  CHECK_THROWS_AS(remark_condition(base(builtin("catenoid").immersion, z, 0.3, 0.4), {3.0, 2, Orientation::plus}),
                  PreconditionError);
}

TEST_CASE("one-dimensional condition for the hyperplane") {
  const Expr g1 = parse("ln((p - 1)*(c1*z + c2))/(p - 1)");
  CHECK(std::abs(ode_example1(substitute_values(g1, {{"c1", 1.0}, {"c2", 1.0}}), 3.0, 0.0)) <= 1e-12);
  CHECK(std::abs(ode_example1(parse("ln(z)/(p - 1)"), 2.0, 1.0)) <= 1e-12);
  CHECK(ode_example1(parse("z"), 3.0, 0.0) == -2.0);
  CHECK_THROWS_AS(ode_example1(parse("ln(z)"), 3.0, 0.0), DomainError);
}

TEST_CASE("problem config validation") {
  CHECK_THROWS_AS((ProblemConfig{1.5, 2, Orientation::plus}.validate()), PreconditionError);
  CHECK_THROWS_AS((ProblemConfig{2.0, 0, Orientation::plus}.validate()), PreconditionError);
}

}
