#include <cmath>
#include <random>

#include "doctest.h"

#include "pbih/catalog.hpp"
#include "pbih/conformal.hpp"
#include "pbih/errors.hpp"
#include "pbih/linalg.hpp"

using namespace pbih;

namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};

Immersion horizontal_plane(double c) {
  return Immersion({"u", "v"}, {parse("u"), parse("v"), Expr::constant(c)}, {{-1.0, 1.0}, {-1.0, 1.0}});
}

GeometryAtPoint base_at(const Immersion& imm, const AmbientSpace& amb, double a, double b) {
  const Eigen::Vector2d u(a, b);
  return base_geometry_at(imm, amb, linalg::as_span(Eigen::VectorXd(u)));
}

GeometryAtPoint direct_at(const Immersion& imm, const AmbientSpace& amb, double a, double b) {
  const Eigen::Vector2d u(a, b);
  return geometry_at(imm, amb, linalg::as_span(Eigen::VectorXd(u)));
}

}  // namespace

TEST_SUITE("conformal") {

TEST_CASE("constant factor leaves the tilde data trivial") {
  const AmbientSpace amb = AmbientSpace::conformal(parse("0.7"), kXYZ);
  const Immersion cat = builtin("catenoid").immersion;
  const GeometryAtPoint base = base_at(cat, amb, 0.4, 0.3);
  CHECK((tilde_second_fundamental(base) - base.B).cwiseAbs().maxCoeff() == 0.0);
  const TildeQuantities t = tilde_quantities(base);
  CHECK(t.f_tilde == 0.0);
  CHECK(t.grad_f_tilde.norm() == 0.0);
  CHECK(t.A_grad_f_tilde.norm() == 0.0);
  CHECK(t.lap_f_tilde == 0.0);
  CHECK(std::abs(t.ric_tilde_eta_eta) <= 1e-14);
  CHECK(t.ricci_tilde_eta_tan.norm() <= 1e-14);
}

TEST_CASE("plane in the factor e^{2z}") {
  const AmbientSpace amb = AmbientSpace::conformal(parse("z"), kXYZ);
  const Immersion plane = horizontal_plane(0.0);
  const GeometryAtPoint base = base_at(plane, amb, 0.2, -0.3);
  const Eigen::MatrixXd Bt = tilde_second_fundamental(base);
  CHECK((Bt + base.g).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(tilde_mean_curvature(base) == doctest::Approx(-1.0).epsilon(1e-15));
  const GeometryAtPoint direct = direct_at(plane, amb, 0.2, -0.3);
  CHECK(direct.f == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK((direct.B + base.g).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("tilde |A|^2 on a raised plane") {
  const AmbientSpace amb = AmbientSpace::conformal(parse("z"), kXYZ);
  const GeometryAtPoint base = base_at(horizontal_plane(0.5), amb, 0.1, 0.1);
  CHECK(tilde_A_norm_sq(base) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("hyperplane with the logarithmic factor") {
  const NamedConfiguration nc = builtin("hyperplane_example1");
  const GeometryAtPoint base = base_at(nc.immersion, nc.ambient, 0.3, 0.6);
  CHECK(tilde_mean_curvature(base) == doctest::Approx(-std::pow(2.0, -1.5)).epsilon(1e-14));
  CHECK(tilde_grad_f(base).norm() <= 1e-15);
  CHECK(tilde_A_grad_f(base).norm() <= 1e-15);
  const GeometryAtPoint direct = direct_at(nc.immersion, nc.ambient, 0.3, 0.6);
  CHECK(direct.f == doctest::Approx(-std::pow(2.0, -1.5)).epsilon(1e-12));
}

TEST_CASE("catenoid waist with the factor e^{2z}") {
  const AmbientSpace amb = AmbientSpace::conformal(parse("z"), kXYZ);
  const Immersion cat = builtin("catenoid").immersion;
  const GeometryAtPoint base = base_at(cat, amb, 0.9, 0.0);
  CHECK(tilde_A_norm_sq(base) == doctest::Approx(direct_at(cat, amb, 0.9, 0.0).A_norm_sq).epsilon(1e-8));
}

TEST_CASE("non-minimal base is rejected") {
  const AmbientSpace amb = AmbientSpace::conformal(parse("z"), kXYZ);
  const GeometryAtPoint base = base_at(builtin("sphere").immersion, amb, 1.0, 0.5);
  CHECK_THROWS_AS(tilde_mean_curvature(base), PreconditionError);
  CHECK_THROWS_AS(tilde_quantities(base), PreconditionError);
  CHECK_NOTHROW(tilde_second_fundamental(base));
}

TEST_CASE("tilde quantities match the direct computation") {
  const AmbientSpace amb = AmbientSpace::conformal(parse("0.3*z + 0.2*sin(x) + 0.1*cos(y + z)"), kXYZ);
  const Immersion cat = builtin("catenoid").immersion;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(0.0, 6.28), b(-1.5, 1.5);
  for (int i = 0; i < 25; ++i) {
    const double u1 = a(rng), u2 = b(rng);
    const GeometryAtPoint base = base_at(cat, amb, u1, u2);
    const GeometryAtPoint geo = direct_at(cat, amb, u1, u2);
    const TildeQuantities t = tilde_quantities(base);
    CHECK(t.f_tilde == doctest::Approx(geo.f).epsilon(1e-9));
    CHECK(std::abs(t.A_tilde_norm_sq - geo.A_norm_sq) <= 1e-8);
    CHECK(std::abs(t.lap_f_tilde - geo.lap_f) <= 1e-8);
    CHECK((t.grad_f_tilde - geo.grad_f).norm() <= 1e-8);
    CHECK((t.A_grad_f_tilde - geo.A * geo.grad_f).norm() <= 1e-8);
    CHECK(std::abs(t.ric_tilde_eta_eta - geo.ric_eta_eta) <= 1e-8);
    CHECK((t.ricci_tilde_eta_tan - geo.ricci_eta_tan).norm() <= 1e-8);
    CHECK((geo.B - std::exp(base.gamma) * t.B_tilde).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((t.g_tilde - geo.g).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(t.A_tilde_norm_sq >= 0.0);
    CHECK(t.f_tilde == -base.eta_gamma * std::exp(-base.gamma));
  }
}

}
