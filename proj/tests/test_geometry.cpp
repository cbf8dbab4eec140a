#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"

#include "pbih/catalog.hpp"
#include "pbih/errors.hpp"
#include "pbih/geometry.hpp"
#include "pbih/jet.hpp"
#include "pbih/linalg.hpp"

using namespace pbih;

namespace {

Eigen::VectorXd pt(double a, double b) { return Eigen::Vector2d(a, b); }

AmbientSpace stereographic_s3() {
  return AmbientSpace::conformal(parse("ln(2/(1 + x^2 + y^2 + z^2))"), {"x", "y", "z"});
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("flat plane is totally geodesic") {
  const NamedConfiguration nc = builtin("flat_plane");
  const auto geo = geometry_at(nc.immersion, nc.ambient, linalg::as_span(pt(0.3, -0.2)));
  CHECK(geo.f == 0.0);
  CHECK(geo.A_norm_sq == 0.0);
  CHECK(geo.B.norm() == 0.0);
}

TEST_CASE("unit sphere with inward normal") {
  const NamedConfiguration nc = builtin("sphere");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(0.2, 2.9), ph(0.0, 6.2);
  for (int i = 0; i < 20; ++i) {
    const auto geo = geometry_at(nc.immersion, nc.ambient, linalg::as_span(pt(th(rng), ph(rng))), Orientation::minus);
    CHECK(geo.f == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(geo.A_norm_sq == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(geo.eta.dot(geo.x) + 1.0) <= 1e-12);
  }
}

TEST_CASE("catenoid at the waist") {
  const NamedConfiguration nc = builtin("catenoid");
  const auto geo = geometry_at(nc.immersion, nc.ambient, linalg::as_span(pt(0.7, 0.0)));
  CHECK(std::abs(geo.f) <= 1e-10);
  CHECK(geo.A_norm_sq == doctest::Approx(2.0).epsilon(1e-12));
  // principal curvatures ±1/cosh^2(0) from an independent eigen decomposition
  Eigen::EigenSolver<Eigen::MatrixXd> es(geo.A);
  Eigen::VectorXd k = es.eigenvalues().real();
  std::sort(k.data(), k.data() + k.size());
  CHECK(k[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(k[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("catenoid principal curvatures away from the waist") {
  const NamedConfiguration nc = builtin("catenoid");
  const double x2 = 0.8;
  const auto geo = geometry_at(nc.immersion, nc.ambient, linalg::as_span(pt(1.1, x2)));
  CHECK(std::abs(geo.f) <= 1e-12);
  CHECK(geo.A_norm_sq == doctest::Approx(2.0 / std::pow(std::cosh(x2), 4)).epsilon(1e-12));
}

TEST_CASE("frame invariants in a conformal ambient") {
  const NamedConfiguration nc = builtin("catenoid");
  const AmbientSpace amb = AmbientSpace::conformal(parse("0.3*sin(x) + 0.2*cos(y + z)"), {"x", "y", "z"});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(0.0, 6.2), b(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd u = pt(a(rng), b(rng));
    const auto geo = geometry_at(nc.immersion, amb, linalg::as_span(u));
    const Eigen::MatrixXd h = amb.metric(linalg::as_span(geo.x));
    CHECK(std::abs(geo.eta.dot(h * geo.eta) - 1.0) <= 1e-12);
    const Eigen::VectorXd tang = geo.frame.transpose() * h * geo.eta;
    CHECK(tang.cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::MatrixXd gA = geo.g * geo.A;
    CHECK((gA - gA.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(geo.f == doctest::Approx(geo.A.trace() / 2).epsilon(1e-12));
    CHECK(geo.f == doctest::Approx((geo.g_inv * geo.B).trace() / 2).epsilon(1e-12));
    CHECK(geo.A_norm_sq >= 2 * geo.f * geo.f - 1e-12);
  }
}

TEST_CASE("intrinsic Laplacian examples") {
  const NamedConfiguration sphere = builtin("sphere");
  const Eigen::VectorXd u = pt(1.1, 0.4);
  const IntrinsicOps c = intrinsic_scalar_ops(sphere.immersion, sphere.ambient, parse("5"), linalg::as_span(u));
  CHECK(c.grad_M.norm() == 0.0);
  CHECK(c.lap_M == 0.0);
  const IntrinsicOps y1 =
      intrinsic_scalar_ops(sphere.immersion, sphere.ambient, parse("cos(theta)"), linalg::as_span(u));
  CHECK(y1.lap_M == doctest::Approx(-2.0 * std::cos(1.1)).epsilon(1e-10));
  const NamedConfiguration plane = builtin("flat_plane");
  const Eigen::VectorXd w = pt(0.6, -0.3);
  const IntrinsicOps q = intrinsic_scalar_ops(plane.immersion, plane.ambient, parse("u^2 + v^2"), linalg::as_span(w));
  CHECK(q.lap_M == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("ambient curvature") {
  const Eigen::Vector3d x(0.3, -0.4, 0.5);
  const Eigen::Vector3d eta(0, 0, 1);
  const Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(3, 2);
  const AmbientCurvature flat = ambient_curvature(AmbientSpace::euclidean(3), linalg::as_span(x), eta, frame);
  CHECK(flat.ric_eta_eta == 0.0);
  CHECK(flat.ricci_eta_tan.norm() == 0.0);
  CHECK(flat.scalar_S == 0.0);

  const AmbientSpace s3 = stereographic_s3();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d y(d(rng), d(rng), d(rng));
    CHECK(s3.scalar_curvature(linalg::as_span(y)) == doctest::Approx(6.0).epsilon(1e-10));
    const Eigen::MatrixXd dev = s3.ricci(linalg::as_span(y)) - 2.0 * s3.metric(linalg::as_span(y));
    CHECK(dev.cwiseAbs().maxCoeff() <= 1e-10);
  }

  const AmbientSpace vertical = AmbientSpace::conformal(parse("ln(1 + z^2)"), {"x", "y", "z"});
  const NamedConfiguration plane = builtin("flat_plane");
  const auto geo = geometry_at(plane.immersion, vertical, linalg::as_span(pt(0.2, 0.1)));
  CHECK(geo.ricci_eta_tan.norm() <= 1e-14);
}

TEST_CASE("Einstein validation") {
  std::vector<Eigen::VectorXd> pts{Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d(-1.0, 0.5, 1.5)};
  const ValidatedEinstein v = validate_einstein(stereographic_s3().declared_einstein(6.0), pts);
  CHECK(v.scalar_curvature() == 6.0);
  CHECK(v.max_deviation() <= 1e-10);
  CHECK_THROWS_AS(validate_einstein(stereographic_s3().declared_einstein(3.0), pts), PreconditionError);
  const AmbientSpace not_einstein = AmbientSpace::conformal(parse("z"), {"x", "y", "z"}).declared_einstein(0.0);
  CHECK_THROWS_AS(validate_einstein(not_einstein, pts), PreconditionError);
}

TEST_CASE("degenerate chart points are rejected") {
  const NamedConfiguration sphere = builtin("sphere");
  CHECK_THROWS_AS(geometry_at(sphere.immersion, sphere.ambient, linalg::as_span(pt(0.0, 0.3))), DegenerateChartError);
}

TEST_CASE("determinant keeps derivatives of a zero-valued jet") {
  // det [[t, 1], [0, 1]] = t, whose value at t = 0 vanishes while d/dt = 1
  const JetLayout& layout = JetLayout::get(1, 2);
  const Jet t = Jet::variable(layout, 0, 0.0);
  Eigen::Matrix<Jet, 2, 2> m;
  m << t, Jet(layout, 1.0), Jet(layout, 0.0), Jet(layout, 1.0);
  const Jet d = linalg::determinant(m);
  CHECK(d.value() == 0.0);
  CHECK(d.d(0) == doctest::Approx(1.0));
}

}
