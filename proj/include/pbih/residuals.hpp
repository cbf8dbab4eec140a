#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pbih/conformal.hpp"
#include "pbih/expr.hpp"
#include "pbih/geometry.hpp"

namespace pbih {

struct ProblemConfig {
  double p = 2.0;
  int m = 2;
  Orientation orientation = Orientation::plus;

  /// Throws PreconditionError unless p ≥ 2 and m ≥ 1.
  void validate() const;
};

/// Left-hand sides of a normal/tangential pair of equations at one point.
struct SystemResidual {
  double normal = 0.0;
  Eigen::VectorXd tangential;  // chart components
  double normal_abs = 0.0;
  /// Norm of `tangential` in the metric the system lives in.
  double tangential_norm = 0.0;
};

struct PTension {
  double norm = 0.0;
  bool is_p_harmonic = false;
};

/// |τ_p(i)| = m^{p/2}|f|.
PTension p_tension(const GeometryAtPoint& geo, const ProblemConfig& cfg, double tolerance = 1e-9);

/// -Δf + f|A|² - f Ric(η,η) + m(p-2)f³  and
/// 2A(grad f) - 2f (Ricci η)^T + (p - 2 + m/2) grad f².
SystemResidual residual_general(const GeometryAtPoint& geo, const ProblemConfig& cfg);

/// The same system in an Einstein ambient, with Ric(η,η) = S/(m+1) and no
/// tangential Ricci term.
SystemResidual residual_einstein(const GeometryAtPoint& geo, const ProblemConfig& cfg,
                                 const ValidatedEinstein& einstein);

struct UmbilicResult {
  std::vector<double> beta_solutions;  // ascending
  bool is_minimal_only = false;
};

/// Constant mean curvatures β of totally umbilic p-biharmonic hypersurfaces
/// of an Einstein space with scalar curvature S.
UmbilicResult umbilic_classification(const ProblemConfig& cfg, double scalar_curvature);

/// The conformally flat system written in base quantities, evaluated as
/// printed. The tangential norm uses the base metric.
SystemResidual residual_conformal_closed_form(const GeometryAtPoint& base, const ProblemConfig& cfg);

/// The general system fed with the closed-form tilde quantities. The
/// tangential norm uses g̃ = e^{2γ}g.
SystemResidual residual_conformal_tilde_route(const GeometryAtPoint& base, const ProblemConfig& cfg);
SystemResidual residual_conformal_tilde_route(const Immersion& base_imm, const AmbientSpace& amb,
                                              const ProblemConfig& cfg, std::span<const double> u);

/// Closed-form residual multiplied by e^{-2γ} (normal) and e^{-3γ}
/// (tangential), with the tangential norm taken in g̃. This is the scale on
/// which it coincides with the tilde route.
SystemResidual closed_form_on_tilde_scale(const SystemResidual& closed_form, const GeometryAtPoint& base);

struct RemarkCondition {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

/// |A|² against m(1-p)η(γ)² - m η(η(γ)), for γ and η(γ) constant along M.
RemarkCondition remark_condition(const GeometryAtPoint& base, const ProblemConfig& cfg,
                                 double tolerance = 1e-9, double constancy_tolerance = 1e-9);

/// (1-p)γ'(c)² - γ''(c) for γ in the variable z (and optionally p).
double ode_example1(const Expr& gamma, double p, double c);

}  // namespace pbih
