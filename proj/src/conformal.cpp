#include "pbih/conformal.hpp"

#include <cmath>
#include <string>

namespace pbih {

void require_minimal(const GeometryAtPoint& base, double tolerance) {
  if (!(std::abs(base.f) <= tolerance))
    throw PreconditionError("base hypersurface is not minimal (f = " + std::to_string(base.f) + ")");
}

Eigen::MatrixXd tilde_second_fundamental(const GeometryAtPoint& base) {
  return base.B - base.eta_gamma * base.g;
}

double tilde_mean_curvature(const GeometryAtPoint& base) {
  require_minimal(base);
  return -base.eta_gamma_exp;
}

double tilde_A_norm_sq(const GeometryAtPoint& base) {
  require_minimal(base);
  return std::exp(-2.0 * base.gamma) * (base.A_norm_sq + base.m * base.eta_gamma * base.eta_gamma);
}

Eigen::VectorXd tilde_grad_f(const GeometryAtPoint& base) {
  require_minimal(base);
  return -std::exp(-2.0 * base.gamma) * base.grad_M_eta_gamma_exp;
}

Eigen::VectorXd tilde_A_grad_f(const GeometryAtPoint& base) {
  require_minimal(base);
  const double e3 = std::exp(-3.0 * base.gamma);
  const Eigen::VectorXd& gF = base.grad_M_eta_gamma_exp;
  return e3 * base.eta_gamma * gF - e3 * (base.A * gF);
}

double tilde_lap_f(const GeometryAtPoint& base) {
  require_minimal(base);
  const double along_grad_gamma = base.inner(base.grad_M_gamma, base.grad_M_eta_gamma_exp);
  return std::exp(-2.0 * base.gamma) * (-base.lap_M_eta_gamma_exp - (base.m - 2) * along_grad_gamma);
}

TildeRicci tilde_ricci(const GeometryAtPoint& base) {
  require_minimal(base);
  const double one_m = 1.0 - base.m;
  const double eg = base.eta_gamma;
  TildeRicci out;
  out.ric_tilde_eta_eta = std::exp(-2.0 * base.gamma) *
                          (-base.lap_ambient_gamma + one_m * base.hess_gamma_eta_eta +
                           one_m * base.grad_ambient_gamma_sq - one_m * eg * eg);
  out.ricci_tilde_eta_tan = one_m * std::exp(-3.0 * base.gamma) *
                            (base.grad_M_eta_gamma + base.A * base.grad_M_gamma - eg * base.grad_M_gamma);
  return out;
}

TildeQuantities tilde_quantities(const GeometryAtPoint& base) {
  TildeQuantities t;
  t.f_tilde = tilde_mean_curvature(base);
  t.grad_f_tilde = tilde_grad_f(base);
  t.A_grad_f_tilde = tilde_A_grad_f(base);
  t.lap_f_tilde = tilde_lap_f(base);
  t.A_tilde_norm_sq = tilde_A_norm_sq(base);
  const TildeRicci ric = tilde_ricci(base);
  t.ric_tilde_eta_eta = ric.ric_tilde_eta_eta;
  t.ricci_tilde_eta_tan = ric.ricci_tilde_eta_tan;
  t.B_tilde = tilde_second_fundamental(base);
  t.g_tilde = std::exp(2.0 * base.gamma) * base.g;
  return t;
}

}  // namespace pbih
