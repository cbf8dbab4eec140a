#include "pbih/residuals.hpp"

#include <cmath>
#include <string>

#include "pbih/errors.hpp"

namespace pbih {

namespace {

void check_dims(const GeometryAtPoint& geo, const ProblemConfig& cfg) {
  cfg.validate();
  if (geo.m != cfg.m)
    throw PreconditionError("problem dimension m = " + std::to_string(cfg.m) +
                            " does not match the hypersurface dimension " + std::to_string(geo.m));
}

double metric_norm(const Eigen::MatrixXd& g, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(g * v)));
}

// Shared template of the general system; every input is a pointwise value.
struct SystemInputs {
  double f;
  double lap_f;
  double A_norm_sq;
  double ric_eta_eta;
  Eigen::VectorXd A_grad_f;
  Eigen::VectorXd grad_f;
  Eigen::VectorXd ricci_eta_tan;
};

SystemResidual evaluate_system(const SystemInputs& in, double p, int m, const Eigen::MatrixXd& metric) {
  SystemResidual r;
  const double f = in.f;
  r.normal = -in.lap_f + f * in.A_norm_sq - f * in.ric_eta_eta + m * (p - 2.0) * f * f * f;
  const Eigen::VectorXd grad_f_sq = 2.0 * f * in.grad_f;
  r.tangential = 2.0 * in.A_grad_f - 2.0 * f * in.ricci_eta_tan + (p - 2.0 + m / 2.0) * grad_f_sq;
  r.normal_abs = std::abs(r.normal);
  r.tangential_norm = metric_norm(metric, r.tangential);
  return r;
}

}  // namespace

void ProblemConfig::validate() const {
  if (!(p >= 2.0)) throw PreconditionError("p must be at least 2 (got " + std::to_string(p) + ")");
  if (m < 1) throw PreconditionError("m must be at least 1");
}

PTension p_tension(const GeometryAtPoint& geo, const ProblemConfig& cfg, double tolerance) {
  check_dims(geo, cfg);
  PTension t;
  t.norm = std::pow(static_cast<double>(geo.m), cfg.p / 2.0) * std::abs(geo.f);
  t.is_p_harmonic = t.norm <= tolerance;
  return t;
}

SystemResidual residual_general(const GeometryAtPoint& geo, const ProblemConfig& cfg) {
  check_dims(geo, cfg);
  return evaluate_system({geo.f, geo.lap_f, geo.A_norm_sq, geo.ric_eta_eta, geo.A * geo.grad_f, geo.grad_f,
                          geo.ricci_eta_tan},
                         cfg.p, geo.m, geo.g);
}

SystemResidual residual_einstein(const GeometryAtPoint& geo, const ProblemConfig& cfg,
                                 const ValidatedEinstein& einstein) {
  check_dims(geo, cfg);
  const double lambda = einstein.scalar_curvature() / (geo.m + 1);
  return evaluate_system({geo.f, geo.lap_f, geo.A_norm_sq, lambda, geo.A * geo.grad_f, geo.grad_f,
                          Eigen::VectorXd::Zero(geo.m)},
                         cfg.p, geo.m, geo.g);
}

UmbilicResult umbilic_classification(const ProblemConfig& cfg, double scalar_curvature) {
  if (!(cfg.p > 1.0)) throw PreconditionError("p must exceed 1");
  if (cfg.m < 1) throw PreconditionError("m must be at least 1");
  UmbilicResult out;
  if (scalar_curvature <= 0.0) {
    out.beta_solutions = {0.0};
    out.is_minimal_only = true;
    return out;
  }
  const double m = cfg.m;
  const double beta = std::sqrt(scalar_curvature / (m * (m + 1.0) * (cfg.p - 1.0)));
  out.beta_solutions = {-beta, 0.0, beta};
  out.is_minimal_only = false;
  return out;
}

SystemResidual residual_conformal_closed_form(const GeometryAtPoint& base, const ProblemConfig& cfg) {
  check_dims(base, cfg);
  require_minimal(base);
  const int m = base.m;
  const double p = cfg.p;
  const double eg = base.eta_gamma;
  const double F = base.eta_gamma_exp;
  const Eigen::VectorXd& grad_F = base.grad_M_eta_gamma_exp;

  SystemResidual r;
  const double bracket = -base.lap_M_gamma - m * base.hess_gamma_eta_eta + (1.0 - m) * base.grad_M_gamma_sq -
                         base.A_norm_sq + m * (1.0 - p) * eg * eg;
  r.normal = F * bracket + base.lap_M_eta_gamma_exp + (m - 2) * base.inner(base.grad_M_gamma, grad_F);
  r.tangential = -2.0 * (base.A * grad_F) + 2.0 * (1.0 - m) * F * (base.A * base.grad_M_gamma) +
                 (2.0 * p - m) * eg * grad_F;
  r.normal_abs = std::abs(r.normal);
  r.tangential_norm = metric_norm(base.g, r.tangential);
  return r;
}

SystemResidual residual_conformal_tilde_route(const GeometryAtPoint& base, const ProblemConfig& cfg) {
  check_dims(base, cfg);
  const TildeQuantities t = tilde_quantities(base);
  return evaluate_system({t.f_tilde, t.lap_f_tilde, t.A_tilde_norm_sq, t.ric_tilde_eta_eta, t.A_grad_f_tilde,
                          t.grad_f_tilde, t.ricci_tilde_eta_tan},
                         cfg.p, base.m, t.g_tilde);
}

SystemResidual residual_conformal_tilde_route(const Immersion& base_imm, const AmbientSpace& amb,
                                              const ProblemConfig& cfg, std::span<const double> u) {
  return residual_conformal_tilde_route(base_geometry_at(base_imm, amb, u, cfg.orientation), cfg);
}

SystemResidual closed_form_on_tilde_scale(const SystemResidual& closed_form, const GeometryAtPoint& base) {
  SystemResidual r;
  r.normal = std::exp(-2.0 * base.gamma) * closed_form.normal;
  r.tangential = std::exp(-3.0 * base.gamma) * closed_form.tangential;
  r.normal_abs = std::abs(r.normal);
  r.tangential_norm = metric_norm(std::exp(2.0 * base.gamma) * base.g, r.tangential);
  return r;
}

RemarkCondition remark_condition(const GeometryAtPoint& base, const ProblemConfig& cfg, double tolerance,
                                 double constancy_tolerance) {
  check_dims(base, cfg);
  const double grad_gamma = base.norm(base.grad_M_gamma);
  const double grad_eta_gamma = base.norm(base.grad_M_eta_gamma);
  if (!(grad_gamma <= constancy_tolerance) || !(grad_eta_gamma <= constancy_tolerance))
    throw PreconditionError("gamma and eta(gamma) must be constant along the hypersurface (|grad gamma| = " +
                            std::to_string(grad_gamma) + ", |grad eta(gamma)| = " + std::to_string(grad_eta_gamma) +
                            ")");
  RemarkCondition out;
  const double m = base.m;
  out.lhs = base.A_norm_sq;
  out.rhs = m * (1.0 - cfg.p) * base.eta_gamma * base.eta_gamma - m * base.eta_eta_gamma;
  out.satisfied = std::abs(out.lhs - out.rhs) <= tolerance;
  return out;
}

double ode_example1(const Expr& gamma, double p, double c) {
  const Expr d1 = differentiate(gamma, "z");
  const Expr d2 = differentiate(d1, "z");
  const Bindings at{{"z", c}, {"p", p}};
  const double g1 = evaluate(d1, at);
  const double g2 = evaluate(d2, at);
  return (1.0 - p) * g1 * g1 - g2;
}

}  // namespace pbih
