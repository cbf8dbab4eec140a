#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pbih/expr.hpp"
#include "pbih/jet.hpp"

namespace pbih {

enum class Orientation { plus, minus };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A parametrized hypersurface X : U ⊂ R^m -> R^{m+1}, one expression per
/// ambient coordinate in the chart variables.
class Immersion {
 public:
  Immersion(std::vector<std::string> chart_variables, std::vector<Expr> components,
            std::vector<Interval> chart_domain = {});

  int dim() const noexcept { return static_cast<int>(variables_.size()); }
  int ambient_dim() const noexcept { return dim() + 1; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }
  const std::vector<Expr>& components() const noexcept { return components_; }
  /// Empty when unrestricted.
  const std::vector<Interval>& domain() const noexcept { return domain_; }
  bool contains(std::span<const double> u) const;

  Eigen::VectorXd position(std::span<const double> u) const;
  /// Taylor jets of every component around u, truncated at `order`.
  std::vector<Jet> jets(std::span<const double> u, int order) const;

  /// The immersion v ↦ X(M v + shift). The result has no chart domain.
  Immersion reparametrized(const Eigen::MatrixXd& M, const Eigen::VectorXd& shift) const;
  /// The immersion λ·X.
  Immersion scaled(double lambda) const;

 private:
  std::vector<std::string> variables_;
  std::vector<Expr> components_;
  std::vector<Interval> domain_;
  std::shared_ptr<const std::vector<Program>> programs_;
};

enum class AmbientKind { euclidean, conformal, declared_einstein };

/// (R^{m+1}, e^{2γ} h) with h the Euclidean metric. γ is an expression in the
/// ambient coordinates and optionally in named parameters whose values are
/// carried alongside, so a family of ambients shares one compiled symbolic
/// pipeline.
class AmbientSpace {
 public:
  static AmbientSpace euclidean(int dim);
  static AmbientSpace conformal(Expr gamma, std::vector<std::string> coordinates,
                                std::vector<std::string> parameters = {},
                                std::vector<double> parameter_values = {});

  /// Same factor, new parameter values.
  AmbientSpace with_parameters(std::vector<double> values) const;
  /// Tags the ambient as Einstein with scalar curvature S. The claim is
  /// checked by validate_einstein, not here.
  AmbientSpace declared_einstein(double scalar_curvature) const;

  int dim() const noexcept;
  AmbientKind kind() const noexcept { return kind_; }
  double declared_scalar_curvature() const noexcept { return declared_s_; }
  const Expr& gamma() const noexcept;
  const std::vector<std::string>& coordinates() const noexcept;
  const std::vector<std::string>& parameters() const noexcept;
  const std::vector<double>& parameter_values() const noexcept { return values_; }
  /// γ with the parameter values substituted.
  Expr bound_gamma() const;
  /// True when γ is a constant expression (the metric is then flat).
  bool is_flat() const noexcept;

  double gamma_at(std::span<const double> x) const;
  Eigen::VectorXd gamma_gradient(std::span<const double> x) const;
  Eigen::MatrixXd gamma_hessian(std::span<const double> x) const;
  Eigen::MatrixXd metric(std::span<const double> x) const;
  /// Ricci tensor (covariant) of e^{2γ}h, from symbolic Christoffel symbols.
  Eigen::MatrixXd ricci(std::span<const double> x) const;
  double scalar_curvature(std::span<const double> x) const;

  /// Jet-level access used by the pointwise kernel.
  Jet gamma_jet(std::span<const Jet> x) const;
  std::vector<Jet> gamma_gradient_jet(std::span<const Jet> x) const;
  /// Γ^a_bc at index (a * n + b) * n + c.
  std::vector<Jet> christoffel_jet(std::span<const Jet> x) const;

  struct Pipeline;

 private:
  std::shared_ptr<const Pipeline> pipeline_;
  std::vector<double> values_;
  AmbientKind kind_ = AmbientKind::euclidean;
  double declared_s_ = 0.0;
};

/// Every pointwise quantity the residual systems consume, evaluated at one
/// chart point. Tangent vectors are chart components (v = v^i ∂_i X).
///
/// Conventions: A(X) = -(∇_X η)^T, B_ij = <∇_{∂i} ∂_j X, η>, f = tr(A)/m,
/// Δ = div ∘ grad. The `gamma*` block describes a probe conformal factor γ
/// using Euclidean derivatives of γ against this geometry's own η and g.
struct GeometryAtPoint {
  int m = 0;
  Eigen::VectorXd u;
  Eigen::VectorXd x;
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  Eigen::MatrixXd frame;  // (m+1) x m, columns ∂_i X
  Eigen::VectorXd eta;
  Eigen::MatrixXd B;
  Eigen::MatrixXd A;  // A^i_j, acting on chart components
  double f = 0.0;
  double A_norm_sq = 0.0;
  Eigen::VectorXd grad_f;
  double lap_f = 0.0;

  double ric_eta_eta = 0.0;
  Eigen::VectorXd ricci_eta_tan;
  double scalar_curvature = 0.0;

  double gamma = 0.0;
  double eta_gamma = 0.0;
  double hess_gamma_eta_eta = 0.0;
  /// η(η(γ)) with η extended along the ambient normal geodesics.
  double eta_eta_gamma = 0.0;
  double lap_ambient_gamma = 0.0;
  double grad_ambient_gamma_sq = 0.0;
  Eigen::VectorXd grad_M_gamma;
  double grad_M_gamma_sq = 0.0;
  double lap_M_gamma = 0.0;
  Eigen::VectorXd grad_M_eta_gamma;
  /// F = η(γ) e^{-γ} as a function on the chart.
  double eta_gamma_exp = 0.0;
  Eigen::VectorXd grad_M_eta_gamma_exp;
  double lap_M_eta_gamma_exp = 0.0;

  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return a.dot(g * b); }
  double norm(const Eigen::VectorXd& v) const;
};

/// Geometry of the immersion in the ambient metric e^{2γ}h; the probe block
/// describes amb's own γ.
GeometryAtPoint geometry_at(const Immersion& imm, const AmbientSpace& amb,
                            std::span<const double> u, Orientation orientation = Orientation::plus);

/// Geometry of the immersion in Euclidean space, with the probe block
/// describing amb's γ. This is the base geometry of the conformal identities.
GeometryAtPoint base_geometry_at(const Immersion& imm, const AmbientSpace& amb,
                                 std::span<const double> u,
                                 Orientation orientation = Orientation::plus);

struct IntrinsicOps {
  Eigen::VectorXd grad_M;
  double lap_M = 0.0;
};

/// Gradient and Laplacian on (M, induced metric of amb) of a chart field.
IntrinsicOps intrinsic_scalar_ops(const Immersion& imm, const AmbientSpace& amb,
                                  const Expr& field, std::span<const double> u);

struct AmbientCurvature {
  double ric_eta_eta = 0.0;
  Eigen::VectorXd ricci_eta_tan;
  double scalar_S = 0.0;
};

/// Ricci contractions of e^{2γ}h at x; `frame` columns are tangent vectors
/// whose chart metric is used to raise the tangential part.
AmbientCurvature ambient_curvature(const AmbientSpace& amb, std::span<const double> x,
                                   const Eigen::VectorXd& eta, const Eigen::MatrixXd& frame);

/// Proof that an ambient's Ricci tensor was checked against S/(m+1)·metric.
class ValidatedEinstein {
 public:
  double scalar_curvature() const noexcept { return s_; }
  double max_deviation() const noexcept { return deviation_; }

 private:
  friend ValidatedEinstein validate_einstein(const AmbientSpace&, std::span<const Eigen::VectorXd>,
                                             double);
  ValidatedEinstein(double s, double deviation) : s_(s), deviation_(deviation) {}
  double s_;
  double deviation_;
};

/// Checks Ric = (S/(m+1))·metric at every sample point to `tolerance`, where
/// S is the declared scalar curvature (0 for flat ambients). Throws
/// PreconditionError on failure.
ValidatedEinstein validate_einstein(const AmbientSpace& amb, std::span<const Eigen::VectorXd> points,
                                    double tolerance = 1e-6);

}  // namespace pbih
