#pragma once

#include <Eigen/Dense>

#include "pbih/geometry.hpp"

namespace pbih {

/// Quantities of (M, g̃ = e^{2γ}g) inside (R^{m+1}, e^{2γ}h), obtained in
/// closed form from a minimal base hypersurface of Euclidean space.
///
/// Tangent vectors are chart components, the same coordinates the base uses;
/// the rescaled frame ẽ_i = e^{-γ}e_i never appears explicitly.
struct TildeQuantities {
  double f_tilde = 0.0;
  Eigen::VectorXd grad_f_tilde;
  Eigen::VectorXd A_grad_f_tilde;
  double lap_f_tilde = 0.0;
  double A_tilde_norm_sq = 0.0;
  double ric_tilde_eta_eta = 0.0;
  Eigen::VectorXd ricci_tilde_eta_tan;
  /// Components of ∇d ĩ(∂_i, ∂_j) along the Euclidean unit normal η.
  Eigen::MatrixXd B_tilde;
  /// Induced metric e^{2γ} g, for norms of the vectors above.
  Eigen::MatrixXd g_tilde;
};

inline constexpr double kMinimalityTolerance = 1e-10;

/// Throws PreconditionError unless |f| ≤ tolerance.
void require_minimal(const GeometryAtPoint& base, double tolerance = kMinimalityTolerance);

/// B_ij - g_ij η(γ). Valid for any base, minimal or not.
Eigen::MatrixXd tilde_second_fundamental(const GeometryAtPoint& base);

// The remaining identities assume a minimal base and check it.

/// f̃ = -η(γ) e^{-γ}.
double tilde_mean_curvature(const GeometryAtPoint& base);
/// |Ã|² = e^{-2γ}(|A|² + m η(γ)²).
double tilde_A_norm_sq(const GeometryAtPoint& base);
/// grad̃ f̃ = -e^{-2γ} grad(η(γ)e^{-γ}).
Eigen::VectorXd tilde_grad_f(const GeometryAtPoint& base);
/// Ã(grad̃ f̃) = e^{-3γ} η(γ) grad(η(γ)e^{-γ}) - e^{-3γ} A grad(η(γ)e^{-γ}).
Eigen::VectorXd tilde_A_grad_f(const GeometryAtPoint& base);
/// Δ̃ f̃ = e^{-2γ}[-Δ(η(γ)e^{-γ}) - (m-2) (grad γ)(η(γ)e^{-γ})].
double tilde_lap_f(const GeometryAtPoint& base);

struct TildeRicci {
  double ric_tilde_eta_eta = 0.0;
  Eigen::VectorXd ricci_tilde_eta_tan;
};
/// Ric̃(η̃,η̃) = e^{-2γ}[-Δγ + (1-m)Hess γ(η,η) + (1-m)|grad γ|² - (1-m)η(γ)²]
/// (ambient operators), and
/// (Riccĩ η̃)^T = (1-m) e^{-3γ}[grad η(γ) + A(grad γ) - η(γ) grad γ].
TildeRicci tilde_ricci(const GeometryAtPoint& base);

TildeQuantities tilde_quantities(const GeometryAtPoint& base);

}  // namespace pbih
