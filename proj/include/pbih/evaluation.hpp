#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pbih/catalog.hpp"
#include "pbih/geometry.hpp"
#include "pbih/residuals.hpp"

namespace pbih {

/// Which characterization the grid was checked against.
///  general: the general system on the geometry in the given ambient.
///  einstein: the Einstein system, after validating the ambient.
///  conformal_tilde: minimal Euclidean base in a conformal ambient; the
///    tilde-route system is primary and the closed form is compared to it.
enum class Route { general, einstein, conformal_tilde };

std::string_view to_string(Route r);

struct PointRecord {
  Eigen::VectorXd u;
  double f = 0.0;
  double A_norm_sq = 0.0;
  double res_normal = 0.0;
  double res_tangential_norm = 0.0;
  double p_tension = 0.0;
  /// conformal_tilde only: |difference| between the routes, closed form
  /// rescaled to the tilde scale.
  double route_discrepancy = 0.0;
};

struct DegeneratePoint {
  Eigen::VectorXd u;
  std::string reason;
};

struct GridSummary {
  std::size_t points = 0;
  std::size_t degenerate = 0;
  double max_normal = 0.0;
  double max_tangential = 0.0;
  double mean_normal = 0.0;
  double mean_tangential = 0.0;
  double max_p_tension = 0.0;
  bool dual_route_checked = false;
  double max_route_discrepancy = 0.0;
  bool dual_route_flagged = false;
  Verdict verdict = Verdict::neither;
};

struct GridEvaluation {
  Route route = Route::general;
  std::vector<PointRecord> records;
  std::vector<DegeneratePoint> degenerate_points;
  GridSummary summary;
};

/// p_harmonic when residuals and tension vanish, proper_p_biharmonic when
/// only the residuals do, neither otherwise.
Verdict classify(double max_residual, double max_p_tension, double tolerance);

struct EvaluationOptions {
  double tolerance = 1e-8;
  /// Route disagreement above this is flagged in the summary.
  double dual_route_tolerance = 1e-6;
  int workers = 1;
};

/// Evaluates residuals at every chart point, in order. Degenerate points are
/// listed and skipped; throws PreconditionError when every point is
/// degenerate or an Einstein ambient fails validation.
GridEvaluation evaluate_grid(const Immersion& imm, const AmbientSpace& amb, const ProblemConfig& cfg,
                             const std::vector<Eigen::VectorXd>& points, const EvaluationOptions& options = {});

}  // namespace pbih
