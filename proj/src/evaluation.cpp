#include "pbih/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "pbih/conformal.hpp"
#include "pbih/errors.hpp"
#include "pbih/grid.hpp"
#include "pbih/linalg.hpp"

namespace pbih {

std::string_view to_string(Route r) {
  switch (r) {
    case Route::general: return "general";
    case Route::einstein: return "einstein";
    case Route::conformal_tilde: return "conformal_tilde";
  }
  return "general";
}

Verdict classify(double max_residual, double max_p_tension, double tolerance) {
  if (!(max_residual <= tolerance)) return Verdict::neither;
  return max_p_tension <= tolerance ? Verdict::p_harmonic : Verdict::proper_p_biharmonic;
}

namespace {

struct Slot {
  std::optional<GeometryAtPoint> geo;
  std::string failure;
  PointRecord record;
};

double tension(double f, const ProblemConfig& cfg) {
  return std::pow(static_cast<double>(cfg.m), cfg.p / 2.0) * std::abs(f);
}

}  // namespace

GridEvaluation evaluate_grid(const Immersion& imm, const AmbientSpace& amb, const ProblemConfig& cfg,
                             const std::vector<Eigen::VectorXd>& points, const EvaluationOptions& options) {
  cfg.validate();
  if (cfg.m != imm.dim()) throw PreconditionError("problem dimension does not match the immersion");
  if (amb.dim() != imm.ambient_dim()) throw PreconditionError("ambient dimension does not match the immersion");
  const bool conformal = amb.kind() == AmbientKind::conformal;

  // First pass: the geometry the route decision needs (the Euclidean base
  // for conformal ambients, the actual geometry otherwise).
  std::vector<Slot> slots(points.size());
  parallel_for(points.size(), options.workers, [&](std::size_t i) {
    const auto u = linalg::as_span(points[i]);
    try {
      slots[i].geo = conformal ? base_geometry_at(imm, amb, u, cfg.orientation)
                               : geometry_at(imm, amb, u, cfg.orientation);
    } catch (const DegenerateChartError& e) {
      slots[i].failure = e.what();
    } catch (const DomainError& e) {
      slots[i].failure = e.what();
    }
  });

  GridEvaluation out;
  std::vector<Eigen::VectorXd> positions;
  bool base_minimal = true;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].geo) {
      out.degenerate_points.push_back({points[i], slots[i].failure});
      continue;
    }
    positions.push_back(slots[i].geo->x);
    base_minimal = base_minimal && std::abs(slots[i].geo->f) <= kMinimalityTolerance;
  }
  if (positions.empty()) throw PreconditionError("every grid point is degenerate");

  std::optional<ValidatedEinstein> einstein;
  if (amb.kind() == AmbientKind::declared_einstein) {
    einstein = validate_einstein(amb, positions);
    out.route = Route::einstein;
  } else if (conformal && base_minimal) {
    out.route = Route::conformal_tilde;
  } else {
    out.route = Route::general;
  }

  parallel_for(points.size(), options.workers, [&](std::size_t i) {
    Slot& s = slots[i];
    if (!s.geo) return;
    PointRecord& r = s.record;
    r.u = points[i];
    if (out.route == Route::conformal_tilde) {
      const GeometryAtPoint& base = *s.geo;
      const TildeQuantities t = tilde_quantities(base);
      const SystemResidual tilde = residual_conformal_tilde_route(base, cfg);
      const SystemResidual closed = closed_form_on_tilde_scale(residual_conformal_closed_form(base, cfg), base);
      r.f = t.f_tilde;
      r.A_norm_sq = t.A_tilde_norm_sq;
      r.res_normal = tilde.normal_abs;
      r.res_tangential_norm = tilde.tangential_norm;
      const Eigen::VectorXd dt = tilde.tangential - closed.tangential;
      r.route_discrepancy =
          std::max(std::abs(tilde.normal - closed.normal), std::sqrt(std::max(0.0, dt.dot(t.g_tilde * dt))));
    } else {
      const GeometryAtPoint geo =
          conformal ? geometry_at(imm, amb, linalg::as_span(points[i]), cfg.orientation) : *s.geo;
      const SystemResidual res = out.route == Route::einstein ? residual_einstein(geo, cfg, *einstein)
                                                              : residual_general(geo, cfg);
      r.f = geo.f;
      r.A_norm_sq = geo.A_norm_sq;
      r.res_normal = res.normal_abs;
      r.res_tangential_norm = res.tangential_norm;
    }
    r.p_tension = tension(r.f, cfg);
  });

  GridSummary& sum = out.summary;
  for (const Slot& s : slots) {
    if (!s.geo) continue;
    out.records.push_back(s.record);
    const PointRecord& r = s.record;
    sum.max_normal = std::max(sum.max_normal, r.res_normal);
    sum.max_tangential = std::max(sum.max_tangential, r.res_tangential_norm);
    sum.mean_normal += r.res_normal;
    sum.mean_tangential += r.res_tangential_norm;
    sum.max_p_tension = std::max(sum.max_p_tension, r.p_tension);
    sum.max_route_discrepancy = std::max(sum.max_route_discrepancy, r.route_discrepancy);
  }
  sum.points = out.records.size();
  sum.degenerate = out.degenerate_points.size();
  sum.mean_normal /= static_cast<double>(sum.points);
  sum.mean_tangential /= static_cast<double>(sum.points);
  sum.dual_route_checked = out.route == Route::conformal_tilde;
  sum.dual_route_flagged = sum.dual_route_checked && !(sum.max_route_discrepancy <= options.dual_route_tolerance);
  sum.verdict = classify(std::max(sum.max_normal, sum.max_tangential), sum.max_p_tension, options.tolerance);
  return out;
}

}  // namespace pbih
