#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pbih/geometry.hpp"

namespace pbih {

/// A parametrized conformal factor γ(x, y, z; params).
struct GammaFamily {
  std::string label;
  Expr gamma;
  std::vector<std::string> parameter_names;
  std::vector<Interval> bounds;
};

/// Shipped exploratory families, see list_gamma_families().
GammaFamily gamma_family(std::string_view name);
const std::vector<std::string>& list_gamma_families();

/// Everything the objective needs: a minimal base, a family, the range of p
/// (a degenerate range fixes p) and the chart points.
class SearchProblem {
 public:
  /// Verifies once that the base is minimal at every grid point.
  SearchProblem(Immersion base, GammaFamily family, Interval p_range, std::vector<Eigen::VectorXd> grid,
                Orientation orientation = Orientation::plus, double proper_tolerance = 1e-4);

  const Immersion& base() const noexcept { return base_; }
  const GammaFamily& family() const noexcept { return family_; }
  Interval p_range() const noexcept { return p_range_; }
  bool p_is_free() const noexcept { return p_range_.hi > p_range_.lo; }
  const std::vector<Eigen::VectorXd>& grid() const noexcept { return grid_; }
  double proper_tolerance() const noexcept { return proper_tol_; }
  /// Family parameters plus p when p is free.
  int search_dim() const noexcept;

  /// Max over the grid of both residual norms of the tilde-route system,
  /// plus max(0, proper_tolerance - max|f̃|). +∞ when γ fails to evaluate.
  double objective(std::span<const double> params, double p) const;

 private:
  Immersion base_;
  GammaFamily family_;
  Interval p_range_;
  std::vector<Eigen::VectorXd> grid_;
  Orientation orientation_;
  double proper_tol_;
  AmbientSpace ambient_;
};

struct SearchOptions {
  int max_iters = 200;
  int restarts = 10;
  /// Initial simplex edge as a fraction of each bound's width.
  double simplex_scale = 0.1;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Objective value below which a point counts as a candidate.
  double tolerance = 1e-8;
};

struct HistoryEntry {
  int restart = 0;
  int iteration = 0;
  double best_objective = std::numeric_limits<double>::infinity();
};

struct RestartOutcome {
  std::vector<double> params;
  double p = 0.0;
  double objective = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

enum class SearchVerdict { candidate_found, no_candidate };

struct SearchResult {
  std::string family;
  std::map<std::string, double> best_params;
  double best_p = 0.0;
  double objective = std::numeric_limits<double>::infinity();
  /// Best-so-far across restarts taken in order, so it never increases.
  std::vector<HistoryEntry> history;
  std::vector<RestartOutcome> restarts;
  SearchVerdict verdict = SearchVerdict::no_candidate;
};

std::string_view to_string(SearchVerdict v);

/// Bounded Nelder-Mead from seeded random starts. Deterministic for a given
/// seed regardless of worker count.
SearchResult minimize(const SearchProblem& problem, const SearchOptions& options);

}  // namespace pbih
