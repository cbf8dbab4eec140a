#include "pbih/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pbih/errors.hpp"
#include "pbih/grid.hpp"
#include "pbih/linalg.hpp"
#include "pbih/residuals.hpp"

namespace pbih {

namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> ambient_parameters(const GammaFamily& family) {
  std::vector<std::string> names = family.parameter_names;
  if (free_variables(family.gamma).contains("p") &&
      std::find(names.begin(), names.end(), "p") == names.end())
    names.push_back("p");
  return names;
}

}  // namespace

GammaFamily gamma_family(std::string_view name) {
  if (name == "log_quadratic_z")
    return {"log_quadratic_z: alpha*ln(beta + z^2)", parse("alpha*ln(beta + z^2)"), {"alpha", "beta"},
            {{-2.0, 2.0}, {0.1, 4.0}}};
  if (name == "power_z")
    return {"power_z: alpha*z + beta*z^2 + delta*z^3", parse("alpha*z + beta*z^2 + delta*z^3"),
            {"alpha", "beta", "delta"}, {{-1.0, 1.0}, {-1.0, 1.0}, {-0.5, 0.5}}};
  if (name == "radial")
    return {"radial: alpha*ln(beta + x^2 + y^2 + z^2)", parse("alpha*ln(beta + x^2 + y^2 + z^2)"),
            {"alpha", "beta"}, {{-2.0, 2.0}, {0.1, 4.0}}};
  if (name == "log_affine_z")
    return {"log_affine_z: ln((p - 1)*(c1*z + c2))/(p - 1)", parse("ln((p - 1)*(c1*z + c2))/(p - 1)"),
            {"c1", "c2"}, {{0.5, 2.0}, {0.5, 2.0}}};
  if (name == "scaled_log_affine_z")
    return {"scaled_log_affine_z: k*ln(c1*z + c2)", parse("k*ln(c1*z + c2)"), {"k", "c1", "c2"},
            {{0.25, 2.0}, {0.5, 2.0}, {0.5, 2.0}}};
  if (name == "trig_mixed")
    return {"trig_mixed: alpha*sin(x) + beta*cos(y + z) + delta*sin(z)",
            parse("alpha*sin(x) + beta*cos(y + z) + delta*sin(z)"),
            {"alpha", "beta", "delta"}, {{-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}}};
  throw ConfigError(0, "unknown gamma family '" + std::string(name) + "'");
}

const std::vector<std::string>& list_gamma_families() {
  static const std::vector<std::string> names{"log_quadratic_z", "power_z", "radial", "log_affine_z",
                                              "scaled_log_affine_z", "trig_mixed"};
  return names;
}

std::string_view to_string(SearchVerdict v) {
  return v == SearchVerdict::candidate_found ? "candidate_found" : "no_candidate";
}

SearchProblem::SearchProblem(Immersion base, GammaFamily family, Interval p_range, std::vector<Eigen::VectorXd> grid,
                             Orientation orientation, double proper_tolerance)
    : base_(std::move(base)),
      family_(std::move(family)),
      p_range_(p_range),
      grid_(std::move(grid)),
      orientation_(orientation),
      proper_tol_(proper_tolerance),
      ambient_(AmbientSpace::conformal(family_.gamma, kXYZ, ambient_parameters(family_),
                                       std::vector<double>(ambient_parameters(family_).size(), 0.0))) {
  if (base_.ambient_dim() != 3) throw PreconditionError("search expects a surface in R^3");
  if (grid_.empty()) throw PreconditionError("search grid is empty");
  if (family_.bounds.size() != family_.parameter_names.size())
    throw PreconditionError("gamma family needs one bound per parameter");
  for (const auto& b : family_.bounds)
    if (!(b.lo <= b.hi)) throw PreconditionError("gamma family bounds must satisfy lo <= hi");
  if (!(p_range_.lo >= 2.0) || !(p_range_.lo <= p_range_.hi)) throw PreconditionError("p range must lie in [2, inf)");
  const AmbientSpace flat = AmbientSpace::euclidean(3);
  for (const auto& u : grid_) require_minimal(geometry_at(base_, flat, linalg::as_span(u), orientation_));
}

int SearchProblem::search_dim() const noexcept {
  return static_cast<int>(family_.parameter_names.size()) + (p_is_free() ? 1 : 0);
}

double SearchProblem::objective(std::span<const double> params, double p) const {
  std::vector<double> values(params.begin(), params.end());
  if (ambient_.parameters().size() > values.size()) values.push_back(p);
  const AmbientSpace amb = ambient_.with_parameters(std::move(values));
  const ProblemConfig cfg{p, base_.dim(), orientation_};
  double worst = 0.0, max_f_tilde = 0.0;
  try {
    for (const auto& u : grid_) {
      const GeometryAtPoint geo = base_geometry_at(base_, amb, linalg::as_span(u), orientation_);
      const SystemResidual r = residual_conformal_tilde_route(geo, cfg);
      worst = std::max({worst, r.normal_abs, r.tangential_norm});
      max_f_tilde = std::max(max_f_tilde, std::abs(tilde_mean_curvature(geo)));
    }
  } catch (const Error&) {
    return kInf;
  }
  if (!std::isfinite(worst)) return kInf;
  return worst + std::max(0.0, proper_tol_ - max_f_tilde);
}

namespace {

struct Bounds {
  std::vector<double> lo, hi;
  void clamp(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
};

RestartOutcome nelder_mead(const SearchProblem& problem, const Bounds& bounds, std::vector<double> x0,
                           const SearchOptions& options, std::vector<double>& best_trace) {
  const std::size_t n = x0.size();
  const std::size_t family_dim = problem.family().parameter_names.size();
  auto eval = [&](const std::vector<double>& x) {
    const double p = problem.p_is_free() ? x[family_dim] : problem.p_range().lo;
    return problem.objective(std::span<const double>(x.data(), family_dim), p);
  };
  auto outcome = [&](const std::vector<double>& x, double fx, int iters) {
    RestartOutcome o;
    o.params.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(family_dim));
    o.p = problem.p_is_free() ? x[family_dim] : problem.p_range().lo;
    o.objective = fx;
    o.iterations = iters;
    return o;
  };

  bounds.clamp(x0);
  const double f0 = eval(x0);
  best_trace.push_back(f0);
  if (options.max_iters <= 0 || n == 0) return outcome(x0, f0, 0);

  std::vector<std::vector<double>> simplex{x0};
  std::vector<double> fs{f0};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v = x0;
    const double step = options.simplex_scale * std::max(bounds.hi[i] - bounds.lo[i], 1e-12);
    v[i] = x0[i] + step <= bounds.hi[i] ? x0[i] + step : x0[i] - step;
    bounds.clamp(v);
    fs.push_back(eval(v));
    simplex.push_back(std::move(v));
  }

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (std::size_t k : order) {
      s2.push_back(simplex[k]);
      f2.push_back(fs[k]);
    }
    simplex = std::move(s2);
    fs = std::move(f2);
  };
  auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    bounds.clamp(out);
    return out;
  };

  sort_simplex();
  const double stop = options.tolerance * 1e-3;
  int iter = 0;
  while (iter < options.max_iters) {
    ++iter;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i] / static_cast<double>(n);

    const std::vector<double> xr = combine(centroid, simplex[n], -1.0);
    const double fr = eval(xr);
    if (fr < fs[0]) {
      const std::vector<double> xe = combine(centroid, simplex[n], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fs[n] = fe;
      } else {
        simplex[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      simplex[n] = xr;
      fs[n] = fr;
    } else {
      const bool outside = fr < fs[n];
      const std::vector<double> xc = outside ? combine(centroid, xr, 0.5) : combine(centroid, simplex[n], 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, fs[n])) {
        simplex[n] = xc;
        fs[n] = fc;
      } else {
        for (std::size_t k = 1; k <= n; ++k) {
          simplex[k] = combine(simplex[0], simplex[k], 0.5);
          fs[k] = eval(simplex[k]);
        }
      }
    }
    sort_simplex();
    best_trace.push_back(std::min(best_trace.back(), fs[0]));

    if (fs[0] <= stop) break;
    double diameter = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(simplex[k][i] - simplex[0][i]));
    if (diameter < 1e-14) break;
  }
  if (f0 < fs[0]) return outcome(x0, f0, iter);
  return outcome(simplex[0], fs[0], iter);
}

}  // namespace

SearchResult minimize(const SearchProblem& problem, const SearchOptions& options) {
  Bounds bounds;
  for (const auto& b : problem.family().bounds) {
    bounds.lo.push_back(b.lo);
    bounds.hi.push_back(b.hi);
  }
  if (problem.p_is_free()) {
    bounds.lo.push_back(problem.p_range().lo);
    bounds.hi.push_back(problem.p_range().hi);
  }

  const int restarts = std::max(1, options.restarts);
  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<double>> starts(restarts);
  for (auto& x : starts) {
    x.resize(bounds.lo.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::uniform_real_distribution<double> dist(bounds.lo[i], bounds.hi[i]);
      x[i] = bounds.lo[i] == bounds.hi[i] ? bounds.lo[i] : dist(rng);
    }
  }

  std::vector<RestartOutcome> outcomes(restarts);
  std::vector<std::vector<double>> traces(restarts);
  parallel_for(static_cast<std::size_t>(restarts), options.workers, [&](std::size_t r) {
    outcomes[r] = nelder_mead(problem, bounds, starts[r], options, traces[r]);
  });

  SearchResult result;
  result.family = problem.family().label;
  double running = kInf;
  std::size_t best = 0;
  for (int r = 0; r < restarts; ++r) {
    for (std::size_t it = 0; it < traces[r].size(); ++it) {
      running = std::min(running, traces[r][it]);
      result.history.push_back({r, static_cast<int>(it), running});
    }
    if (outcomes[r].objective < outcomes[best].objective) best = static_cast<std::size_t>(r);
  }
  const RestartOutcome& winner = outcomes[best];
  for (std::size_t i = 0; i < winner.params.size(); ++i)
    result.best_params[problem.family().parameter_names[i]] = winner.params[i];
  result.best_p = winner.p;
  result.objective = winner.objective;
  result.restarts = std::move(outcomes);
  result.verdict = result.objective <= options.tolerance ? SearchVerdict::candidate_found : SearchVerdict::no_candidate;
  return result;
}

}  // namespace pbih
