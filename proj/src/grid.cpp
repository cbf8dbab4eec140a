#include "pbih/grid.hpp"

#include <cmath>
#include <string>

#include "pbih/errors.hpp"

namespace pbih {

void Grid::validate() const {
  if (axes.empty()) throw ConfigError(0, "grid has no axes");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const GridAxis& a = axes[i];
    if (a.count < 2)
      throw ConfigError(0, "grid axis " + std::to_string(i + 1) + " needs count >= 2 (got " +
                               std::to_string(a.count) + ")");
    if (!(a.min < a.max) || !std::isfinite(a.min) || !std::isfinite(a.max))
      throw ConfigError(0, "grid axis " + std::to_string(i + 1) + " needs finite min < max");
  }
  if (!(margin >= 0.0 && margin < 0.5)) throw ConfigError(0, "grid margin must lie in [0, 0.5)");
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

std::vector<Eigen::VectorXd> Grid::points() const {
  validate();
  const std::size_t dims = axes.size();
  std::vector<std::vector<double>> ticks(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const GridAxis& a = axes[d];
    const double w = a.max - a.min;
    const double lo = a.min + margin * w, hi = a.max - margin * w;
    for (int k = 0; k < a.count; ++k) ticks[d].push_back(lo + (hi - lo) * k / (a.count - 1));
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(size());
  std::vector<int> index(dims, 0);
  for (std::size_t n = 0; n < size(); ++n) {
    Eigen::VectorXd u(dims);
    for (std::size_t d = 0; d < dims; ++d) u[d] = ticks[d][index[d]];
    out.push_back(std::move(u));
    for (std::size_t d = dims; d-- > 0;) {
      if (++index[d] < axes[d].count) break;
      index[d] = 0;
    }
  }
  return out;
}

Grid Grid::refined(int factor) const {
  Grid g = *this;
  for (auto& a : g.axes) a.count *= factor;
  return g;
}

Grid grid_over_domain(const Immersion& imm, int count, double margin) {
  if (imm.domain().empty()) throw ConfigError(0, "immersion has no chart domain; give grid ranges explicitly");
  Grid g;
  g.margin = margin;
  for (const auto& iv : imm.domain()) g.axes.push_back({iv.lo, iv.hi, count});
  return g;
}

}  // namespace pbih
