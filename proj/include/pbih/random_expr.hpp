#pragma once

#include <random>
#include <string>
#include <vector>

#include "pbih/expr.hpp"

namespace pbih {

/// Random expression over `variables` using every operator of the grammar,
/// with tree depth at most `max_depth`.
Expr random_expression(std::mt19937_64& rng, const std::vector<std::string>& variables, int max_depth);

struct DerivativeCheck {
  int requested = 0;
  int accepted = 0;
  int rejected = 0;
  int failures = 0;
  double worst_ratio = 0.0;  // |exact - fd| / (1 + |exact|), maximised
  std::string worst_case;
};

/// Compares differentiate() against the central difference with step `step`
/// on `cases` random (expression, point) pairs. Pairs whose neighbourhood
/// touches a domain error or whose value or first three derivatives exceed
/// `blowup` in size (points near a singular locus) are redrawn.
DerivativeCheck check_derivatives_against_fd(std::uint64_t seed, int cases, int max_depth = 6, double step = 1e-5,
                                             double tolerance = 1e-6, double blowup = 1e4);

}  // namespace pbih
