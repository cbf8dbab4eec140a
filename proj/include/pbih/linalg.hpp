#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pbih/errors.hpp"
#include "pbih/jet.hpp"

namespace pbih::linalg {

// Dense elimination over any field-like scalar (double, Jet). Pivots are
// chosen by the magnitude of the scalar's value; these are used on small
// (m ≤ ~6) well-conditioned metric blocks only.

inline std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

/// Plain triple-loop product; Eigen's product kernels assume more of the
/// scalar type than Jet provides.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> product(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Scalar s(0.0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

namespace detail {

// Cofactor expansion along the first row, restricted to the listed columns.
// Division-free, so a jet whose value vanishes keeps its derivatives.
template <typename Matrix>
typename Matrix::Scalar cofactor_expansion(const Matrix& M, Eigen::Index row, std::vector<Eigen::Index>& cols) {
  using Scalar = typename Matrix::Scalar;
  if (cols.size() == 1) return M(row, cols[0]);
  Scalar sum(0.0);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Eigen::Index c = cols[k];
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(k));
    const Scalar term = M(row, c) * cofactor_expansion(M, row + 1, cols);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(k), c);
    sum = k % 2 == 0 ? sum + term : sum - term;
  }
  return sum;
}

}  // namespace detail

/// Cofactor expansion up to 6x6, pivoted elimination beyond.
template <typename Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M = input;
  const Eigen::Index n = M.rows();
  if (n == 0) return Scalar(1.0);
  if (n <= 6) {
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) cols[static_cast<std::size_t>(i)] = i;
    return detail::cofactor_expansion(M, 0, cols);
  }
  Scalar det(1.0);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(scalar_value(M(r, col))) > std::abs(scalar_value(M(pivot, col)))) pivot = r;
    if (scalar_value(M(pivot, col)) == 0.0) return Scalar(0.0);
    if (pivot != col) {
      M.row(pivot).swap(M.row(col));
      det = -det;
    }
    det = det * M(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const Scalar factor = M(r, col) / M(col, col);
      for (Eigen::Index c = col; c < n; ++c) M(r, c) = M(r, c) - factor * M(col, c);
    }
  }
  return det;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> inverse(
    const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix M = input;
  const Eigen::Index n = M.rows();
  Matrix inv = Matrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(scalar_value(M(r, col))) > std::abs(scalar_value(M(pivot, col)))) pivot = r;
    if (scalar_value(M(pivot, col)) == 0.0) throw DegenerateChartError("singular matrix");
    if (pivot != col) {
      M.row(pivot).swap(M.row(col));
      inv.row(pivot).swap(inv.row(col));
    }
    const Scalar scale = Scalar(1.0) / M(col, col);
    for (Eigen::Index c = 0; c < n; ++c) {
      M(col, c) = M(col, c) * scale;
      inv(col, c) = inv(col, c) * scale;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const Scalar factor = M(r, col);
      for (Eigen::Index c = 0; c < n; ++c) {
        M(r, c) = M(r, c) - factor * M(col, c);
        inv(r, c) = inv(r, c) - factor * inv(col, c);
      }
    }
  }
  return inv;
}

}  // namespace pbih::linalg
