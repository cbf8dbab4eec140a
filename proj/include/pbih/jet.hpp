#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace pbih {

/// Monomial bookkeeping for truncated Taylor polynomials in `dim` variables
/// of total degree <= `order`. Monomials are graded, so the layout of a
/// lower order is a prefix of the layout of a higher one.
class JetLayout {
 public:
  /// Shared, never-freed layout for (dim, order).
  static const JetLayout& get(int dim, int order);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return exponents_.size(); }
  std::span<const std::uint8_t> exponent(std::size_t index) const;
  int degree(std::size_t index) const noexcept { return degree_[index]; }
  /// Number of monomials of degree <= d.
  std::size_t prefix(int d) const noexcept { return prefix_[d]; }
  /// Index of a multi-index, or size() if its degree exceeds the order.
  std::size_t index_of(std::span<const std::uint8_t> alpha) const;

  struct Term {
    std::uint32_t lhs, rhs, out;
  };
  std::span<const Term> products() const noexcept { return products_; }

  struct Lowering {
    std::uint32_t from, to;
    double factor;
  };
  /// d/du_v maps coefficient `from` onto coefficient `to` scaled by `factor`.
  std::span<const Lowering> derivative(int v) const noexcept { return derivative_[v]; }

 private:
  JetLayout(int dim, int order);

  int dim_;
  int order_;
  std::vector<std::vector<std::uint8_t>> exponents_;
  std::vector<int> degree_;
  std::vector<std::size_t> prefix_;
  std::vector<Term> products_;
  std::vector<std::vector<Lowering>> derivative_;
};

/// Truncated multivariate Taylor polynomial around a chart point:
/// c[alpha] is the coefficient of (u - u0)^alpha. A jet without a layout is a
/// plain constant, which lets Eigen build zero matrices of jets.
class Jet {
 public:
  Jet() : coeffs_{0.0} {}
  Jet(double value) : coeffs_{value} {}  // NOLINT(google-explicit-constructor)
  Jet(const JetLayout& layout, double value);

  /// The coordinate function u_i around u0_i.
  static Jet variable(const JetLayout& layout, int i, double value);

  const JetLayout* layout() const noexcept { return layout_; }
  double value() const noexcept { return coeffs_[0]; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double coeff(std::size_t index) const { return index < coeffs_.size() ? coeffs_[index] : 0.0; }
  /// Exact partial derivative of the represented polynomial at u0.
  double partial(std::span<const std::uint8_t> alpha) const;
  /// d/du_i at u0.
  double d(int i) const;
  bool is_constant() const noexcept;

  /// Partial derivative as a jet; coefficients of the top degree become zero
  /// (they are not determined by the truncation).
  Jet derivative(int i) const;
  /// Re-expresses the jet in a lower-order layout of the same dimension.
  Jet truncated(const JetLayout& target) const;
  /// Nilpotent part (the jet minus its value).
  Jet shift() const;

  Jet& operator+=(const Jet& b);
  Jet& operator-=(const Jet& b);
  Jet& operator*=(const Jet& b);
  Jet& operator/=(const Jet& b);
  Jet& operator*=(double s);

  friend Jet operator-(Jet a);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  void adopt(const JetLayout* layout);

  const JetLayout* layout_ = nullptr;
  std::vector<double> coeffs_;
};

/// phi(a) from the derivatives phi^(k)(a0), k = 0..order.
Jet compose(const Jet& a, std::span<const double> derivatives);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet inverse(const Jet& a);

inline double scalar_value(const Jet& x) noexcept { return x.value(); }
inline bool is_constant_scalar(const Jet& x) noexcept { return x.is_constant(); }
bool all_finite(const Jet& x) noexcept;
Jet pow_int(const Jet& x, long n);
Jet pow_real(const Jet& x, double r);

}  // namespace pbih

namespace Eigen {
template <>
struct NumTraits<pbih::Jet> : NumTraits<double> {
  using Real = pbih::Jet;
  using NonInteger = pbih::Jet;
  using Nested = pbih::Jet;
  using Literal = pbih::Jet;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 8,
    MulCost = 32,
  };
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<pbih::Jet, double, BinaryOp> {
  using ReturnType = pbih::Jet;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, pbih::Jet, BinaryOp> {
  using ReturnType = pbih::Jet;
};
}  // namespace Eigen
