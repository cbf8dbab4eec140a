#include "pbih/jet.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace pbih {

namespace {

void graded_monomials(int dim, int degree, std::vector<std::uint8_t>& current, int slot,
                      std::vector<std::vector<std::uint8_t>>& out) {
  if (slot == dim - 1) {
    current[slot] = static_cast<std::uint8_t>(degree);
    out.push_back(current);
    return;
  }
  for (int k = degree; k >= 0; --k) {
    current[slot] = static_cast<std::uint8_t>(k);
    graded_monomials(dim, degree - k, current, slot + 1, out);
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

JetLayout::JetLayout(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || order < 0) throw std::invalid_argument("JetLayout: bad dimension or order");
  std::vector<std::uint8_t> current(dim, 0);
  for (int d = 0; d <= order; ++d) {
    graded_monomials(dim, d, current, 0, exponents_);
    prefix_.push_back(exponents_.size());
    degree_.resize(exponents_.size(), d);
  }
  std::map<std::vector<std::uint8_t>, std::uint32_t> lookup;
  for (std::size_t i = 0; i < exponents_.size(); ++i)
    lookup.emplace(exponents_[i], static_cast<std::uint32_t>(i));

  std::vector<std::uint8_t> sum(dim);
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    for (std::size_t j = 0; j < exponents_.size(); ++j) {
      if (degree_[i] + degree_[j] > order) continue;
      for (int v = 0; v < dim; ++v) sum[v] = exponents_[i][v] + exponents_[j][v];
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), lookup.at(sum)});
    }
  }

  derivative_.resize(dim);
  for (int v = 0; v < dim; ++v) {
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      if (exponents_[i][v] == 0) continue;
      std::vector<std::uint8_t> lower = exponents_[i];
      --lower[v];
      derivative_[v].push_back({static_cast<std::uint32_t>(i), lookup.at(lower),
                                static_cast<double>(exponents_[i][v])});
    }
  }
}

const JetLayout& JetLayout::get(int dim, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<const JetLayout>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[{dim, order}];
  if (!slot) slot.reset(new JetLayout(dim, order));
  return *slot;
}

std::span<const std::uint8_t> JetLayout::exponent(std::size_t index) const {
  return exponents_[index];
}

std::size_t JetLayout::index_of(std::span<const std::uint8_t> alpha) const {
  int d = 0;
  for (auto a : alpha) d += a;
  if (d > order_) return size();
  for (std::size_t i = d == 0 ? 0 : prefix_[d - 1]; i < prefix_[d]; ++i)
    if (std::equal(alpha.begin(), alpha.end(), exponents_[i].begin())) return i;
  return size();
}

// ---------------------------------------------------------------------------

Jet::Jet(const JetLayout& layout, double value) : layout_(&layout), coeffs_(layout.size(), 0.0) {
  coeffs_[0] = value;
}

Jet Jet::variable(const JetLayout& layout, int i, double value) {
  Jet j(layout, value);
  if (layout.order() >= 1) j.coeffs_[1 + i] = 1.0;
  return j;
}

double Jet::partial(std::span<const std::uint8_t> alpha) const {
  if (!layout_) {
    for (auto a : alpha)
      if (a != 0) return 0.0;
    return coeffs_[0];
  }
  const std::size_t idx = layout_->index_of(alpha);
  if (idx >= coeffs_.size()) throw std::out_of_range("Jet::partial beyond truncation order");
  double scale = 1.0;
  for (auto a : alpha) scale *= factorial(a);
  return coeffs_[idx] * scale;
}

double Jet::d(int i) const {
  if (!layout_ || layout_->order() < 1) return 0.0;
  return coeffs_[1 + i];
}

bool Jet::is_constant() const noexcept {
  for (std::size_t i = 1; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0.0) return false;
  return true;
}

Jet Jet::derivative(int i) const {
  if (!layout_) return Jet(0.0);
  Jet out(*layout_, 0.0);
  for (const auto& l : layout_->derivative(i)) out.coeffs_[l.to] += coeffs_[l.from] * l.factor;
  return out;
}

Jet Jet::truncated(const JetLayout& target) const {
  if (!layout_) return *this;
  if (target.dim() != layout_->dim() || target.order() > layout_->order())
    throw std::invalid_argument("Jet::truncated: incompatible layout");
  Jet out(*this);
  out.layout_ = &target;
  out.coeffs_.resize(target.size());
  return out;
}

Jet Jet::shift() const {
  Jet out(*this);
  out.coeffs_[0] = 0.0;
  return out;
}

void Jet::adopt(const JetLayout* layout) {
  if (layout_ == layout || !layout) return;
  if (layout_) throw std::logic_error("Jet: mixing jets of different layouts");
  const double v = coeffs_[0];
  layout_ = layout;
  coeffs_.assign(layout->size(), 0.0);
  coeffs_[0] = v;
}

Jet& Jet::operator+=(const Jet& b) {
  if (!b.layout_) {
    coeffs_[0] += b.coeffs_[0];
    return *this;
  }
  adopt(b.layout_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += b.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& b) {
  if (!b.layout_) {
    coeffs_[0] -= b.coeffs_[0];
    return *this;
  }
  adopt(b.layout_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= b.coeffs_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& b) { return *this = *this * b; }
Jet& Jet::operator/=(const Jet& b) { return *this = *this / b; }

Jet operator-(Jet a) {
  for (double& c : a.coeffs_) c = -c;
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!b.layout_) {
    Jet out(a);
    return out *= b.coeffs_[0];
  }
  if (!a.layout_) {
    Jet out(b);
    return out *= a.coeffs_[0];
  }
  if (a.layout_ != b.layout_) throw std::logic_error("Jet: mixing jets of different layouts");
  Jet out(*a.layout_, 0.0);
  for (const auto& t : a.layout_->products()) out.coeffs_[t.out] += a.coeffs_[t.lhs] * b.coeffs_[t.rhs];
  return out;
}

Jet operator/(const Jet& a, const Jet& b) {
  if (!b.layout_ || b.is_constant()) {
    Jet out(a);
    return out *= 1.0 / b.coeffs_[0];
  }
  return a * inverse(b);
}

// ---------------------------------------------------------------------------

Jet compose(const Jet& a, std::span<const double> derivatives) {
  if (!a.layout() || a.is_constant()) {
    if (a.layout()) return Jet(*a.layout(), derivatives[0]);
    return Jet(derivatives[0]);
  }
  const int order = a.layout()->order();
  const Jet t = a.shift();
  Jet result(*a.layout(), derivatives[order] / factorial(order));
  for (int k = order - 1; k >= 0; --k) {
    result = result * t;
    result += Jet(derivatives[k] / factorial(k));
  }
  return result;
}

namespace {

int order_of(const Jet& a) { return a.layout() ? a.layout()->order() : 0; }

template <typename F>
Jet compose_with(const Jet& a, F&& kth_derivative) {
  const int order = order_of(a);
  std::vector<double> d(order + 1);
  for (int k = 0; k <= order; ++k) d[k] = kth_derivative(k);
  return compose(a, d);
}

}  // namespace

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose_with(a, [&](int k) {
    switch (k % 4) {
      case 0: return s;
      case 1: return c;
      case 2: return -s;
      default: return -c;
    }
  });
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose_with(a, [&](int k) {
    switch (k % 4) {
      case 0: return c;
      case 1: return -s;
      case 2: return -c;
      default: return s;
    }
  });
}

Jet sinh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose_with(a, [&](int k) { return k % 2 == 0 ? s : c; });
}

Jet cosh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose_with(a, [&](int k) { return k % 2 == 0 ? c : s; });
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return compose_with(a, [&](int) { return e; });
}

Jet log(const Jet& a) {
  const double x = a.value();
  return compose_with(a, [&](int k) {
    if (k == 0) return std::log(x);
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    return sign * factorial(k - 1) / std::pow(x, k);
  });
}

Jet pow_real(const Jet& a, double r) {
  const double x = a.value();
  return compose_with(a, [&](int k) {
    double falling = 1.0;
    for (int j = 0; j < k; ++j) falling *= (r - j);
    return falling * std::pow(x, r - k);
  });
}

Jet sqrt(const Jet& a) {
  if (a.is_constant()) {
    const double r = std::sqrt(a.value());
    return a.layout() ? Jet(*a.layout(), r) : Jet(r);
  }
  return pow_real(a, 0.5);
}

Jet inverse(const Jet& a) {
  const double x = a.value();
  return compose_with(a, [&](int k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * factorial(k) / std::pow(x, k + 1);
  });
}

Jet pow_int(const Jet& x, long n) {
  if (n < 0) return inverse(pow_int(x, -n));
  Jet result(1.0);
  if (x.layout()) result = Jet(*x.layout(), 1.0);
  Jet base = x;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

bool all_finite(const Jet& x) noexcept {
  for (double c : x.coeffs())
    if (!std::isfinite(c)) return false;
  return true;
}

}  // namespace pbih
