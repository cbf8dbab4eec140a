#include "pbih/geometry.hpp"

#include <cmath>

#include "pbih/linalg.hpp"

namespace pbih {

// ---------------------------------------------------------------------------
// Immersion

Immersion::Immersion(std::vector<std::string> chart_variables, std::vector<Expr> components,
                     std::vector<Interval> chart_domain)
    : variables_(std::move(chart_variables)),
      components_(std::move(components)),
      domain_(std::move(chart_domain)) {
  if (variables_.empty()) throw PreconditionError("immersion needs at least one chart variable");
  if (components_.size() != variables_.size() + 1)
    throw PreconditionError("a hypersurface of dimension " + std::to_string(variables_.size()) +
                            " needs " + std::to_string(variables_.size() + 1) + " components");
  if (!domain_.empty() && domain_.size() != variables_.size())
    throw PreconditionError("chart domain must give one interval per chart variable");
  auto programs = std::make_shared<std::vector<Program>>();
  for (const Expr& c : components_) programs->emplace_back(c, variables_);
  programs_ = std::move(programs);
}

bool Immersion::contains(std::span<const double> u) const {
  if (domain_.empty()) return true;
  for (std::size_t i = 0; i < domain_.size(); ++i)
    if (u[i] < domain_[i].lo || u[i] > domain_[i].hi) return false;
  return true;
}

Eigen::VectorXd Immersion::position(std::span<const double> u) const {
  Eigen::VectorXd x(ambient_dim());
  for (int a = 0; a < ambient_dim(); ++a) x[a] = (*programs_)[a](u);
  return x;
}

std::vector<Jet> Immersion::jets(std::span<const double> u, int order) const {
  const JetLayout& layout = JetLayout::get(dim(), order);
  std::vector<Jet> vars;
  vars.reserve(dim());
  for (int i = 0; i < dim(); ++i) vars.push_back(Jet::variable(layout, i, u[i]));
  std::vector<Jet> out;
  out.reserve(ambient_dim());
  for (const Program& p : *programs_) {
    Jet j = p(std::span<const Jet>(vars));
    if (!j.layout()) j = Jet(layout, j.value());
    out.push_back(std::move(j));
  }
  return out;
}

Immersion Immersion::reparametrized(const Eigen::MatrixXd& M, const Eigen::VectorXd& shift) const {
  std::map<std::string, Expr, std::less<>> repl;
  for (int i = 0; i < dim(); ++i) {
    Expr e(shift[i]);
    for (int j = 0; j < dim(); ++j) e = e + Expr(M(i, j)) * Expr::variable(variables_[j]);
    repl.emplace(variables_[i], e);
  }
  std::vector<Expr> comps;
  for (const Expr& c : components_) comps.push_back(substitute(c, repl));
  return Immersion(variables_, std::move(comps));
}

Immersion Immersion::scaled(double lambda) const {
  std::vector<Expr> comps;
  for (const Expr& c : components_) comps.push_back(Expr(lambda) * c);
  return Immersion(variables_, std::move(comps), domain_);
}

// ---------------------------------------------------------------------------
// Ambient pipeline: γ, its Euclidean derivatives, Christoffel symbols of
// e^{2γ}h and its Ricci tensor, all by symbolic differentiation.

struct AmbientSpace::Pipeline {
  int n = 0;
  Expr gamma;
  std::vector<std::string> coordinates;
  std::vector<std::string> parameters;
  std::vector<std::string> slots;
  bool flat = true;

  Program gamma_p;
  std::vector<Expr> dgamma;
  std::vector<Program> dgamma_p;
  std::vector<Program> ddgamma_p;

  mutable std::once_flag christoffel_once;
  mutable std::vector<Expr> christoffel;
  mutable std::vector<Program> christoffel_p;
  mutable std::once_flag ricci_once;
  mutable std::vector<Program> ricci_p;

  void build_christoffel() const {
    std::call_once(christoffel_once, [this] {
      // g_ab = δ_ab e^{2γ}, g^ab = δ^ab e^{-2γ};
      // Γ^a_bc = ½ g^ad (∂_b g_dc + ∂_c g_db - ∂_d g_bc).
      const Expr w = exp(Expr(2.0) * gamma);
      const Expr w_inv = exp(Expr(-2.0) * gamma);
      std::vector<Expr> dw;
      for (const auto& c : coordinates) dw.push_back(differentiate(w, c));
      auto dmetric = [&](int a, int b, int c) { return a == b ? dw[c] : Expr(0.0); };
      christoffel.resize(n * n * n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            Expr sum(0.0);
            for (int d = 0; d < n; ++d) {
              const Expr inv = a == d ? w_inv : Expr(0.0);
              sum = sum + inv * (dmetric(d, c, b) + dmetric(d, b, c) - dmetric(b, c, d));
            }
            christoffel[(a * n + b) * n + c] = Expr(0.5) * sum;
          }
      for (const Expr& e : christoffel) christoffel_p.emplace_back(e, slots);
    });
  }

  const Expr& gam(int a, int b, int c) const { return christoffel[(a * n + b) * n + c]; }

  void build_ricci() const {
    build_christoffel();
    std::call_once(ricci_once, [this] {
      // R_bd = ∂_a Γ^a_db - ∂_d Γ^a_ab + Γ^a_ae Γ^e_db - Γ^a_de Γ^e_ab
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
          Expr r(0.0);
          for (int a = 0; a < n; ++a) {
            r = r + differentiate(gam(a, d, b), coordinates[a]) -
                differentiate(gam(a, a, b), coordinates[d]);
            for (int e = 0; e < n; ++e)
              r = r + gam(a, a, e) * gam(e, d, b) - gam(a, d, e) * gam(e, a, b);
          }
          ricci_p.emplace_back(r, slots);
        }
    });
  }
};

namespace {

std::vector<std::string> default_coordinates(int n) {
  if (n == 3) return {"x", "y", "z"};
  if (n == 2) return {"x", "y"};
  std::vector<std::string> out;
  for (int a = 1; a <= n; ++a) out.push_back("x" + std::to_string(a));
  return out;
}

std::shared_ptr<AmbientSpace::Pipeline> make_pipeline(Expr gamma, std::vector<std::string> coordinates,
                                                      std::vector<std::string> parameters) {
  auto p = std::make_shared<AmbientSpace::Pipeline>();
  p->n = static_cast<int>(coordinates.size());
  p->coordinates = std::move(coordinates);
  p->parameters = std::move(parameters);
  p->slots = p->coordinates;
  p->slots.insert(p->slots.end(), p->parameters.begin(), p->parameters.end());
  p->gamma = std::move(gamma);
  p->flat = p->gamma.is_constant();
  p->gamma_p = Program(p->gamma, p->slots);
  for (const auto& c : p->coordinates) {
    p->dgamma.push_back(differentiate(p->gamma, c));
    p->dgamma_p.emplace_back(p->dgamma.back(), p->slots);
  }
  for (int a = 0; a < p->n; ++a)
    for (const auto& c : p->coordinates) p->ddgamma_p.emplace_back(differentiate(p->dgamma[a], c), p->slots);
  return p;
}

template <typename Scalar>
std::vector<Scalar> inputs_for(std::span<const Scalar> x, const std::vector<double>& values) {
  std::vector<Scalar> in(x.begin(), x.end());
  for (double v : values) in.push_back(Scalar(v));
  return in;
}

}  // namespace

AmbientSpace AmbientSpace::euclidean(int dim) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const Pipeline>> cache;
  AmbientSpace amb;
  {
    const std::lock_guard lock(mutex);
    auto& slot = cache[dim];
    if (!slot) slot = make_pipeline(Expr(0.0), default_coordinates(dim), {});
    amb.pipeline_ = slot;
  }
  amb.kind_ = AmbientKind::euclidean;
  return amb;
}

AmbientSpace AmbientSpace::conformal(Expr gamma, std::vector<std::string> coordinates,
                                     std::vector<std::string> parameters,
                                     std::vector<double> parameter_values) {
  if (coordinates.size() < 2) throw PreconditionError("ambient dimension must be at least 2");
  if (parameter_values.size() != parameters.size())
    throw PreconditionError("one value is required per conformal-factor parameter");
  AmbientSpace amb;
  amb.pipeline_ = make_pipeline(std::move(gamma), std::move(coordinates), std::move(parameters));
  amb.values_ = std::move(parameter_values);
  amb.kind_ = amb.pipeline_->flat ? AmbientKind::euclidean : AmbientKind::conformal;
  return amb;
}

AmbientSpace AmbientSpace::with_parameters(std::vector<double> values) const {
  if (values.size() != pipeline_->parameters.size())
    throw PreconditionError("one value is required per conformal-factor parameter");
  AmbientSpace amb(*this);
  amb.values_ = std::move(values);
  return amb;
}

AmbientSpace AmbientSpace::declared_einstein(double scalar_curvature) const {
  AmbientSpace amb(*this);
  amb.kind_ = AmbientKind::declared_einstein;
  amb.declared_s_ = scalar_curvature;
  return amb;
}

int AmbientSpace::dim() const noexcept { return pipeline_->n; }
const Expr& AmbientSpace::gamma() const noexcept { return pipeline_->gamma; }
const std::vector<std::string>& AmbientSpace::coordinates() const noexcept { return pipeline_->coordinates; }
const std::vector<std::string>& AmbientSpace::parameters() const noexcept { return pipeline_->parameters; }
bool AmbientSpace::is_flat() const noexcept { return pipeline_->flat; }

Expr AmbientSpace::bound_gamma() const {
  Bindings b;
  for (std::size_t i = 0; i < values_.size(); ++i) b[pipeline_->parameters[i]] = values_[i];
  return substitute_values(pipeline_->gamma, b);
}

double AmbientSpace::gamma_at(std::span<const double> x) const {
  const auto in = inputs_for(x, values_);
  return pipeline_->gamma_p(std::span<const double>(in));
}

Eigen::VectorXd AmbientSpace::gamma_gradient(std::span<const double> x) const {
  const auto in = inputs_for(x, values_);
  Eigen::VectorXd out(dim());
  for (int a = 0; a < dim(); ++a) out[a] = pipeline_->dgamma_p[a](std::span<const double>(in));
  return out;
}

Eigen::MatrixXd AmbientSpace::gamma_hessian(std::span<const double> x) const {
  const auto in = inputs_for(x, values_);
  const int n = dim();
  Eigen::MatrixXd out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = pipeline_->ddgamma_p[a * n + b](std::span<const double>(in));
  return out;
}

Eigen::MatrixXd AmbientSpace::metric(std::span<const double> x) const {
  const int n = dim();
  return std::exp(2.0 * gamma_at(x)) * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd AmbientSpace::ricci(std::span<const double> x) const {
  const int n = dim();
  if (is_flat()) return Eigen::MatrixXd::Zero(n, n);
  pipeline_->build_ricci();
  const auto in = inputs_for(x, values_);
  Eigen::MatrixXd out(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) out(b, d) = pipeline_->ricci_p[b * n + d](std::span<const double>(in));
  return out;
}

double AmbientSpace::scalar_curvature(std::span<const double> x) const {
  if (is_flat()) return 0.0;
  return std::exp(-2.0 * gamma_at(x)) * ricci(x).trace();
}

Jet AmbientSpace::gamma_jet(std::span<const Jet> x) const {
  const auto in = inputs_for(x, values_);
  return pipeline_->gamma_p(std::span<const Jet>(in));
}

std::vector<Jet> AmbientSpace::gamma_gradient_jet(std::span<const Jet> x) const {
  const auto in = inputs_for(x, values_);
  std::vector<Jet> out;
  for (const Program& p : pipeline_->dgamma_p) out.push_back(p(std::span<const Jet>(in)));
  return out;
}

std::vector<Jet> AmbientSpace::christoffel_jet(std::span<const Jet> x) const {
  pipeline_->build_christoffel();
  const auto in = inputs_for(x, values_);
  std::vector<Jet> out;
  out.reserve(pipeline_->christoffel_p.size());
  for (const Program& p : pipeline_->christoffel_p) out.push_back(p(std::span<const Jet>(in)));
  return out;
}

// ---------------------------------------------------------------------------
// Pointwise kernel

double GeometryAtPoint::norm(const Eigen::VectorXd& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

namespace {

using JetMatrix = Eigen::Matrix<Jet, Eigen::Dynamic, Eigen::Dynamic>;
using JetVector = Eigen::Matrix<Jet, Eigen::Dynamic, 1>;

Eigen::VectorXd chart_gradient(const Eigen::MatrixXd& g_inv, const Jet& field) {
  Eigen::VectorXd d(g_inv.rows());
  for (int i = 0; i < d.size(); ++i) d[i] = field.d(i);
  return g_inv * d;
}

/// (1/√G) ∂_i(√G g^ij ∂_j u) at the expansion point. `field` must be
/// accurate to order 2, `g_inv` and `sqrt_det` to order 1.
double chart_laplacian(const JetMatrix& g_inv, const Jet& sqrt_det, const Jet& field) {
  const int m = static_cast<int>(g_inv.rows());
  std::vector<Jet> du;
  for (int j = 0; j < m; ++j) du.push_back(field.derivative(j));
  double div = 0.0;
  for (int i = 0; i < m; ++i) {
    Jet flux(0.0);
    for (int j = 0; j < m; ++j) flux += g_inv(i, j) * du[j];
    flux = sqrt_det * flux;
    div += flux.d(i);
  }
  return div / sqrt_det.value();
}

Eigen::MatrixXd values(const JetMatrix& M) {
  return M.unaryExpr([](const Jet& j) { return j.value(); });
}

struct Kernel {
  const JetLayout* layout = nullptr;
  std::vector<Jet> x;  // ambient position, order 2
  JetMatrix tangents;  // n x m
  JetMatrix g;
  JetMatrix g_inv;
  Jet sqrt_det;
  Eigen::MatrixXd g_val;
  Eigen::MatrixXd g_inv_val;
};

Kernel chart_kernel(const Immersion& imm, const AmbientSpace& amb, std::span<const double> u,
                    std::vector<std::vector<Jet>>* second = nullptr, Jet* conformal_weight = nullptr) {
  const int m = imm.dim();
  const int n = m + 1;
  if (amb.dim() != n)
    throw PreconditionError("ambient dimension " + std::to_string(amb.dim()) +
                            " does not match immersion dimension " + std::to_string(m));
  if (!imm.contains(u)) throw PreconditionError("chart point outside the chart domain");

  Kernel k;
  const JetLayout& l2 = JetLayout::get(m, 2);
  k.layout = &l2;
  const std::vector<Jet> x4 = imm.jets(u, 4);
  k.tangents = JetMatrix(n, m);
  for (int a = 0; a < n; ++a) {
    k.x.push_back(x4[a].truncated(l2));
    for (int i = 0; i < m; ++i) k.tangents(a, i) = x4[a].derivative(i).truncated(l2);
  }
  if (second) {
    second->assign(m * m, std::vector<Jet>(n));
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < m; ++i) {
        const Jet di = x4[a].derivative(i);
        for (int j = 0; j < m; ++j) (*second)[i * m + j][a] = di.derivative(j).truncated(l2);
      }
  }

  Jet w(l2, 1.0);
  if (!amb.is_flat()) w = exp(Jet(2.0) * amb.gamma_jet(k.x));
  if (conformal_weight) *conformal_weight = w;

  k.g = linalg::product(k.tangents.transpose(), k.tangents).unaryExpr([&](const Jet& e) { return w * e; });
  k.g_val = values(k.g);
  const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k.g_val).eigenvalues().minCoeff();
  if (!(smallest > 1e-12)) throw DegenerateChartError("induced metric is degenerate at this chart point");
  k.g_inv = linalg::inverse(k.g);
  k.g_inv_val = values(k.g_inv);
  k.sqrt_det = sqrt(linalg::determinant(k.g));
  return k;
}

GeometryAtPoint compute_geometry(const Immersion& imm, const AmbientSpace& metric_amb,
                                 const AmbientSpace& probe, std::span<const double> u,
                                 Orientation orientation) {
  const int m = imm.dim();
  const int n = m + 1;
  std::vector<std::vector<Jet>> second;
  Jet w;
  Kernel k = chart_kernel(imm, metric_amb, u, &second, &w);
  const JetLayout& l2 = *k.layout;

  GeometryAtPoint geo;
  geo.m = m;
  geo.u = Eigen::Map<const Eigen::VectorXd>(u.data(), m);
  geo.x.resize(n);
  for (int a = 0; a < n; ++a) geo.x[a] = k.x[a].value();
  geo.g = k.g_val;
  geo.g_inv = k.g_inv_val;
  geo.frame = values(k.tangents);

  // Unit normal: the Euclidean cofactor covector of the tangents, oriented so
  // that det[∂_1X, ..., ∂_mX, η] > 0, normalized in e^{2γ}h.
  JetVector cov(n);
  for (int a = 0; a < n; ++a) {
    JetMatrix minor(m, m);
    for (int r = 0, rr = 0; r < n; ++r) {
      if (r == a) continue;
      for (int i = 0; i < m; ++i) minor(rr, i) = k.tangents(r, i);
      ++rr;
    }
    const double sign = ((a + 1 + n) % 2 == 0) ? 1.0 : -1.0;
    cov[a] = Jet(sign) * linalg::determinant(minor);
  }
  Jet cov_sq(l2, 0.0);
  for (int a = 0; a < n; ++a) cov_sq += cov[a] * cov[a];
  const Jet scale = inverse(sqrt(w * cov_sq));
  JetVector eta(n);
  for (int a = 0; a < n; ++a) eta[a] = (orientation == Orientation::plus ? scale : -scale) * cov[a];
  geo.eta.resize(n);
  for (int a = 0; a < n; ++a) geo.eta[a] = eta[a].value();

  std::vector<Jet> christoffel;
  if (!metric_amb.is_flat()) christoffel = metric_amb.christoffel_jet(k.x);

  JetMatrix B(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Jet s(l2, 0.0);
      for (int a = 0; a < n; ++a) {
        Jet acc = second[i * m + j][a];
        if (!christoffel.empty())
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
              acc += christoffel[(a * n + b) * n + c] * k.tangents(b, i) * k.tangents(c, j);
        s += eta[a] * acc;
      }
      B(i, j) = w * s;
    }
  const JetMatrix A = linalg::product(k.g_inv, B);
  Jet f(l2, 0.0);
  for (int i = 0; i < m; ++i) f += A(i, i);
  f = f * Jet(1.0 / m);

  geo.B = values(B);
  geo.A = values(A);
  geo.f = f.value();
  geo.A_norm_sq = (geo.A * geo.A).trace();
  geo.grad_f = chart_gradient(geo.g_inv, f);
  geo.lap_f = chart_laplacian(k.g_inv, k.sqrt_det, f);

  const AmbientCurvature curv = ambient_curvature(metric_amb, linalg::as_span(geo.x), geo.eta, geo.frame);
  geo.ric_eta_eta = curv.ric_eta_eta;
  geo.ricci_eta_tan = curv.ricci_eta_tan;
  geo.scalar_curvature = curv.scalar_S;

  // Probe conformal factor.
  const Jet pg = probe.gamma_jet(k.x);
  const std::vector<Jet> pdg = probe.gamma_gradient_jet(k.x);
  const Eigen::MatrixXd hess = probe.gamma_hessian(linalg::as_span(geo.x));
  Jet eta_gamma(l2, 0.0);
  for (int a = 0; a < n; ++a) eta_gamma += eta[a] * pdg[a];
  const Jet F = eta_gamma * exp(-pg);
  Eigen::VectorXd ambient_grad(n);
  for (int a = 0; a < n; ++a) ambient_grad[a] = pdg[a].value();

  geo.gamma = pg.value();
  geo.eta_gamma = eta_gamma.value();
  geo.hess_gamma_eta_eta = geo.eta.dot(hess * geo.eta);
  geo.eta_eta_gamma = geo.hess_gamma_eta_eta;
  geo.lap_ambient_gamma = hess.trace();
  geo.grad_ambient_gamma_sq = ambient_grad.squaredNorm();
  geo.grad_M_gamma = chart_gradient(geo.g_inv, pg);
  geo.grad_M_gamma_sq = geo.inner(geo.grad_M_gamma, geo.grad_M_gamma);
  geo.lap_M_gamma = chart_laplacian(k.g_inv, k.sqrt_det, pg);
  geo.grad_M_eta_gamma = chart_gradient(geo.g_inv, eta_gamma);
  geo.eta_gamma_exp = F.value();
  geo.grad_M_eta_gamma_exp = chart_gradient(geo.g_inv, F);
  geo.lap_M_eta_gamma_exp = chart_laplacian(k.g_inv, k.sqrt_det, F);
  return geo;
}

}  // namespace

GeometryAtPoint geometry_at(const Immersion& imm, const AmbientSpace& amb, std::span<const double> u,
                            Orientation orientation) {
  return compute_geometry(imm, amb, amb, u, orientation);
}

GeometryAtPoint base_geometry_at(const Immersion& imm, const AmbientSpace& amb,
                                 std::span<const double> u, Orientation orientation) {
  return compute_geometry(imm, AmbientSpace::euclidean(amb.dim()), amb, u, orientation);
}

IntrinsicOps intrinsic_scalar_ops(const Immersion& imm, const AmbientSpace& amb, const Expr& field,
                                  std::span<const double> u) {
  const Kernel k = chart_kernel(imm, amb, u);
  const int m = imm.dim();
  std::vector<Jet> vars;
  for (int i = 0; i < m; ++i) vars.push_back(Jet::variable(*k.layout, i, u[i]));
  const Program program(field, imm.variables());
  const Jet value = program(std::span<const Jet>(vars));
  IntrinsicOps out;
  out.grad_M = chart_gradient(k.g_inv_val, value);
  out.lap_M = value.layout() ? chart_laplacian(k.g_inv, k.sqrt_det, value) : 0.0;
  return out;
}

AmbientCurvature ambient_curvature(const AmbientSpace& amb, std::span<const double> x,
                                   const Eigen::VectorXd& eta, const Eigen::MatrixXd& frame) {
  AmbientCurvature out;
  const int m = static_cast<int>(frame.cols());
  out.ricci_eta_tan = Eigen::VectorXd::Zero(m);
  if (amb.is_flat()) return out;
  const Eigen::MatrixXd ric = amb.ricci(x);
  const double w = std::exp(2.0 * amb.gamma_at(x));
  const Eigen::MatrixXd g = w * frame.transpose() * frame;
  out.ric_eta_eta = eta.dot(ric * eta);
  out.ricci_eta_tan = g.ldlt().solve(frame.transpose() * (ric * eta));
  out.scalar_S = ric.trace() / w;
  return out;
}

ValidatedEinstein validate_einstein(const AmbientSpace& amb, std::span<const Eigen::VectorXd> points,
                                    double tolerance) {
  double s = 0.0;
  if (amb.kind() == AmbientKind::declared_einstein) {
    s = amb.declared_scalar_curvature();
  } else if (!amb.is_flat()) {
    throw PreconditionError("ambient is not declared Einstein");
  }
  const int n = amb.dim();
  double worst = 0.0;
  for (const Eigen::VectorXd& x : points) {
    const std::span<const double> xs(x.data(), x.size());
    const Eigen::MatrixXd dev = amb.ricci(xs) - (s / n) * amb.metric(xs);
    worst = std::max(worst, dev.cwiseAbs().maxCoeff());
  }
  if (!(worst <= tolerance))
    throw PreconditionError("Einstein validation failed: max |Ric - (S/(m+1)) metric| = " +
                            std::to_string(worst));
  return ValidatedEinstein(s, worst);
}

}  // namespace pbih
