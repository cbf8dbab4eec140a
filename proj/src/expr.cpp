#include "pbih/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <utility>

namespace pbih {

struct Expr::Node {
  Op op = Op::constant;
  double value = 0.0;
  std::string name;
  std::vector<Expr> children;
};

namespace {

constexpr std::array<std::pair<std::string_view, Op>, 7> kFunctions{{
    {"sin", Op::sin},
    {"cos", Op::cos},
    {"sinh", Op::sinh},
    {"cosh", Op::cosh},
    {"exp", Op::exp},
    {"ln", Op::ln},
    {"sqrt", Op::sqrt},
}};

double fold_unary(Op op, double a) {
  switch (op) {
    case Op::neg: return -a;
    case Op::sin: return std::sin(a);
    case Op::cos: return std::cos(a);
    case Op::sinh: return std::sinh(a);
    case Op::cosh: return std::cosh(a);
    case Op::exp: return std::exp(a);
    case Op::ln: return a > 0 ? std::log(a) : std::nan("");
    case Op::sqrt: return a >= 0 ? std::sqrt(a) : std::nan("");
    default: return std::nan("");
  }
}

double fold_binary(Op op, double a, double b) {
  switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return b != 0 ? a / b : std::nan("");
    case Op::pow:
      if (std::nearbyint(b) != b && a <= 0) return std::nan("");
      if (b < 0 && a == 0) return std::nan("");
      return std::pow(a, b);
    default: return std::nan("");
  }
}

}  // namespace

bool is_unary(Op op) noexcept {
  switch (op) {
    case Op::neg:
    case Op::sin:
    case Op::cos:
    case Op::sinh:
    case Op::cosh:
    case Op::exp:
    case Op::ln:
    case Op::sqrt: return true;
    default: return false;
  }
}

bool is_binary(Op op) noexcept {
  switch (op) {
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow: return true;
    default: return false;
  }
}

std::string_view op_name(Op op) noexcept {
  switch (op) {
    case Op::constant: return "constant";
    case Op::variable: return "variable";
    case Op::neg: return "-";
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::pow: return "^";
    default:
      for (const auto& [name, f] : kFunctions)
        if (f == op) return name;
      return "?";
  }
}

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->name = std::move(name);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_raw(Op op, std::vector<Expr> children) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children = std::move(children);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::children() const noexcept { return node_->children; }

std::size_t Expr::size() const {
  std::size_t n = 1;
  for (const Expr& c : children()) n += c.size();
  return n;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  if (a.op() == Op::constant) return a.value() == b.value();
  if (a.op() == Op::variable) return a.name() == b.name();
  const auto ca = a.children();
  const auto cb = b.children();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (!structurally_equal(ca[i], cb[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Simplifying builders

Expr apply(Op op, const Expr& a) {
  if (a.is_constant()) {
    const double v = fold_unary(op, a.value());
    if (std::isfinite(v)) return Expr(v);
  }
  return Expr::make_raw(op, {a});
}

Expr apply(Op op, const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    const double v = fold_binary(op, a.value(), b.value());
    if (std::isfinite(v)) return Expr(v);
  }
  switch (op) {
    case Op::add:
      if (a.is_constant(0)) return b;
      if (b.is_constant(0)) return a;
      break;
    case Op::sub:
      if (b.is_constant(0)) return a;
      if (a.is_constant(0)) return apply(Op::neg, b);
      break;
    case Op::mul:
      if (a.is_constant(0) || b.is_constant(0)) return Expr(0.0);
      if (a.is_constant(1)) return b;
      if (b.is_constant(1)) return a;
      break;
    case Op::div:
      if (a.is_constant(0) && !b.is_constant(0)) return Expr(0.0);
      if (b.is_constant(1)) return a;
      break;
    case Op::pow:
      if (b.is_constant(0)) return Expr(1.0);
      if (b.is_constant(1)) return a;
      break;
    default: break;
  }
  return Expr::make_raw(op, {a, b});
}

Expr operator-(const Expr& a) { return apply(Op::neg, a); }
Expr operator+(const Expr& a, const Expr& b) { return apply(Op::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return apply(Op::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return apply(Op::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return apply(Op::div, a, b); }
Expr pow(const Expr& base, const Expr& exponent) { return apply(Op::pow, base, exponent); }
Expr sin(const Expr& a) { return apply(Op::sin, a); }
Expr cos(const Expr& a) { return apply(Op::cos, a); }
Expr sinh(const Expr& a) { return apply(Op::sinh, a); }
Expr cosh(const Expr& a) { return apply(Op::cosh, a); }
Expr exp(const Expr& a) { return apply(Op::exp, a); }
Expr ln(const Expr& a) { return apply(Op::ln, a); }
Expr sqrt(const Expr& a) { return apply(Op::sqrt, a); }

// ---------------------------------------------------------------------------
// Parser
//
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := base ('^' unary)?
//   base  := number | ident | ident '(' expr ')' | '(' expr ')'

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::make_raw(Op::add, {lhs, parse_term()});
      } else if (accept('-')) {
        lhs = Expr::make_raw(Op::sub, {lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::make_raw(Op::mul, {lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = Expr::make_raw(Op::div, {lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) {
      Expr operand = parse_unary();
      // A negated literal is stored as a negative constant so that the
      // canonical form "(-2)" reparses to the same tree.
      if (operand.is_constant()) return Expr(-operand.value());
      return Expr::make_raw(Op::neg, {operand});
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_base();
    if (accept('^')) return Expr::make_raw(Op::pow, {base, parse_unary()});
    return base;
  }

  Expr parse_base() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view ident = text_.substr(start, pos_ - start);
      const auto fn = std::find_if(kFunctions.begin(), kFunctions.end(),
                                   [&](const auto& entry) { return entry.first == ident; });
      if (fn != kFunctions.end()) {
        if (!accept('(')) fail("function '" + std::string(ident) + "' requires '('");
        Expr arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return Expr::make_raw(fn->second, {arg});
      }
      return Expr::variable(std::string(ident));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    const std::string_view lit = text_.substr(start, pos_ - start);
    if (lit == ".") {
      pos_ = start;
      fail("malformed number");
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
    if (ec != std::errc() || ptr != lit.data() + lit.size()) {
      pos_ = start;
      fail("malformed number '" + std::string(lit) + "'");
    }
    return Expr(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void emit_string(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.value());
      if (std::signbit(e.value())) {
        out += '(';
        out += buf;
        out += ')';
      } else {
        out += buf;
      }
      return;
    }
    case Op::variable: out += e.name(); return;
    case Op::neg:
      out += "(-";
      emit_string(e.arg(0), out);
      out += ')';
      return;
    default: break;
  }
  if (is_unary(e.op())) {
    out += op_name(e.op());
    out += '(';
    emit_string(e.arg(0), out);
    out += ')';
    return;
  }
  out += '(';
  emit_string(e.arg(0), out);
  out += ' ';
  out += op_name(e.op());
  out += ' ';
  emit_string(e.arg(1), out);
  out += ')';
}

void collect_variables(const Expr& e, std::set<std::string>& out) {
  if (e.op() == Op::variable) {
    out.insert(e.name());
    return;
  }
  for (const Expr& c : e.children()) collect_variables(c, out);
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string to_string(const Expr& e) {
  std::string out;
  emit_string(e, out);
  return out;
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Differentiation

Expr differentiate(const Expr& e, std::string_view v) {
  switch (e.op()) {
    case Op::constant: return Expr(0.0);
    case Op::variable: return Expr(e.name() == v ? 1.0 : 0.0);
    default: break;
  }
  const Expr& a = e.arg(0);
  const Expr da = differentiate(a, v);
  switch (e.op()) {
    case Op::neg: return -da;
    case Op::sin: return cos(a) * da;
    case Op::cos: return -(sin(a) * da);
    case Op::sinh: return cosh(a) * da;
    case Op::cosh: return sinh(a) * da;
    case Op::exp: return e * da;
    case Op::ln: return da / a;
    case Op::sqrt: return da / (Expr(2.0) * e);
    default: break;
  }
  const Expr& b = e.arg(1);
  const Expr db = differentiate(b, v);
  switch (e.op()) {
    case Op::add: return da + db;
    case Op::sub: return da - db;
    case Op::mul: return da * b + a * db;
    case Op::div: return (da * b - a * db) / pow(b, Expr(2.0));
    case Op::pow:
      if (db.is_constant(0)) {
        if (da.is_constant(0)) return Expr(0.0);
        return b * pow(a, b - Expr(1.0)) * da;
      }
      if (da.is_constant(0)) return e * ln(a) * db;
      return e * (db * ln(a) + b * da / a);
    default: return Expr(0.0);
  }
}

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacement) {
  switch (e.op()) {
    case Op::constant: return e;
    case Op::variable: {
      const auto it = replacement.find(e.name());
      return it == replacement.end() ? e : it->second;
    }
    default: break;
  }
  if (is_unary(e.op())) return apply(e.op(), substitute(e.arg(0), replacement));
  return apply(e.op(), substitute(e.arg(0), replacement), substitute(e.arg(1), replacement));
}

Expr substitute_values(const Expr& e, const Bindings& values) {
  std::map<std::string, Expr, std::less<>> replacement;
  for (const auto& [name, v] : values) replacement.emplace(name, Expr(v));
  return substitute(e, replacement);
}

double evaluate(const Expr& e, const Bindings& bindings) {
  const auto vars = free_variables(e);
  std::vector<std::string> slots(vars.begin(), vars.end());
  std::vector<double> inputs;
  inputs.reserve(slots.size());
  std::vector<std::string> missing;
  for (const auto& name : slots) {
    const auto it = bindings.find(name);
    if (it == bindings.end()) {
      missing.push_back(name);
    } else {
      inputs.push_back(it->second);
    }
  }
  if (!missing.empty()) throw UnboundVariableError(std::move(missing));
  const Program program(e, std::move(slots));
  return program(std::span<const double>(inputs));
}

// ---------------------------------------------------------------------------
// Program

Program::Program(const Expr& e, std::vector<std::string> slots) : slots_(std::move(slots)) {
  std::vector<std::string> missing;
  for (const auto& name : free_variables(e))
    if (std::find(slots_.begin(), slots_.end(), name) == slots_.end()) missing.push_back(name);
  if (!missing.empty()) throw UnboundVariableError(std::move(missing));
  emit(e);
}

void Program::emit(const Expr& e) {
  switch (e.op()) {
    case Op::constant: code_.push_back({Op::constant, 0, e.value()}); return;
    case Op::variable: {
      const auto it = std::find(slots_.begin(), slots_.end(), e.name());
      code_.push_back({Op::variable, static_cast<std::uint32_t>(it - slots_.begin()), 0.0});
      return;
    }
    default: break;
  }
  for (const Expr& c : e.children()) emit(c);
  code_.push_back({e.op(), 0, 0.0});
}

namespace detail {
void throw_domain(std::string_view what, double at) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (argument %.17g)", at);
  throw DomainError(std::string(what) + buf);
}
}  // namespace detail

}  // namespace pbih
