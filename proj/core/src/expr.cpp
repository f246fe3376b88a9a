#include "srbf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace srbf {

enum class NodeKind { number, variable, negate, binary, compare, call };
enum class Variable { x, y, z, eps, eps1, eps2, eps3, eps4, eps5, pi };
enum class BinaryOp { add, sub, mul, div, pow };
enum class CompareOp { lt, le, gt, ge };
enum class Function { sin, cos, exp, sqrt, abs, floor, mod, select };

struct Expr::Node {
  NodeKind kind = NodeKind::number;
  double value = 0.0;
  Variable var = Variable::x;
  BinaryOp op = BinaryOp::add;
  CompareOp cmp = CompareOp::lt;
  Function fn = Function::sin;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct VariableName {
  std::string_view name;
  Variable var;
  int min_dimension;
};

constexpr std::array<VariableName, 10> kVariables{{
    {"x", Variable::x, 1},
    {"y", Variable::y, 2},
    {"z", Variable::z, 3},
    {"eps", Variable::eps, 0},
    {"eps1", Variable::eps1, 0},
    {"eps2", Variable::eps2, 0},
    {"eps3", Variable::eps3, 0},
    {"eps4", Variable::eps4, 0},
    {"eps5", Variable::eps5, 0},
    {"pi", Variable::pi, 0},
}};

struct FunctionName {
  std::string_view name;
  Function fn;
  std::size_t arity;
};

constexpr std::array<FunctionName, 8> kFunctions{{
    {"sin", Function::sin, 1},
    {"cos", Function::cos, 1},
    {"exp", Function::exp, 1},
    {"sqrt", Function::sqrt, 1},
    {"abs", Function::abs, 1},
    {"floor", Function::floor, 1},
    {"mod", Function::mod, 2},
    {"select", Function::select, 3},
}};

std::string_view variable_name(Variable v) {
  for (const auto& entry : kVariables) {
    if (entry.var == v) return entry.name;
  }
  return "?";
}

std::string_view function_name(Function f) {
  for (const auto& entry : kFunctions) {
    if (entry.fn == f) return entry.name;
  }
  return "?";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
  }
  return '?';
}

std::string_view compare_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

NodePtr make_number(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = NodeKind::number;
  n->value = v;
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int dimension) : text_(text), dimension_(dimension) {}

  NodePtr parse_all() {
    auto root = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { fail_at(message, pos_); }

  [[noreturn]] void fail_at(const std::string& message, std::size_t offset) const {
    throw ParseError(message + " at offset " + std::to_string(offset), offset);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool consume(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    auto lhs = parse_sum();
    std::optional<CompareOp> op;
    // Longer tokens first so "<=" is not read as "<".
    if (consume("<=") || consume("≤")) {
      op = CompareOp::le;
    } else if (consume(">=") || consume("≥")) {
      op = CompareOp::ge;
    } else if (consume("<")) {
      op = CompareOp::lt;
    } else if (consume(">")) {
      op = CompareOp::gt;
    }
    if (!op) return lhs;
    auto rhs = parse_sum();
    auto n = std::make_shared<Expr::Node>();
    n->kind = NodeKind::compare;
    n->cmp = *op;
    n->args = {lhs, rhs};
    return n;
  }

  NodePtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      BinaryOp op;
      if (consume("+")) {
        op = BinaryOp::add;
      } else if (consume("-")) {
        op = BinaryOp::sub;
      } else {
        return lhs;
      }
      lhs = make_binary(op, lhs, parse_product());
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      BinaryOp op;
      if (consume("*")) {
        op = BinaryOp::mul;
      } else if (consume("/")) {
        op = BinaryOp::div;
      } else {
        return lhs;
      }
      lhs = make_binary(op, lhs, parse_unary());
    }
  }

  NodePtr parse_unary() {
    if (consume("-")) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = NodeKind::negate;
      n->args = {parse_unary()};
      return n;
    }
    if (consume("+")) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    if (consume("^")) return make_binary(BinaryOp::pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      if (!consume(")")) fail("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) fail_at("malformed number", start);
    pos_ += static_cast<std::size_t>(ptr - first);
    return make_number(value);
  }

  NodePtr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);

    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      for (const auto& entry : kFunctions) {
        if (entry.name != name) continue;
        ++pos_;
        auto n = std::make_shared<Expr::Node>();
        n->kind = NodeKind::call;
        n->fn = entry.fn;
        if (!consume(")")) {
          do {
            n->args.push_back(parse_expr());
          } while (consume(","));
          if (!consume(")")) fail("expected ')' or ','");
        }
        if (n->args.size() != entry.arity) {
          fail_at(std::string(name) + " expects " + std::to_string(entry.arity) + " argument(s), got " +
                      std::to_string(n->args.size()),
                  start);
        }
        return n;
      }
      fail_at("unknown function '" + std::string(name) + "'", start);
    }

    for (const auto& entry : kVariables) {
      if (entry.name != name) continue;
      if (entry.min_dimension > dimension_) {
        fail_at("unknown identifier '" + std::string(name) + "' in " + std::to_string(dimension_) + "D",
                start);
      }
      auto n = std::make_shared<Expr::Node>();
      n->kind = NodeKind::variable;
      n->var = entry.var;
      return n;
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  static NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = NodeKind::binary;
    n->op = op;
    n->args = {std::move(lhs), std::move(rhs)};
    return n;
  }

  std::string_view text_;
  int dimension_;
  std::size_t pos_ = 0;
};

void print(const Expr::Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::number: {
      std::array<char, 32> buf{};
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
      out.append(buf.data(), ptr);
      return;
    }
    case NodeKind::variable:
      out += variable_name(n.var);
      return;
    case NodeKind::negate:
      out += "(-";
      print(*n.args[0], out);
      out += ')';
      return;
    case NodeKind::binary:
      out += '(';
      print(*n.args[0], out);
      out += binary_symbol(n.op);
      print(*n.args[1], out);
      out += ')';
      return;
    case NodeKind::compare:
      out += '(';
      print(*n.args[0], out);
      out += compare_symbol(n.cmp);
      print(*n.args[1], out);
      out += ')';
      return;
    case NodeKind::call:
      out += function_name(n.fn);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i > 0) out += ',';
        print(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

std::string describe(const Expr::Node& n) {
  std::string s;
  print(n, s);
  return s;
}

double eval_node(const Expr::Node& n, std::span<const double> x, const ExprBindings& b) {
  switch (n.kind) {
    case NodeKind::number:
      return n.value;
    case NodeKind::variable:
      switch (n.var) {
        case Variable::x: return x[0];
        case Variable::y: return x[1];
        case Variable::z: return x[2];
        case Variable::eps: return b.epsilon;
        case Variable::eps1: return b.scales[0];
        case Variable::eps2: return b.scales[1];
        case Variable::eps3: return b.scales[2];
        case Variable::eps4: return b.scales[3];
        case Variable::eps5: return b.scales[4];
        case Variable::pi: return std::numbers::pi;
      }
      return 0.0;
    case NodeKind::negate:
      return -eval_node(*n.args[0], x, b);
    case NodeKind::binary: {
      const double lhs = eval_node(*n.args[0], x, b);
      const double rhs = eval_node(*n.args[1], x, b);
      switch (n.op) {
        case BinaryOp::add: return lhs + rhs;
        case BinaryOp::sub: return lhs - rhs;
        case BinaryOp::mul: return lhs * rhs;
        case BinaryOp::div:
          if (rhs == 0.0) throw EvalError("division by zero in " + describe(n));
          return lhs / rhs;
        case BinaryOp::pow: {
          const double v = rhs == 2.0 ? lhs * lhs : std::pow(lhs, rhs);
          if (std::isnan(v)) throw EvalError("domain error in " + describe(n));
          return v;
        }
      }
      return 0.0;
    }
    case NodeKind::compare: {
      const double lhs = eval_node(*n.args[0], x, b);
      const double rhs = eval_node(*n.args[1], x, b);
      bool r = false;
      switch (n.cmp) {
        case CompareOp::lt: r = lhs < rhs; break;
        case CompareOp::le: r = lhs <= rhs; break;
        case CompareOp::gt: r = lhs > rhs; break;
        case CompareOp::ge: r = lhs >= rhs; break;
      }
      return r ? 1.0 : 0.0;
    }
    case NodeKind::call: {
      if (n.fn == Function::select) {
        return eval_node(*n.args[0], x, b) != 0.0 ? eval_node(*n.args[1], x, b) : eval_node(*n.args[2], x, b);
      }
      const double a0 = eval_node(*n.args[0], x, b);
      switch (n.fn) {
        case Function::sin: return std::sin(a0);
        case Function::cos: return std::cos(a0);
        case Function::exp: return std::exp(a0);
        case Function::sqrt:
          if (a0 < 0.0) throw EvalError("domain error: sqrt of negative value in " + describe(n));
          return std::sqrt(a0);
        case Function::abs: return std::abs(a0);
        case Function::floor: return std::floor(a0);
        case Function::mod: {
          const double m = eval_node(*n.args[1], x, b);
          if (m == 0.0) throw EvalError("division by zero in " + describe(n));
          return a0 - m * std::floor(a0 / m);
        }
        case Function::select: break;
      }
      return 0.0;
    }
  }
  return 0.0;
}

bool equal(const Expr::Node& a, const Expr::Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::number:
      if (a.value != b.value) return false;
      break;
    case NodeKind::variable:
      if (a.var != b.var) return false;
      break;
    case NodeKind::binary:
      if (a.op != b.op) return false;
      break;
    case NodeKind::compare:
      if (a.cmp != b.cmp) return false;
      break;
    case NodeKind::call:
      if (a.fn != b.fn) return false;
      break;
    case NodeKind::negate:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t offset)
    : ConfigError(message), offset_(offset) {}

double Expr::operator()(std::span<const double> point, const ExprBindings& bindings) const {
  return eval_node(*root_, point, bindings);
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

bool Expr::is_constant() const { return root_ && root_->kind == NodeKind::number; }

bool operator==(const Expr& lhs, const Expr& rhs) {
  if (!lhs.root_ || !rhs.root_) return lhs.root_ == rhs.root_;
  return equal(*lhs.root_, *rhs.root_);
}

Expr parse(std::string_view text, int dimension) {
  Parser parser(text, dimension);
  return Expr(parser.parse_all());
}

double eval_expr(const Expr& expr, std::span<const double> point, const ExprBindings& bindings) {
  return expr(point, bindings);
}

}  // namespace srbf
