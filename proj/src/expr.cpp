#include "ilssvm/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include "ilssvm/error.hpp"

namespace ilssvm::expr {

namespace {

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError(0, "empty expression");
    const int root = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return Expr(std::move(nodes_), root);
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int push(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int binary(NodeKind k, int lhs, int rhs) {
    Node n;
    n.kind = k;
    n.lhs = lhs;
    n.rhs = rhs;
    return push(n);
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = binary(NodeKind::add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = binary(NodeKind::sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(NodeKind::mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(NodeKind::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (accept('-')) {
      Node n;
      n.kind = NodeKind::negate;
      n.lhs = parse_unary();
      return push(n);
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (accept('^')) return binary(NodeKind::pow, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_space();
    if (pos_ == text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  int parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        pos_ = p;
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    Node n;
    n.kind = NodeKind::number;
    n.value = v;
    return push(n);
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static constexpr std::pair<std::string_view, Function> kFunctions[] = {
          {"sin", Function::sin}, {"cos", Function::cos},   {"exp", Function::exp},
          {"abs", Function::abs}, {"sqrt", Function::sqrt},
      };
      const auto it = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                   [&](const auto& f) { return f.first == name; });
      if (it == std::end(kFunctions)) {
        pos_ = start;
        fail("unknown function '" + std::string(name) + "'");
      }
      ++pos_;
      Node n;
      n.kind = NodeKind::call;
      n.function = it->second;
      n.lhs = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return push(n);
    }

    if (name == "pi") {
      Node n;
      n.kind = NodeKind::pi;
      n.value = std::numbers::pi;
      return push(n);
    }
    if (name.size() >= 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec != std::errc()) {
        pos_ = start;
        fail("variable index out of range");
      }
      Node n;
      n.kind = NodeKind::variable;
      n.variable = index;
      return push(n);
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

double check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
  return v;
}

double eval_node(const Expr& e, int i, std::span<const double> x) {
  const Node& n = e.node(i);
  switch (n.kind) {
    case NodeKind::number:
    case NodeKind::pi:
      return n.value;
    case NodeKind::variable:
      if (static_cast<std::size_t>(n.variable) > x.size())
        throw EvalError("missing variable x" + std::to_string(n.variable));
      return x[static_cast<std::size_t>(n.variable) - 1];
    case NodeKind::negate:
      return -eval_node(e, n.lhs, x);
    case NodeKind::add:
      return check_finite(eval_node(e, n.lhs, x) + eval_node(e, n.rhs, x), "addition");
    case NodeKind::sub:
      return check_finite(eval_node(e, n.lhs, x) - eval_node(e, n.rhs, x), "subtraction");
    case NodeKind::mul:
      return check_finite(eval_node(e, n.lhs, x) * eval_node(e, n.rhs, x), "multiplication");
    case NodeKind::div: {
      const double num = eval_node(e, n.lhs, x);
      const double den = eval_node(e, n.rhs, x);
      if (den == 0.0) throw EvalError("division by zero");
      return check_finite(num / den, "division");
    }
    case NodeKind::pow: {
      const double base = eval_node(e, n.lhs, x);
      const double exponent = eval_node(e, n.rhs, x);
      if (base < 0.0 && std::trunc(exponent) != exponent)
        throw EvalError("negative base with non-integer exponent");
      if (base == 0.0 && exponent < 0.0) throw EvalError("division by zero in power");
      return check_finite(std::pow(base, exponent), "power");
    }
    case NodeKind::call: {
      const double a = eval_node(e, n.lhs, x);
      switch (n.function) {
        case Function::sin: return std::sin(a);
        case Function::cos: return std::cos(a);
        case Function::exp: return check_finite(std::exp(a), "exp");
        case Function::abs: return std::abs(a);
        case Function::sqrt:
          if (a < 0.0) throw EvalError("sqrt of negative value");
          return std::sqrt(a);
      }
    }
  }
  throw EvalError("corrupt expression node");
}

void collect_vars(const Expr& e, int i, std::set<int>& out) {
  const Node& n = e.node(i);
  if (n.kind == NodeKind::variable) out.insert(n.variable);
  if (n.lhs >= 0) collect_vars(e, n.lhs, out);
  if (n.rhs >= 0) collect_vars(e, n.rhs, out);
}

bool equal_nodes(const Expr& a, int i, const Expr& b, int j) {
  const Node& x = a.node(i);
  const Node& y = b.node(j);
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::number: return x.value == y.value;
    case NodeKind::pi: return true;
    case NodeKind::variable: return x.variable == y.variable;
    case NodeKind::negate: return equal_nodes(a, x.lhs, b, y.lhs);
    case NodeKind::call: return x.function == y.function && equal_nodes(a, x.lhs, b, y.lhs);
    default: return equal_nodes(a, x.lhs, b, y.lhs) && equal_nodes(a, x.rhs, b, y.rhs);
  }
}

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool is_atomic(NodeKind k) {
  return k == NodeKind::number || k == NodeKind::pi || k == NodeKind::variable || k == NodeKind::call;
}

void print_node(const Expr& e, int i, std::string& out);

void print_operand(const Expr& e, int i, std::string& out) {
  if (is_atomic(e.node(i).kind)) {
    print_node(e, i, out);
  } else {
    out += '(';
    print_node(e, i, out);
    out += ')';
  }
}

void print_node(const Expr& e, int i, std::string& out) {
  const Node& n = e.node(i);
  switch (n.kind) {
    case NodeKind::number: out += format_number(n.value); return;
    case NodeKind::pi: out += "pi"; return;
    case NodeKind::variable: out += "x" + std::to_string(n.variable); return;
    case NodeKind::negate:
      out += '-';
      print_operand(e, n.lhs, out);
      return;
    case NodeKind::call:
      out += function_name(n.function);
      out += '(';
      print_node(e, n.lhs, out);
      out += ')';
      return;
    default: break;
  }
  static constexpr const char* kSymbols = "+-*/^";
  const char sym = kSymbols[static_cast<int>(n.kind) - static_cast<int>(NodeKind::add)];
  print_operand(e, n.lhs, out);
  out += sym;
  print_operand(e, n.rhs, out);
}

}  // namespace

Expr::Expr(std::vector<Node> nodes, int root) : nodes_(std::move(nodes)), root_(root) {
  for (const Node& n : nodes_) {
    if (n.kind == NodeKind::variable) max_variable_ = std::max(max_variable_, n.variable);
  }
}

double Expr::operator()(std::span<const double> x) const {
  if (empty()) throw EvalError("empty expression");
  return eval_node(*this, root_, x);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return equal_nodes(a, a.root_, b, b.root_);
}

Expr parse_expr(std::string_view text) { return Parser(text).run(); }

double eval_expr(const Expr& e, const std::map<std::string, double>& assignment) {
  std::vector<double> x(static_cast<std::size_t>(e.max_variable()), 0.0);
  for (const std::string& name : free_vars(e)) {
    const auto it = assignment.find(name);
    if (it == assignment.end()) throw EvalError("missing variable " + name);
    x[static_cast<std::size_t>(std::stoi(name.substr(1))) - 1] = it->second;
  }
  return e(x);
}

std::vector<std::string> free_vars(const Expr& e) {
  std::set<int> vars;
  if (!e.empty()) collect_vars(e, e.root(), vars);
  std::vector<std::string> names;
  names.reserve(vars.size());
  for (int v : vars) names.push_back("x" + std::to_string(v));
  return names;
}

std::string to_string(const Expr& e) {
  std::string out;
  if (!e.empty()) print_node(e, e.root(), out);
  return out;
}

const char* function_name(Function f) {
  switch (f) {
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::exp: return "exp";
    case Function::abs: return "abs";
    case Function::sqrt: return "sqrt";
  }
  return "?";
}

}  // namespace ilssvm::expr
