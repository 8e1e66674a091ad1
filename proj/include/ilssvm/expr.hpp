#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ilssvm::expr {

enum class NodeKind : std::uint8_t { number, pi, variable, negate, add, sub, mul, div, pow, call };

enum class Function : std::uint8_t { sin, cos, exp, abs, sqrt };

struct Node {
  NodeKind kind = NodeKind::number;
  double value = 0.0;       // number
  int variable = 0;         // 1-based index of x<k>
  Function function = Function::sin;
  int lhs = -1;             // operand of negate/call, left operand of binary ops
  int rhs = -1;
};

// Immutable parsed expression. Nodes live in a flat arena with children
// stored before their parents, so copies are cheap value copies.
class Expr {
public:
  Expr() = default;
  Expr(std::vector<Node> nodes, int root);

  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  int root() const { return root_; }
  bool empty() const { return nodes_.empty(); }

  // Largest variable index referenced, 0 when the expression is closed.
  int max_variable() const { return max_variable_; }

  // Evaluate with x[k-1] bound to x<k>.
  double operator()(std::span<const double> x) const;

  // Structural equality (literal values compared exactly).
  friend bool operator==(const Expr& a, const Expr& b);

private:
  std::vector<Node> nodes_;
  int root_ = -1;
  int max_variable_ = 0;
};

// Grammar, loosest binding first:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          (right associative)
//   primary := number | 'pi' | x<k> | fn '(' sum ')' | '(' sum ')'
// with fn one of sin, cos, exp, abs, sqrt. Throws ParseError.
Expr parse_expr(std::string_view text);

// Throws EvalError on a missing variable, division by zero, domain errors and
// non-finite intermediate results.
double eval_expr(const Expr& e, const std::map<std::string, double>& assignment);

// Free variable names sorted by index, e.g. {"x1", "x3"}.
std::vector<std::string> free_vars(const Expr& e);

// Canonical text; parse_expr(to_string(e)) == e.
std::string to_string(const Expr& e);

const char* function_name(Function f);

}  // namespace ilssvm::expr
