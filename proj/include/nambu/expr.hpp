#pragma once

// Field-definition expression language.
//
// Grammar (whitespace ignored):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | identifier | function '(' expr ')' | '(' expr ')'
//
// so '^' binds tighter than unary minus and is right-associative:
// -a^2 is -(a^2) and a^b^c is a^(b^c). Identifiers are coordinates, the
// reserved time symbol `t`, or coefficient names. Functions are
// sin, cos, exp, ln, sqrt, abs, tanh.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nambu/jet.hpp"

namespace nambu {

enum class NodeKind { Literal, Variable, Coefficient, Unary, Binary, Call };

enum class Function { Sin, Cos, Exp, Ln, Sqrt, Abs, Tanh };

inline constexpr std::size_t kTimeIndex = static_cast<std::size_t>(-1);
inline constexpr std::string_view kTimeSymbol = "t";

struct ExprNode {
  NodeKind kind = NodeKind::Literal;
  double literal = 0.0;
  std::string name;
  // Coordinate slot of a Variable node, kTimeIndex for t.
  std::size_t index = 0;
  // Operator character for Unary ('-') and Binary ('+', '-', '*', '/', '^').
  char op = 0;
  Function function = Function::Sin;
  std::vector<ExprNode> children;

  bool operator==(const ExprNode&) const = default;

  static ExprNode number(double value);
  static ExprNode variable(std::string name, std::size_t index);
  static ExprNode time();
  static ExprNode coefficient(std::string name);
  static ExprNode negate(ExprNode operand);
  static ExprNode binary(char op, ExprNode lhs, ExprNode rhs);
  static ExprNode call(Function f, ExprNode argument);

  bool is_time() const { return kind == NodeKind::Variable && index == kTimeIndex; }
};

std::string_view function_name(Function f);

/// Named time-dependent coefficients (b1(t), a0(t), c0, lambda, ...).
/// Entries are expressions in `t` only.
class CoefficientTable {
 public:
  void set(const std::string& name, double value);
  void set(const std::string& name, std::string_view expression);
  void set(const std::string& name, ExprNode expression);

  bool contains(std::string_view name) const;
  double value(std::string_view name, double t) const;
  const ExprNode& entry(std::string_view name) const;
  bool depends_on_time(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ExprNode, std::less<>> entries_;
};

/// Parses `text` over the coordinate names `coords`. Identifiers that are
/// not coordinates or `t` must name an entry of `coefficients`.
ExprNode parse(std::string_view text, std::span<const std::string> coords,
               const CoefficientTable* coefficients = nullptr);

/// Canonical text: single spaces around + - * /, none around ^, minimal
/// parentheses. parse(pretty_print(e)) == e.
std::string pretty_print(const ExprNode& node);

/// True when the subtree references no coordinate (t and coefficients are
/// allowed); such a subtree has zero spatial derivative.
bool is_coordinate_free(const ExprNode& node);

/// True when the subtree references t, directly or through a coefficient.
bool depends_on_time(const ExprNode& node, const CoefficientTable& table);

/// Evaluates the expression at `point`. C is double, Jet1 or Jet2.
/// Throws DomainError naming the offending subexpression.
template <class C>
C evaluate(const ExprNode& node, std::span<const C> point, double t, const CoefficientTable& table);

extern template double evaluate<double>(const ExprNode&, std::span<const double>, double,
                                        const CoefficientTable&);
extern template Jet1 evaluate<Jet1>(const ExprNode&, std::span<const Jet1>, double,
                                    const CoefficientTable&);
extern template Jet2 evaluate<Jet2>(const ExprNode&, std::span<const Jet2>, double,
                                    const CoefficientTable&);

}  // namespace nambu
