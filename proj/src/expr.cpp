#include "nambu/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

#include "nambu/error.hpp"

namespace nambu {

ExprNode ExprNode::number(double value) {
  ExprNode n;
  n.kind = NodeKind::Literal;
  n.literal = value;
  return n;
}

ExprNode ExprNode::variable(std::string name, std::size_t index) {
  ExprNode n;
  n.kind = NodeKind::Variable;
  n.name = std::move(name);
  n.index = index;
  return n;
}

ExprNode ExprNode::time() { return variable(std::string(kTimeSymbol), kTimeIndex); }

ExprNode ExprNode::coefficient(std::string name) {
  ExprNode n;
  n.kind = NodeKind::Coefficient;
  n.name = std::move(name);
  return n;
}

ExprNode ExprNode::negate(ExprNode operand) {
  ExprNode n;
  n.kind = NodeKind::Unary;
  n.op = '-';
  n.children.push_back(std::move(operand));
  return n;
}

ExprNode ExprNode::binary(char op, ExprNode lhs, ExprNode rhs) {
  ExprNode n;
  n.kind = NodeKind::Binary;
  n.op = op;
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return n;
}

ExprNode ExprNode::call(Function f, ExprNode argument) {
  ExprNode n;
  n.kind = NodeKind::Call;
  n.function = f;
  n.name = std::string(function_name(f));
  n.children.push_back(std::move(argument));
  return n;
}

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 7> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"exp", Function::Exp},
    {"ln", Function::Ln},
    {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
    {"tanh", Function::Tanh},
}};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions)
    if (n == name) return f;
  return std::nullopt;
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coords, const CoefficientTable* table)
      : text_(text), coords_(coords), table_(table) {}

  ExprNode parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    ExprNode e = expr();
    skip_space();
    if (pos_ < text_.size())
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  ExprNode expr() {
    ExprNode lhs = term();
    for (;;) {
      skip_space();
      if (!at('+') && !at('-')) return lhs;
      char op = text_[pos_++];
      lhs = ExprNode::binary(op, std::move(lhs), term());
    }
  }

  ExprNode term() {
    ExprNode lhs = unary();
    for (;;) {
      skip_space();
      if (!at('*') && !at('/')) return lhs;
      char op = text_[pos_++];
      lhs = ExprNode::binary(op, std::move(lhs), unary());
    }
  }

  ExprNode unary() {
    skip_space();
    if (at('-')) {
      ++pos_;
      return ExprNode::negate(unary());
    }
    if (at('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  ExprNode power() {
    ExprNode base = primary();
    skip_space();
    if (!at('^')) return base;
    ++pos_;
    return ExprNode::binary('^', std::move(base), unary());
  }

  ExprNode primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprNode e = expr();
      expect(')');
      return e;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  ExprNode number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (at('.')) {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (at('e') || at('E')) {
      std::size_t save = pos_++;
      if (at('+') || at('-')) ++pos_;
      if (pos_ < text_.size() && is_digit(text_[pos_])) {
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double value = 0.0;
    auto [end, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || end != text_.data() + pos_) throw ParseError("malformed number", start);
    return ExprNode::number(value);
  }

  ExprNode identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    std::string name(text_.substr(start, pos_ - start));

    skip_space();
    if (at('(')) {
      auto f = lookup_function(name);
      if (!f) throw ParseError("unknown function '" + name + "'", start);
      ++pos_;
      std::vector<ExprNode> args;
      skip_space();
      if (!at(')')) {
        args.push_back(expr());
        skip_space();
        while (at(',')) {
          ++pos_;
          args.push_back(expr());
          skip_space();
        }
      }
      expect(')');
      if (args.size() != 1)
        throw ParseError("function '" + name + "' expects 1 argument, got " + std::to_string(args.size()),
                         start);
      return ExprNode::call(*f, std::move(args.front()));
    }
    if (lookup_function(name)) throw ParseError("function '" + name + "' used without arguments", start);

    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == name) return ExprNode::variable(name, i);
    if (name == kTimeSymbol) return ExprNode::time();
    if (table_ && table_->contains(name)) return ExprNode::coefficient(name);
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  void expect(char c) {
    skip_space();
    if (!at(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' before end", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r'))
      ++pos_;
  }

  std::string_view text_;
  std::span<const std::string> coords_;
  const CoefficientTable* table_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer; higher binds tighter.
int precedence(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Binary:
      switch (n.op) {
        case '+':
        case '-':
          return 1;
        case '*':
        case '/':
          return 2;
        default:
          return 4;
      }
    case NodeKind::Unary:
      return 3;
    default:
      return 5;
  }
}

std::string format_literal(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

void print(const ExprNode& n, std::string& out) {
  auto child = [&out](const ExprNode& c, bool parens) {
    if (parens) out += '(';
    print(c, out);
    if (parens) out += ')';
  };
  switch (n.kind) {
    case NodeKind::Literal:
      out += format_literal(n.literal);
      return;
    case NodeKind::Variable:
    case NodeKind::Coefficient:
      out += n.name;
      return;
    case NodeKind::Call:
      out += function_name(n.function);
      out += '(';
      print(n.children[0], out);
      out += ')';
      return;
    case NodeKind::Unary:
      out += '-';
      child(n.children[0], precedence(n.children[0]) < 3);
      return;
    case NodeKind::Binary: {
      const int p = precedence(n);
      const ExprNode& l = n.children[0];
      const ExprNode& r = n.children[1];
      if (n.op == '^') {
        child(l, precedence(l) <= 4);
        out += '^';
        child(r, precedence(r) < 3);
        return;
      }
      child(l, precedence(l) < p);
      out += ' ';
      out += n.op;
      out += ' ';
      // A unary right operand is printed bare: "a * -b" re-parses as a * (-b).
      child(r, precedence(r) <= p);
      return;
    }
  }
}

}  // namespace

std::string_view function_name(Function f) {
  for (const auto& [n, g] : kFunctions)
    if (g == f) return n;
  return "?";
}

void CoefficientTable::set(const std::string& name, double value) { entries_[name] = ExprNode::number(value); }

void CoefficientTable::set(const std::string& name, std::string_view expression) {
  entries_[name] = parse(expression, {}, nullptr);
}

void CoefficientTable::set(const std::string& name, ExprNode expression) {
  if (!is_coordinate_free(expression))
    throw InvalidArgument("coefficient '" + name + "' may depend on t only");
  entries_[name] = std::move(expression);
}

bool CoefficientTable::contains(std::string_view name) const { return entries_.find(name) != entries_.end(); }

const ExprNode& CoefficientTable::entry(std::string_view name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw DomainError("unresolved coefficient '" + std::string(name) + "'");
  return it->second;
}

double CoefficientTable::value(std::string_view name, double t) const {
  static const CoefficientTable empty;
  return evaluate<double>(entry(name), {}, t, empty);
}

bool CoefficientTable::depends_on_time(std::string_view name) const {
  static const CoefficientTable empty;
  return nambu::depends_on_time(entry(name), empty);
}

std::vector<std::string> CoefficientTable::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

ExprNode parse(std::string_view text, std::span<const std::string> coords, const CoefficientTable* coefficients) {
  return Parser(text, coords, coefficients).parse();
}

std::string pretty_print(const ExprNode& node) {
  std::string out;
  print(node, out);
  return out;
}

bool is_coordinate_free(const ExprNode& node) {
  if (node.kind == NodeKind::Variable) return node.is_time();
  for (const auto& c : node.children)
    if (!is_coordinate_free(c)) return false;
  return true;
}

bool depends_on_time(const ExprNode& node, const CoefficientTable& table) {
  if (node.kind == NodeKind::Variable) return node.is_time();
  if (node.kind == NodeKind::Coefficient) return table.contains(node.name) && table.depends_on_time(node.name);
  for (const auto& c : node.children)
    if (depends_on_time(c, table)) return true;
  return false;
}

namespace {

template <class C>
class Evaluator {
 public:
  Evaluator(std::span<const C> point, double t, const CoefficientTable& table)
      : point_(point), t_(t), table_(table) {}

  C operator()(const ExprNode& n) const {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using std::tanh;
    switch (n.kind) {
      case NodeKind::Literal:
        return C(n.literal);
      case NodeKind::Variable:
        if (n.is_time()) return C(t_);
        if (n.index >= point_.size())
          throw InvalidArgument("variable '" + n.name + "' outside a point of dimension " +
                                std::to_string(point_.size()));
        return point_[n.index];
      case NodeKind::Coefficient:
        return C(table_.value(n.name, t_));
      case NodeKind::Unary:
        return -(*this)(n.children[0]);
      case NodeKind::Call: {
        C x = (*this)(n.children[0]);
        double v = value_of(x);
        switch (n.function) {
          case Function::Sin:
            return sin(x);
          case Function::Cos:
            return cos(x);
          case Function::Exp:
            return exp(x);
          case Function::Ln:
            if (!(v > 0.0)) fail("ln of non-positive value", n);
            return log(x);
          case Function::Sqrt:
            if (v < 0.0) fail("sqrt of negative value", n);
            return sqrt(x);
          case Function::Abs:
            return abs(x);
          case Function::Tanh:
            return tanh(x);
        }
        break;
      }
      case NodeKind::Binary:
        return binary(n);
    }
    throw InvalidArgument("malformed expression node");
  }

 private:
  C binary(const ExprNode& n) const {
    const ExprNode& l = n.children[0];
    const ExprNode& r = n.children[1];
    if (n.op == '^') return power(n);
    C a = (*this)(l);
    C b = (*this)(r);
    switch (n.op) {
      case '+':
        return a + b;
      case '-':
        return a - b;
      case '*':
        return a * b;
      case '/':
        if (value_of(b) == 0.0) fail("division by zero", n);
        return a / b;
      default:
        throw InvalidArgument(std::string("unknown operator '") + n.op + "'");
    }
  }

  C power(const ExprNode& n) const {
    using std::exp;
    using std::log;
    const ExprNode& e = n.children[1];
    C base = (*this)(n.children[0]);
    const double b = value_of(base);
    if (is_coordinate_free(e)) {
      const double p = Evaluator<double>(std::span<const double>(), t_, table_)(e);
      if (std::isfinite(p) && p == std::nearbyint(p) && std::abs(p) <= 64.0) {
        const long k = static_cast<long>(std::abs(p));
        C acc(1.0);
        if (k > 0) {
          acc = base;
          for (long i = 1; i < k; ++i) acc = acc * base;
        }
        if (p < 0.0) {
          if (b == 0.0) fail("zero raised to a negative power", n);
          return C(1.0) / acc;
        }
        return acc;
      }
      if (!(b > 0.0)) fail("non-integer power of non-positive base", n);
      return exp(p * log(base));
    }
    if (!(b > 0.0)) fail("variable power of non-positive base", n);
    return exp((*this)(e) * log(base));
  }

  [[noreturn]] static void fail(const std::string& what, const ExprNode& n) {
    throw DomainError(what + " in '" + pretty_print(n) + "'");
  }

  std::span<const C> point_;
  double t_;
  const CoefficientTable& table_;
};

}  // namespace

template <class C>
C evaluate(const ExprNode& node, std::span<const C> point, double t, const CoefficientTable& table) {
  return Evaluator<C>(point, t, table)(node);
}

template double evaluate<double>(const ExprNode&, std::span<const double>, double, const CoefficientTable&);
template Jet1 evaluate<Jet1>(const ExprNode&, std::span<const Jet1>, double, const CoefficientTable&);
template Jet2 evaluate<Jet2>(const ExprNode&, std::span<const Jet2>, double, const CoefficientTable&);

}  // namespace nambu
