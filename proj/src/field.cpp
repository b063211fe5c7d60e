#include "nambu/field.hpp"

namespace nambu {

namespace {

class ExprField final : public detail::FieldImpl {
 public:
  ExprField(ExprNode e, std::shared_ptr<const CoefficientTable> table)
      : expr_(std::move(e)), table_(std::move(table)) {
    if (!table_) table_ = std::make_shared<const CoefficientTable>();
    time_dependent_ = nambu::depends_on_time(expr_, *table_);
  }

  double eval(std::span<const double> x, double t) const override { return evaluate(expr_, x, t, *table_); }
  Jet1 eval(std::span<const Jet1> x, double t) const override { return evaluate(expr_, x, t, *table_); }
  Jet2 eval(std::span<const Jet2> x, double t) const override { return evaluate(expr_, x, t, *table_); }
  bool time_dependent() const override { return time_dependent_; }
  const ExprNode* expression() const override { return &expr_; }

 private:
  ExprNode expr_;
  std::shared_ptr<const CoefficientTable> table_;
  bool time_dependent_ = false;
};

enum class Combine { Sum, Product };

class CombinedField final : public detail::FieldImpl {
 public:
  CombinedField(Combine how, ScalarField a, ScalarField b) : how_(how), a_(std::move(a)), b_(std::move(b)) {}

  double eval(std::span<const double> x, double t) const override { return apply(x, t); }
  Jet1 eval(std::span<const Jet1> x, double t) const override { return apply(x, t); }
  Jet2 eval(std::span<const Jet2> x, double t) const override { return apply(x, t); }
  bool time_dependent() const override { return a_.depends_on_time() || b_.depends_on_time(); }

 private:
  template <class C>
  C apply(std::span<const C> x, double t) const {
    C u = a_(x, t);
    C v = b_(x, t);
    return how_ == Combine::Sum ? C(u + v) : C(u * v);
  }

  Combine how_;
  ScalarField a_;
  ScalarField b_;
};

void require_same_dimension(const ScalarField& a, const ScalarField& b) {
  if (a.dimension() != b.dimension())
    throw InvalidArgument("combining fields of dimension " + std::to_string(a.dimension()) + " and " +
                          std::to_string(b.dimension()));
}

}  // namespace

ScalarField::ScalarField(ExprNode expression, std::shared_ptr<const CoefficientTable> table, std::size_t dimension,
                         std::string label)
    : impl_(std::make_shared<ExprField>(std::move(expression), std::move(table))),
      dimension_(dimension),
      label_(std::move(label)) {}

ScalarField ScalarField::parse(std::string_view text, std::span<const std::string> coords,
                               std::shared_ptr<const CoefficientTable> table, std::string label) {
  ExprNode e = nambu::parse(text, coords, table.get());
  if (label.empty()) label = std::string(text);
  return ScalarField(std::move(e), std::move(table), coords.size(), std::move(label));
}

ScalarField ScalarField::constant(double value, std::size_t dimension) {
  return ScalarField(ExprNode::number(value), nullptr, dimension, pretty_print(ExprNode::number(value)));
}

ScalarField ScalarField::coordinate(std::size_t index, std::size_t dimension) {
  if (index >= dimension) throw InvalidArgument("coordinate index out of range");
  std::string name = "x" + std::to_string(index + 1);
  return ScalarField(ExprNode::variable(name, index), nullptr, dimension, name);
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_dimension(a, b);
  ScalarField s;
  s.impl_ = std::make_shared<CombinedField>(Combine::Sum, a, b);
  s.dimension_ = a.dimension();
  s.label_ = "(" + a.label() + ") + (" + b.label() + ")";
  return s;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_dimension(a, b);
  ScalarField s;
  s.impl_ = std::make_shared<CombinedField>(Combine::Product, a, b);
  s.dimension_ = a.dimension();
  s.label_ = "(" + a.label() + ") * (" + b.label() + ")";
  return s;
}

ScalarField operator*(double a, const ScalarField& b) { return ScalarField::constant(a, b.dimension()) * b; }

VectorField::VectorField(std::size_t input_dimension, std::size_t output_dimension, std::string label, RealEval real,
                         JetEval jet)
    : input_dimension_(input_dimension),
      output_dimension_(output_dimension),
      label_(std::move(label)),
      real_(std::move(real)),
      jet_(std::move(jet)) {}

VectorField VectorField::from_components(std::vector<ScalarField> components, std::string label) {
  if (components.empty()) throw InvalidArgument("vector field needs at least one component");
  const std::size_t n = components.front().dimension();
  for (const auto& c : components)
    if (c.dimension() != n) throw InvalidArgument("vector field components differ in dimension");
  auto f = [components](auto x, double t) {
    using C = typename decltype(x)::value_type;
    return evaluate_all<C>(components, x, t);
  };
  return make<1>(n, components.size(), std::move(label), f);
}

std::vector<double> VectorField::operator()(std::span<const double> x, double t) const {
  if (!real_) throw InvalidArgument("evaluation of an empty vector field");
  if (x.size() != input_dimension_)
    throw InvalidArgument("vector field '" + label_ + "' expects " + std::to_string(input_dimension_) +
                          " coordinates, got " + std::to_string(x.size()));
  return real_(x, t);
}

std::vector<Jet1> VectorField::operator()(std::span<const Jet1> x, double t) const {
  if (!jet_) throw InvalidArgument("vector field '" + label_ + "' is not differentiable");
  if (x.size() != input_dimension_)
    throw InvalidArgument("vector field '" + label_ + "' expects " + std::to_string(input_dimension_) +
                          " coordinates, got " + std::to_string(x.size()));
  return jet_(x, t);
}

}  // namespace nambu
