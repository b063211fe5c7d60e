#pragma once

// Scalar and vector fields over R^n, evaluable on every numeric carrier
// the derivative engine uses (double, Jet1, Jet2).

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "nambu/error.hpp"
#include "nambu/expr.hpp"
#include "nambu/jet.hpp"

namespace nambu {

namespace detail {

class FieldImpl {
 public:
  virtual ~FieldImpl() = default;
  virtual double eval(std::span<const double> x, double t) const = 0;
  virtual Jet1 eval(std::span<const Jet1> x, double t) const = 0;
  virtual Jet2 eval(std::span<const Jet2> x, double t) const = 0;
  virtual bool time_dependent() const = 0;
  virtual const ExprNode* expression() const { return nullptr; }
};

// Wraps a generic callable `f(std::span<const C>, double) -> C`. Carriers
// beyond `Order` (0: double, 1: Jet1, 2: Jet2) are rejected at run time so
// that f is never instantiated for them.
template <int Order, class F>
class NativeField final : public FieldImpl {
 public:
  NativeField(F f, bool time_dependent) : f_(std::move(f)), time_dependent_(time_dependent) {}

  double eval(std::span<const double> x, double t) const override { return f_(x, t); }
  Jet1 eval(std::span<const Jet1> x, double t) const override {
    if constexpr (Order >= 1) return f_(x, t);
    else throw InvalidArgument("field is not differentiable");
  }
  Jet2 eval(std::span<const Jet2> x, double t) const override {
    if constexpr (Order >= 2) return f_(x, t);
    else throw InvalidArgument("field is not twice differentiable");
  }
  bool time_dependent() const override { return time_dependent_; }

 private:
  F f_;
  bool time_dependent_;
};

}  // namespace detail

/// A real-valued function of (point, time). Cheap to copy; immutable.
class ScalarField {
 public:
  ScalarField() = default;

  /// Expression-backed field over `dimension` coordinates.
  ScalarField(ExprNode expression, std::shared_ptr<const CoefficientTable> table, std::size_t dimension,
              std::string label = {});

  /// Parses `text` over `coords`; coefficients resolve against `table`.
  static ScalarField parse(std::string_view text, std::span<const std::string> coords,
                           std::shared_ptr<const CoefficientTable> table, std::string label = {});

  static ScalarField constant(double value, std::size_t dimension);
  static ScalarField coordinate(std::size_t index, std::size_t dimension);

  /// Field from a generic callable; `Order` is the highest carrier it supports.
  template <int Order, class F>
  static ScalarField native(std::size_t dimension, std::string label, F f, bool time_dependent = false) {
    ScalarField s;
    s.impl_ = std::make_shared<detail::NativeField<Order, F>>(std::move(f), time_dependent);
    s.dimension_ = dimension;
    s.label_ = std::move(label);
    return s;
  }

  double operator()(std::span<const double> x, double t) const { return checked(x.size()).eval(x, t); }
  Jet1 operator()(std::span<const Jet1> x, double t) const { return checked(x.size()).eval(x, t); }
  Jet2 operator()(std::span<const Jet2> x, double t) const { return checked(x.size()).eval(x, t); }

  std::size_t dimension() const { return dimension_; }
  const std::string& label() const { return label_; }
  bool valid() const { return impl_ != nullptr; }
  bool depends_on_time() const { return impl_->time_dependent(); }
  /// Underlying expression, or nullptr for native fields.
  const ExprNode* expression() const { return impl_ ? impl_->expression() : nullptr; }

  ScalarField with_label(std::string label) const {
    ScalarField s = *this;
    s.label_ = std::move(label);
    return s;
  }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(double a, const ScalarField& b);

 private:
  const detail::FieldImpl& checked(std::size_t n) const {
    if (!impl_) throw InvalidArgument("evaluation of an empty field");
    if (n != dimension_)
      throw InvalidArgument("field '" + label_ + "' expects " + std::to_string(dimension_) +
                            " coordinates, got " + std::to_string(n));
    return *impl_;
  }

  std::shared_ptr<const detail::FieldImpl> impl_;
  std::size_t dimension_ = 0;
  std::string label_;
};

/// A vector-valued field (point, time) -> R^m. The derivative engine
/// differentiates through the Jet1 evaluator when one is present.
class VectorField {
 public:
  using RealEval = std::function<std::vector<double>(std::span<const double>, double)>;
  using JetEval = std::function<std::vector<Jet1>(std::span<const Jet1>, double)>;

  VectorField() = default;
  VectorField(std::size_t input_dimension, std::size_t output_dimension, std::string label, RealEval real,
              JetEval jet = {});

  /// Wraps a generic callable returning std::vector<C>. Order 1 also
  /// instantiates the Jet1 evaluator.
  template <int Order, class F>
  static VectorField make(std::size_t input_dimension, std::size_t output_dimension, std::string label, F f) {
    RealEval real = [f](std::span<const double> x, double t) { return f(x, t); };
    JetEval jet;
    if constexpr (Order >= 1) jet = [f](std::span<const Jet1> x, double t) { return f(x, t); };
    return VectorField(input_dimension, output_dimension, std::move(label), std::move(real), std::move(jet));
  }

  /// Field whose components are the given scalar fields.
  static VectorField from_components(std::vector<ScalarField> components, std::string label);

  std::vector<double> operator()(std::span<const double> x, double t) const;
  std::vector<Jet1> operator()(std::span<const Jet1> x, double t) const;

  std::size_t input_dimension() const { return input_dimension_; }
  std::size_t output_dimension() const { return output_dimension_; }
  const std::string& label() const { return label_; }
  bool differentiable() const { return static_cast<bool>(jet_); }

 private:
  std::size_t input_dimension_ = 0;
  std::size_t output_dimension_ = 0;
  std::string label_;
  RealEval real_;
  JetEval jet_;
};

/// Evaluates every field at the same point.
template <class C>
std::vector<C> evaluate_all(std::span<const ScalarField> fields, std::span<const C> x, double t) {
  std::vector<C> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(f(x, t));
  return out;
}

}  // namespace nambu
