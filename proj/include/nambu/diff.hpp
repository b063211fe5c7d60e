#pragma once

// Spatial derivatives of fields by forward-mode jets, plus the
// central-difference oracle used to check them. Time is a passive
// parameter and is never differentiated.

#include <cstddef>
#include <span>
#include <vector>

#include "nambu/field.hpp"
#include "nambu/jet.hpp"
#include "nambu/matrix.hpp"

namespace nambu {

using JacobianMatrix = Matrix<double>;

/// Seeds x as coordinate jets over x.size() partials.
template <class C>
std::vector<Jet<C>> seed(std::span<const C> x) {
  if (x.size() > kMaxVariables) throw InvalidArgument("dimension exceeds the jet capacity");
  std::vector<Jet<C>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(Jet<C>::variable(x[i], i, x.size()));
  return out;
}

/// Partials of a jet as a vector of length n.
template <class C>
std::vector<C> partials(const Jet<C>& j, std::size_t n) {
  std::vector<C> out(n, C(0.0));
  for (std::size_t i = 0; i < n && i < j.size(); ++i) out[i] = j.d[i];
  return out;
}

/// Gradient of f at x. C = double gives plain values; C = Jet1 gives the
/// gradient as jets (so its own derivatives are available).
template <class C>
std::vector<C> gradient(const ScalarField& f, std::span<const C> x, double t) {
  auto seeded = seed<C>(x);
  Jet<C> v = f(std::span<const Jet<C>>(seeded), t);
  return partials(v, x.size());
}

/// Central differences (f(x + h_i e_i) - f(x - h_i e_i)) / (2 h_i) with
/// h_i = h * max(1, |x_i|).
std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x, double t, double h = 1e-5);

/// Rows are the gradients of `fields`.
template <class C>
Matrix<C> jacobian(std::span<const ScalarField> fields, std::span<const C> x, double t) {
  Matrix<C> m(fields.size(), x.size());
  auto seeded = seed<C>(x);
  for (std::size_t r = 0; r < fields.size(); ++r) {
    Jet<C> v = fields[r](std::span<const Jet<C>>(seeded), t);
    for (std::size_t c = 0; c < x.size() && c < v.size(); ++c) m(r, c) = v.d[c];
  }
  return m;
}

/// det of the (n-1)x(n-1) gradient matrix of `fields` with column `omit`
/// (zero-based) removed.
double jacobian_minor(std::span<const ScalarField> fields, std::span<const double> x, double t, std::size_t omit);

/// Coordinate Jacobian of a vector field, rows indexed by components.
JacobianMatrix jacobian(const VectorField& field, std::span<const double> x, double t);

/// [X, Y] = (DY) X - (DX) Y.
std::vector<double> lie_bracket(const VectorField& x_field, const VectorField& y_field, std::span<const double> x,
                                double t);

}  // namespace nambu
