#include "nambu/diff.hpp"

#include <algorithm>
#include <cmath>

namespace nambu {

std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x, double t, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  std::vector<double> g(x.size());
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    p[i] = x[i] + step;
    const double up = f(std::span<const double>(p), t);
    p[i] = x[i] - step;
    const double down = f(std::span<const double>(p), t);
    p[i] = x[i];
    // (x + step) - (x - step) may differ from 2 * step in floating point.
    g[i] = (up - down) / ((x[i] + step) - (x[i] - step));
  }
  return g;
}

double jacobian_minor(std::span<const ScalarField> fields, std::span<const double> x, double t, std::size_t omit) {
  if (omit >= x.size()) throw InvalidArgument("omitted column out of range");
  if (fields.size() + 1 != x.size())
    throw InvalidArgument("jacobian_minor needs n-1 fields in dimension n");
  return determinant(jacobian<double>(fields, x, t).without_column(omit));
}

JacobianMatrix jacobian(const VectorField& field, std::span<const double> x, double t) {
  auto seeded = seed<double>(x);
  std::vector<Jet1> v = field(std::span<const Jet1>(seeded), t);
  JacobianMatrix m(v.size(), x.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < x.size() && c < v[r].size(); ++c) m(r, c) = v[r].d[c];
  return m;
}

std::vector<double> lie_bracket(const VectorField& x_field, const VectorField& y_field, std::span<const double> x,
                                double t) {
  if (x_field.output_dimension() != x.size() || y_field.output_dimension() != x.size())
    throw InvalidArgument("Lie bracket needs fields tangent to the same space");
  const auto xv = x_field(x, t);
  const auto yv = y_field(x, t);
  const auto dx = jacobian(x_field, x, t);
  const auto dy = jacobian(y_field, x, t);
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += dy(i, j) * xv[j] - dx(i, j) * yv[j];
    out[i] = s;
  }
  return out;
}

namespace detail {

double separate_sin(double x) { return std::sin(x); }
double separate_cos(double x) { return std::cos(x); }

}  // namespace detail

}  // namespace nambu
