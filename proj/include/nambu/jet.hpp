#pragma once

// First-order forward-mode jets.
//
// A Jet<T> carries a value and the partial derivatives of that value with
// respect to up to kMaxVariables seeded coordinates. The value type T may
// itself be a jet, which is how second derivatives are obtained when an
// operation needs the derivative of something that is already a gradient
// (the divergence of a Hamiltonian vector field, the Jacobian of a bracket).

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <type_traits>

namespace nambu {

inline constexpr std::size_t kMaxVariables = 8;

template <class T>
struct Jet {
  T value{};
  std::array<T, kMaxVariables> d{};
  // Partials at index >= count are zero.
  std::uint8_t count = 0;

  Jet() = default;
  Jet(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  explicit Jet(const T& v)
    requires(!std::is_same_v<T, double>)
      : value(v) {}

  /// The coordinate function x^index seeded over `variables` partials.
  static Jet variable(const T& v, std::size_t index, std::size_t variables) {
    Jet j(v);
    j.count = static_cast<std::uint8_t>(variables);
    j.d[index] = T(1.0);
    return j;
  }

  std::size_t size() const { return count; }

  Jet& operator+=(const Jet& o) {
    value += o.value;
    widen(o.count);
    for (std::size_t i = 0; i < o.count; ++i) d[i] += o.d[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    value -= o.value;
    widen(o.count);
    for (std::size_t i = 0; i < o.count; ++i) d[i] -= o.d[i];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator-(const Jet& a) {
    Jet r;
    r.value = -a.value;
    r.count = a.count;
    for (std::size_t i = 0; i < a.count; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.value = a.value * b.value;
    r.count = a.count > b.count ? a.count : b.count;
    for (std::size_t i = 0; i < r.count; ++i) r.d[i] = a.d[i] * b.value + a.value * b.d[i];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r;
    r.value = a.value / b.value;
    r.count = a.count > b.count ? a.count : b.count;
    for (std::size_t i = 0; i < r.count; ++i) r.d[i] = (a.d[i] - r.value * b.d[i]) / b.value;
    return r;
  }

  friend Jet operator+(Jet a, double b) { a.value += b; return a; }
  friend Jet operator+(double a, Jet b) { b.value += a; return b; }
  friend Jet operator-(Jet a, double b) { a.value -= b; return a; }
  friend Jet operator-(double a, const Jet& b) { return Jet(a) - b; }
  friend Jet operator*(Jet a, double b) {
    a.value *= b;
    for (std::size_t i = 0; i < a.count; ++i) a.d[i] *= b;
    return a;
  }
  friend Jet operator*(double a, const Jet& b) { return Jet(a) * b; }
  friend Jet operator/(Jet a, double b) {
    a.value /= b;
    for (std::size_t i = 0; i < a.count; ++i) a.d[i] /= b;
    return a;
  }
  friend Jet operator/(double a, const Jet& b) { return Jet(a) / b; }

 private:
  void widen(std::uint8_t c) {
    if (c > count) count = c;
  }
};

using Jet1 = Jet<double>;
using Jet2 = Jet<Jet<double>>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Jet<T>& x) {
  return value_of(x.value);
}

namespace detail {
// f(x) given f(x.value) and f'(x.value).
template <class T>
Jet<T> chain(const Jet<T>& x, const T& f, const T& df) {
  Jet<T> r;
  r.value = f;
  r.count = x.count;
  for (std::size_t i = 0; i < x.count; ++i) r.d[i] = df * x.d[i];
  return r;
}

// Defined out of line so a sin and a cos of the same argument are never
// merged into one sincos call; values then match plain evaluation bit for bit.
double separate_sin(double x);
double separate_cos(double x);
template <class T>
T separate_sin(const T& x) {
  return sin(x);
}
template <class T>
T separate_cos(const T& x) {
  return cos(x);
}
}  // namespace detail

template <class T>
Jet<T> sin(const Jet<T>& x) {
  using std::sin;
  return detail::chain(x, T(sin(x.value)), T(detail::separate_cos(x.value)));
}

template <class T>
Jet<T> cos(const Jet<T>& x) {
  using std::cos;
  return detail::chain(x, T(cos(x.value)), T(-detail::separate_sin(x.value)));
}

template <class T>
Jet<T> exp(const Jet<T>& x) {
  using std::exp;
  T e = exp(x.value);
  return detail::chain(x, e, e);
}

template <class T>
Jet<T> log(const Jet<T>& x) {
  using std::log;
  return detail::chain(x, T(log(x.value)), T(1.0 / x.value));
}

template <class T>
Jet<T> sqrt(const Jet<T>& x) {
  using std::sqrt;
  T s = sqrt(x.value);
  return detail::chain(x, s, T(0.5 / s));
}

template <class T>
Jet<T> tanh(const Jet<T>& x) {
  using std::tanh;
  T th = tanh(x.value);
  return detail::chain(x, th, T(1.0 - th * th));
}

template <class T>
Jet<T> abs(const Jet<T>& x) {
  double v = value_of(x);
  if (v > 0) return x;
  if (v < 0) return -x;
  return Jet<T>(T(0.0));
}

}  // namespace nambu
