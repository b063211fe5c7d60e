#include "nambu/random.hpp"

#include <charconv>

#include "nambu/error.hpp"

namespace nambu {

std::vector<double> Rng::point(std::size_t n, double lo, double hi) {
  std::vector<double> p(n);
  for (double& v : p) v = uniform(lo, hi);
  return p;
}

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string random_polynomial_text(Rng& rng, std::span<const std::string> coords, std::size_t terms,
                                   std::size_t max_degree, double coefficient_range) {
  if (coords.empty()) throw InvalidArgument("random polynomial needs at least one coordinate");
  std::string text;
  for (std::size_t k = 0; k < terms; ++k) {
    const double c = rng.uniform(-coefficient_range, coefficient_range);
    std::string term = "(" + format_number(c) + ")";
    const std::size_t degree = rng.index(max_degree + 1);
    std::vector<std::size_t> powers(coords.size(), 0);
    for (std::size_t d = 0; d < degree; ++d) ++powers[rng.index(coords.size())];
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (powers[i] == 0) continue;
      term += "*" + coords[i];
      if (powers[i] > 1) term += "^" + std::to_string(powers[i]);
    }
    text += (k ? " + " : "") + term;
  }
  return text.empty() ? "0" : text;
}

ScalarField random_polynomial(Rng& rng, std::span<const std::string> coords, std::size_t terms,
                              std::size_t max_degree, std::string label, double coefficient_range) {
  const std::string text = random_polynomial_text(rng, coords, terms, max_degree, coefficient_range);
  return ScalarField::parse(text, coords, nullptr, std::move(label));
}

std::vector<std::string> default_coordinates(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

}  // namespace nambu
