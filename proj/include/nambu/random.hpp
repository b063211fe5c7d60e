#pragma once

// Seeded sampling. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; uniforms are built from its raw bits rather than
// std::uniform_real_distribution so draws match across standard libraries.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nambu/field.hpp"

namespace nambu {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in {0, .., count - 1}.
  std::size_t index(std::size_t count) { return static_cast<std::size_t>(uniform() * static_cast<double>(count)); }
  std::vector<double> point(std::size_t n, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Text of a polynomial with `terms` monomials of total degree <= max_degree
/// and coefficients uniform in [-coefficient_range, coefficient_range].
std::string random_polynomial_text(Rng& rng, std::span<const std::string> coords, std::size_t terms,
                                   std::size_t max_degree, double coefficient_range = 1.0);

ScalarField random_polynomial(Rng& rng, std::span<const std::string> coords, std::size_t terms,
                              std::size_t max_degree, std::string label = {}, double coefficient_range = 1.0);

/// x1, .., xn.
std::vector<std::string> default_coordinates(std::size_t n);

/// Shortest text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace nambu
