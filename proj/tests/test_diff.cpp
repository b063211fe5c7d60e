#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nambu/diff.hpp"
#include "nambu/random.hpp"
#include "nambu/systems.hpp"

using namespace nambu;

namespace {

const std::vector<std::string> kXyz{"x", "y", "z"};

ScalarField field(const std::string& text, const std::vector<std::string>& coords = kXyz) {
  return ScalarField::parse(text, coords, nullptr, text);
}

}  // namespace

TEST_CASE("gradient examples") {
  const std::vector<double> p{2, 3, 5};
  CHECK(gradient<double>(field("x*y*z"), p, 0.0) == std::vector<double>{15, 10, 6});
  CHECK(gradient<double>(field("7"), p, 0.0) == std::vector<double>{0, 0, 0});
  CHECK(gradient<double>(field("x"), p, 0.0) == std::vector<double>{1, 0, 0});
}

TEST_CASE("finite-difference oracle examples") {
  const std::vector<double> one{1.0};
  CHECK(std::abs(fd_gradient(field("x^2", {"x"}), one, 0.0)[0] - 2.0) <= 1e-9);
  const auto g = fd_gradient(field("4.25"), std::vector<double>{1, 2, 3}, 0.0);
  for (double v : g) CHECK(std::abs(v) <= 1e-10);
  CHECK_THROWS_AS(fd_gradient(field("x"), std::vector<double>{1, 2, 3}, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("AD and FD agree on random polynomials") {
  Rng rng(11);
  for (int f = 0; f < 100; ++f) {
    const std::size_t n = 1 + rng.index(5);
    const auto coords = default_coordinates(n);
    const ScalarField poly = random_polynomial(rng, coords, 6, 4);
    const std::vector<double> p = rng.point(n, -2.0, 2.0);
    const auto ad = gradient<double>(poly, p, 0.0);
    const auto fd = fd_gradient(poly, p, 0.0);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ad[i] - fd[i]) <= 1e-6 * (1.0 + std::abs(ad[i])));
  }
}

TEST_CASE("gradient is linear") {
  Rng rng(3);
  const auto coords = default_coordinates(3);
  for (int k = 0; k < 20; ++k) {
    const ScalarField f = random_polynomial(rng, coords, 4, 3);
    const ScalarField g = random_polynomial(rng, coords, 4, 3);
    const double alpha = rng.uniform(-2, 2), beta = rng.uniform(-2, 2);
    const std::vector<double> p = rng.point(3, -1, 1);
    const auto lhs = gradient<double>(alpha * f + beta * g, p, 0.0);
    const auto gf = gradient<double>(f, p, 0.0);
    const auto gg = gradient<double>(g, p, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(std::abs(lhs[i] - (alpha * gf[i] + beta * gg[i])) <= 1e-13 * (1 + std::abs(lhs[i])));
  }
}

TEST_CASE("jacobian examples") {
  const std::vector<double> p{0.3, -1.2, 2.0};
  const std::vector<ScalarField> coords{field("x"), field("y"), field("z")};
  const auto id = jacobian<double>(coords, p, 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(id(i, j) == (i == j ? 1.0 : 0.0));

  const std::vector<ScalarField> yz{field("y"), field("z")};
  const auto m = jacobian<double>(yz, p, 0.0);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 2) == 1.0);

  const SystemPreset ks3 = ks3_preset(0.0);
  const std::vector<ScalarField> hs{ks3.scalar("h1"), ks3.scalar("h2"), ks3.scalar("h3")};
  const auto j = jacobian<double>(hs, std::vector<double>{1, 1, 1}, 0.0);
  const double expected[3][3] = {{0, 2, 0}, {0, 2, -1}, {0, 1.5, -1}};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(j(r, c) == Catch::Approx(expected[r][c]).margin(1e-15));
}

TEST_CASE("jacobian minors") {
  const std::vector<double> p{2, 3, 5};
  const std::vector<ScalarField> yz{field("y"), field("z")};
  CHECK(jacobian_minor(yz, p, 0.0, 0) == 1.0);
  const std::vector<ScalarField> repeated{field("x*y + z"), field("x*y + z")};
  for (std::size_t k = 0; k < 3; ++k) CHECK(jacobian_minor(repeated, p, 0.0, k) == 0.0);
  const std::vector<ScalarField> mixed{field("x"), field("x*y*z")};
  CHECK(jacobian_minor(mixed, p, 0.0, 1) == 6.0);
  CHECK_THROWS_AS(jacobian_minor(mixed, p, 0.0, 3), InvalidArgument);
}

TEST_CASE("swapping fields flips the minor exactly") {
  Rng rng(5);
  for (std::size_t n = 3; n <= 5; ++n) {
    const auto coords = default_coordinates(n);
    for (int k = 0; k < 20; ++k) {
      std::vector<ScalarField> fs;
      for (std::size_t i = 0; i + 1 < n; ++i) fs.push_back(random_polynomial(rng, coords, 4, 3));
      const std::vector<double> p = rng.point(n, -1, 1);
      const std::size_t omit = rng.index(n);
      const double before = jacobian_minor(fs, p, 0.0, omit);
      std::swap(fs[0], fs[1]);
      CHECK(jacobian_minor(fs, p, 0.0, omit) == -before);
    }
  }
}

TEST_CASE("determinant paths agree") {
  Rng rng(9);
  for (std::size_t n = 1; n <= 3; ++n)
    for (int k = 0; k < 50; ++k) {
      Matrix<double> m(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-2, 2);
      CHECK(std::abs(determinant(m) - determinant_cofactor(m)) <= 1e-12);
    }
}

TEST_CASE("lie bracket examples") {
  const SystemPreset ks3 = ks3_preset(0.0);
  const std::vector<double> p{1, 2, 3};
  const auto& y1 = ks3.vector_field("Y1");
  const auto& y2 = ks3.vector_field("Y2");
  const auto xx = lie_bracket(y2, y2, p, 0.0);
  for (double v : xx) CHECK(v == 0.0);
  CHECK(lie_bracket(y1, y2, p, 0.0) == std::vector<double>{0, 0, 4});

  const VectorField dx = VectorField::from_components({field("1"), field("0"), field("0")}, "d/dx");
  const VectorField xdy = VectorField::from_components({field("0"), field("x"), field("0")}, "x d/dy");
  CHECK(lie_bracket(dx, xdy, p, 0.0) == std::vector<double>{0, 1, 0});
}

TEST_CASE("lie bracket is bilinear and antisymmetric") {
  Rng rng(17);
  const auto coords = default_coordinates(3);
  auto random_field = [&] {
    std::vector<ScalarField> c;
    for (int i = 0; i < 3; ++i) c.push_back(random_polynomial(rng, coords, 3, 3));
    return c;
  };
  for (int k = 0; k < 20; ++k) {
    const auto a = random_field(), b = random_field(), c = random_field();
    std::vector<ScalarField> sum;
    for (int i = 0; i < 3; ++i) sum.push_back(a[i] + 2.0 * c[i]);
    const VectorField fa = VectorField::from_components(a, "A");
    const VectorField fb = VectorField::from_components(b, "B");
    const VectorField fc = VectorField::from_components(c, "C");
    const VectorField fs = VectorField::from_components(sum, "A+2C");
    const std::vector<double> p = rng.point(3, -1, 1);
    const auto ab = lie_bracket(fa, fb, p, 0.0);
    const auto ba = lie_bracket(fb, fa, p, 0.0);
    const auto cb = lie_bracket(fc, fb, p, 0.0);
    const auto sb = lie_bracket(fs, fb, p, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(ab[i] + ba[i]) <= 1e-10);
      CHECK(std::abs(sb[i] - (ab[i] + 2.0 * cb[i])) <= 1e-10);
    }
  }
}
