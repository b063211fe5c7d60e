#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nambu/hj.hpp"
#include "nambu/random.hpp"

using namespace nambu;

namespace {

const std::vector<std::string> kXyz{"x", "y", "z"};
const std::vector<std::string> kXy{"x", "y"};

ScalarField field(const std::string& text, const std::vector<std::string>& coords = kXyz) {
  return ScalarField::parse(text, coords, nullptr, text);
}

Section section(const std::string& text, const std::vector<std::string>& base = kXy) {
  return Section(field(text, base));
}

HamiltonianTuple toy(const std::string& h1 = "z", const std::string& h2 = "y") {
  return HamiltonianTuple(VolumeStructure::canonical(3), {field(h1), field(h2)});
}

}  // namespace

TEST_CASE("embedding and projection") {
  CHECK(section("0").embed(std::vector<double>{1, 2}) == std::vector<double>{1, 2, 0});
  CHECK(section("y^2").embed(std::vector<double>{0, 3}) == std::vector<double>{0, 3, 9});
  Rng rng(1);
  const Section s = section("sin(x) + x*y");
  for (int k = 0; k < 50; ++k) {
    const std::vector<double> b = rng.point(2, -5, 5);
    CHECK(project(s.embed(b)) == b);
  }
  CHECK_THROWS_AS(s.embed(std::vector<double>{1, 2, 3}), InvalidArgument);
}

TEST_CASE("projected field examples") {
  const std::vector<double> b{0.3, -0.7};
  CHECK(projected_field(toy("z", "y"), section("y^2"))(b, 0.0) == std::vector<double>{-1, 0});
  CHECK(projected_field(toy("y", "z"), section("x*y"))(b, 0.0) == std::vector<double>{1, 0});
  CHECK(projected_field(toy("2", "3"), section("x"))(b, 0.0) == std::vector<double>{0, 0});
}

TEST_CASE("relatedness residual examples") {
  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> b = rng.point(2, -2, 2);
    CHECK(relatedness_residual(toy(), section("y^2"), b) == 0.0);
    CHECK(relatedness_residual(toy(), section("x"), b) == 1.0);
    CHECK(relatedness_residual(toy("1", "-4"), section("x^3 + y"), b) == 0.0);
  }
}

TEST_CASE("hj determinant residual examples") {
  const std::vector<double> b{0.5, 1.5};
  CHECK(hj_det_residual(toy("1", "2"), section("x*y"), b) == 0.0);
  CHECK(hj_det_residual(toy(), section("sin(y) + y^3"), b) == 0.0);
  CHECK(hj_det_residual(toy(), section("x"), b) == 1.0);
}

TEST_CASE("hj sum residual examples") {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> b = rng.point(2, -2, 2);
    CHECK(hj_sum_residual(toy(), section("y^2"), b) == 0.0);
    CHECK(std::abs(hj_sum_residual(toy(), section("x"), b)) == 1.0);
    CHECK(hj_sum_residual(toy("1", "2"), section("x*y"), b) == 0.0);
  }
}

TEST_CASE("sum residual, relatedness and determinant vanish together") {
  Rng rng(4);
  for (std::size_t n = 3; n <= 4; ++n) {
    const auto coords = default_coordinates(n);
    const auto base_coords = default_coordinates(n - 1);
    for (int k = 0; k < 100; ++k) {
      std::vector<ScalarField> hs;
      for (std::size_t i = 0; i + 1 < n; ++i) hs.push_back(random_polynomial(rng, coords, 4, 3));
      const VolumeStructure s(n, ScalarField::parse("2 + x1^2", coords, nullptr));
      const HamiltonianTuple h(s, hs);
      const Section sec(random_polynomial(rng, base_coords, 3, 2));
      const std::vector<double> b = rng.point(n - 1, -1, 1);
      const double rel = relatedness_residual(h, sec, b);
      const double sum = hj_sum_residual(h, sec, b);
      CHECK(std::abs(std::abs(sum) - rel) <= 1e-12 * (1 + rel));
      // det M = -rho * (signed sum) for graph sections.
      const double rho = s.density()(sec.embed(b), 0.0);
      const double det = hj_det_residual(h, sec, b);
      CHECK(std::abs(det + rho * sum) <= 1e-10 * (1 + std::abs(det)));
    }
  }
}

TEST_CASE("lagrangian check of graph sections") {
  const VolumeStructure s = VolumeStructure::canonical(3);
  const auto flat = lagrangian_check(s, section("0"), std::vector<double>{0.2, 0.1});
  CHECK(flat.lagrangian);
  CHECK(flat.level(2).dimension == 2);
  CHECK(flat.level(1).dimension == 0);
  CHECK(flat.level(2).sharp_dimension == 2);

  const auto curved = lagrangian_check(s, section("y^2"), std::vector<double>{0.5, 1.5});
  CHECK(curved.lagrangian);
  CHECK(curved.level(2).dimension == 2);

  Rng rng(5);
  for (std::size_t n = 3; n <= 5; ++n) {
    const auto coords = default_coordinates(n);
    const VolumeStructure sn(n, ScalarField::parse("3 + x1^2", coords, nullptr));
    for (int k = 0; k < 20; ++k) {
      const Section sec(random_polynomial(rng, default_coordinates(n - 1), 4, 3));
      const auto r = lagrangian_check(sn, sec, rng.point(n - 1, -1, 1));
      CHECK(r.lagrangian);
      CHECK(r.level(n - 1).dimension == n - 1);
      for (std::size_t j = 1; j + 1 < n; ++j) CHECK(r.level(j).dimension == 0);
    }
  }
}

TEST_CASE("codimension-2 subspaces are not lagrangian") {
  const VolumeStructure s = VolumeStructure::canonical(3);
  const std::vector<std::vector<double>> line{{1, 0, 0}};
  const auto r = lagrangian_check_subspace(s, std::vector<double>{0, 0, 0}, line);
  CHECK_FALSE(r.lagrangian);
  // No pair of vectors from a line has a non-zero wedge, so every 2-form
  // condition is vacuous and the top annihilator is the whole space.
  CHECK(r.level(2).dimension == 3);
  CHECK(r.level(1).dimension == 1);
  CHECK(r.excess_rank == 2);

  const VolumeStructure s4 = VolumeStructure::canonical(4);
  const std::vector<std::vector<double>> plane{{1, 0, 0, 0}, {0, 1, 0, 0}};
  const auto r4 = lagrangian_check_subspace(s4, std::vector<double>{0, 0, 0, 0}, plane);
  CHECK_FALSE(r4.lagrangian);
}

TEST_CASE("complete solutions") {
  std::vector<std::vector<double>> grid;
  for (double x : {-1.0, 0.0, 1.0})
    for (double y : {-0.5, 0.5}) grid.push_back({x, y});

  const CompleteSolution constant{[](double l) { return Section(ScalarField::constant(l, 2)); }, {-1.0, 0.0, 1.0}};
  const auto r = complete_solution_check(toy(), constant, grid);
  CHECK(r.pass());
  CHECK(r.max_det_residual == 0.0);
  CHECK(r.min_abs_jacobian == Catch::Approx(1.0).epsilon(1e-8));
  CHECK(recover_label(constant, std::vector<double>{0.3, 0.2, 0.75}) == Catch::Approx(0.75).margin(1e-12));

  const CompleteSolution shifted{[](double l) {
                                   return Section(ScalarField::parse("y^2 + " + format_number(l), kXy, nullptr));
                                 },
                                 {-1.0, 0.0, 1.0}};
  CHECK(complete_solution_check(toy(), shifted, grid).pass());
  CHECK(recover_label(shifted, std::vector<double>{0.0, 0.5, 0.5}) == Catch::Approx(0.25).margin(1e-12));

  const CompleteSolution duplicate{[](double) { return Section(ScalarField::constant(0.0, 2)); }, {-1.0, 0.0, 1.0}};
  const auto d = complete_solution_check(toy(), duplicate, grid);
  CHECK_FALSE(d.monotone_pass);
  CHECK_FALSE(d.jacobian_pass);
  CHECK_FALSE(d.pass());
  CHECK_FALSE(d.failure.empty());

  const CompleteSolution tilted{[](double l) {
                                  return Section(ScalarField::parse(format_number(l) + " * x", kXy, nullptr));
                                },
                                {-1.0, 0.0, 1.0}};
  const auto tr = complete_solution_check(toy(), tilted, grid);
  CHECK_FALSE(tr.det_pass);
  CHECK(tr.max_det_residual == 1.0);

  CHECK_THROWS_AS(complete_solution_check(toy(), CompleteSolution{constant.family, {}}, grid), InvalidArgument);
  CHECK_THROWS_AS(recover_label(constant, std::vector<double>{0, 0, 5.0}), DomainError);
}
