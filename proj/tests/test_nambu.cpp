#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nambu/random.hpp"
#include "nambu/structure.hpp"
#include "nambu/systems.hpp"

using namespace nambu;

namespace {

const std::vector<std::string> kXyz{"x", "y", "z"};

ScalarField field(const std::string& text, const std::vector<std::string>& coords = kXyz) {
  return ScalarField::parse(text, coords, nullptr, text);
}

std::vector<ScalarField> polys(Rng& rng, std::size_t count, std::size_t n, std::size_t terms = 4,
                               std::size_t degree = 3) {
  const auto coords = default_coordinates(n);
  std::vector<ScalarField> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_polynomial(rng, coords, terms, degree));
  return out;
}

int permutation_sign(const std::vector<std::size_t>& perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

}  // namespace

TEST_CASE("bracket examples") {
  const VolumeStructure s = VolumeStructure::canonical(3);
  const std::vector<double> p{2, 3, 5};
  const std::vector<ScalarField> xyz{field("x"), field("y"), field("z")};
  CHECK(bracket(s, xyz, p, 0.0) == 1.0);
  const std::vector<ScalarField> yxz{field("y"), field("x"), field("z")};
  CHECK(bracket(s, yxz, p, 0.0) == -1.0);
  const std::vector<ScalarField> mixed{field("x"), field("y"), field("x*y*z")};
  CHECK(bracket(s, mixed, p, 0.0) == 6.0);
}

TEST_CASE("bracket enforces the domain and argument count") {
  const VolumeStructure s(3, field("x"));
  const std::vector<ScalarField> xyz{field("x"), field("y"), field("z")};
  CHECK_THROWS_AS(bracket(s, xyz, std::vector<double>{0, 1, 1}, 0.0), DomainError);
  CHECK(bracket(s, xyz, std::vector<double>{2, 1, 1}, 0.0) == 0.5);
  const std::vector<ScalarField> two{field("x"), field("y")};
  CHECK_THROWS_AS(bracket(s, two, std::vector<double>{2, 1, 1}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(VolumeStructure::canonical(2), InvalidArgument);
}

TEST_CASE("sharp of basis forms") {
  const VolumeStructure s3 = VolumeStructure::canonical(3);
  const std::vector<double> p{0.5, 0.25, 1.0};
  CHECK(sharp_basis(s3, 2)(p, 0.0) == std::vector<double>{0, 0, 1});
  CHECK(sharp_basis(s3, 1)(p, 0.0) == std::vector<double>{0, -1, 0});
  const VolumeStructure s4(4, ScalarField::constant(2.0, 4));
  CHECK(sharp_basis(s4, 3)(std::vector<double>{1, 2, 3, 4}, 0.0) == std::vector<double>{0, 0, 0, 0.5});
  CHECK_THROWS_AS(sharp_basis(s3, 3), InvalidArgument);
}

TEST_CASE("hamiltonian vector field examples") {
  const VolumeStructure s = VolumeStructure::canonical(3);
  const VectorField x = hamiltonian_vector_field(HamiltonianTuple(s, {field("y"), field("z")}));
  CHECK(x(std::vector<double>{0.1, 0.2, 0.3}, 0.0) == std::vector<double>{1, 0, 0});
  CHECK_THROWS_AS(HamiltonianTuple(s, {field("y")}), InvalidArgument);
}

TEST_CASE("components equal brackets with coordinate functions") {
  Rng rng(101);
  for (std::size_t n = 3; n <= 5; ++n) {
    const VolumeStructure s(n, ScalarField::constant(1.5, n));
    for (int k = 0; k < 10; ++k) {
      const auto hs = polys(rng, n - 1, n);
      const std::vector<double> p = rng.point(n, -1, 1);
      const auto comps = hamiltonian_components<double>(s, hs, p, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<ScalarField> args = hs;
        args.push_back(ScalarField::coordinate(i, n));
        CHECK(std::abs(comps[i] - bracket(s, args, p, 0.0)) <= 1e-12 * (1 + std::abs(comps[i])));
      }
    }
  }
}

TEST_CASE("generators are conserved along their field") {
  Rng rng(202);
  for (std::size_t n = 3; n <= 5; ++n) {
    const VolumeStructure s = VolumeStructure::canonical(n);
    for (int k = 0; k < 20; ++k) {
      const auto hs = polys(rng, n - 1, n);
      const std::vector<double> p = rng.point(n, -1, 1);
      const auto comps = hamiltonian_components<double>(s, hs, p, 0.0);
      for (const auto& h : hs) {
        const auto g = gradient<double>(h, p, 0.0);
        double dot = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          dot += g[i] * comps[i];
          scale += std::abs(g[i] * comps[i]);
        }
        CHECK(std::abs(dot) <= 1e-10 * std::max(1.0, scale));
      }
    }
  }
}

TEST_CASE("3KS field matches the expanded component formula") {
  const SystemPreset p = ks3_preset(0.0, -1.0);
  const HamiltonianTuple tuple = p.tuple();
  const VectorField x = hamiltonian_vector_field(tuple);
  const std::vector<double> pt{0.4, 1.3, -0.7};
  const auto v = x(pt, 0.0);
  const auto dh = fd_gradient(p.scalar("h"), pt, 0.0);
  const auto dhb = fd_gradient(p.scalar("hbar"), pt, 0.0);
  // (h_v hb_a - h_a hb_v, h_a hb_x, -h_v hb_x)
  const std::vector<double> expected{dh[1] * dhb[2] - dh[2] * dhb[1], dh[2] * dhb[0], -dh[1] * dhb[0]};
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(v[i] - expected[i]) <= 1e-8 * (1 + std::abs(v[i])));
}

TEST_CASE("antisymmetry is exact under permutations") {
  Rng rng(303);
  for (std::size_t n = 3; n <= 5; ++n) {
    const VolumeStructure s = VolumeStructure::canonical(n);
    for (int k = 0; k < 20; ++k) {
      const auto fs = polys(rng, n, n);
      const std::vector<double> p = rng.point(n, -1, 1);
      const double base = bracket(s, fs, p, 0.0);
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      for (int shuffle = 0; shuffle < 5; ++shuffle) {
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
        std::vector<ScalarField> permuted;
        for (std::size_t i : perm) permuted.push_back(fs[i]);
        CHECK(bracket(s, permuted, p, 0.0) == permutation_sign(perm) * base);
      }
    }
  }
}

TEST_CASE("density covariance") {
  Rng rng(404);
  const VolumeStructure s = VolumeStructure::canonical(4);
  const VolumeStructure scaled = s.scaled(4.0);
  for (int k = 0; k < 20; ++k) {
    const auto fs = polys(rng, 4, 4);
    const std::vector<double> p = rng.point(4, -1, 1);
    CHECK(bracket(scaled, fs, p, 0.0) == bracket(s, fs, p, 0.0) / 4.0);
    const std::vector<ScalarField> hs(fs.begin(), fs.end() - 1);
    const auto a = hamiltonian_components<double>(s, hs, p, 0.0);
    const auto b = hamiltonian_components<double>(scaled, hs, p, 0.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(b[i] == a[i] / 4.0);
  }
}

TEST_CASE("leibniz examples and property") {
  const VolumeStructure s = VolumeStructure::canonical(3);
  const std::vector<double> one{1, 1, 1};
  const std::vector<ScalarField> yz{field("y"), field("z")};
  CHECK(leibniz_residual(s, field("x"), field("y"), yz, one, 0.0) == 0.0);
  CHECK(leibniz_residual(s, field("1"), field("x^2*y"), yz, one, 0.0) == 0.0);
  Rng rng(505);
  for (int k = 0; k < 50; ++k) {
    const auto fs = polys(rng, 4, 3);
    const std::vector<ScalarField> rest{fs[2], fs[3]};
    CHECK(std::abs(leibniz_residual(s, fs[0], fs[1], rest, rng.point(3, -1, 1), 0.0)) <= 1e-9);
  }
}

TEST_CASE("fundamental identity") {
  const VolumeStructure s = VolumeStructure::canonical(3);
  const std::vector<double> p{0.3, -0.2, 0.9};
  const std::vector<ScalarField> yz{field("y"), field("z")};
  const std::vector<ScalarField> xyz{field("x"), field("y"), field("z")};
  CHECK(std::abs(fundamental_identity_residual(s, yz, xyz, p, 0.0)) <= 1e-10);
  const std::vector<ScalarField> consts{field("1"), field("2"), field("3")};
  CHECK(fundamental_identity_residual(s, yz, consts, p, 0.0) == 0.0);

  Rng rng(606);
  for (int k = 0; k < 100; ++k) {
    const auto fs = polys(rng, 2, 3, 3, 3);
    const auto gs = polys(rng, 3, 3, 3, 3);
    CHECK(std::abs(fundamental_identity_residual(s, fs, gs, rng.point(3, -1, 1), 0.0)) <= 1e-6);
  }
}

TEST_CASE("fundamental identity with a non-constant density") {
  const VolumeStructure s(3, field("2 + x^2"));
  Rng rng(607);
  for (int k = 0; k < 20; ++k) {
    const auto fs = polys(rng, 2, 3, 3, 2);
    const auto gs = polys(rng, 3, 3, 3, 2);
    CHECK(std::abs(fundamental_identity_residual(s, fs, gs, rng.point(3, -1, 1), 0.0)) <= 1e-6);
  }
}

TEST_CASE("divergence") {
  const VolumeStructure s = VolumeStructure::canonical(3);
  const std::vector<double> p{0.2, 0.4, -0.6};
  const VectorField c = VectorField::from_components({field("1"), field("2"), field("3")}, "c");
  CHECK(divergence(s, c, p, 0.0) == 0.0);
  const VectorField e = VectorField::from_components({field("x"), field("0"), field("0")}, "x d/dx");
  CHECK(divergence(s, e, p, 0.0) == 1.0);

  Rng rng(707);
  for (std::size_t n = 3; n <= 5; ++n)
    for (int k = 0; k < 20; ++k) {
      const VolumeStructure sn = VolumeStructure::canonical(n);
      const VectorField x = hamiltonian_vector_field(HamiltonianTuple(sn, polys(rng, n - 1, n)));
      CHECK(std::abs(divergence(sn, x, rng.point(n, -1, 1), 0.0)) <= 1e-9);
    }

  // Liouville also holds for a non-constant density.
  const VolumeStructure weighted(3, field("1 + x^2 + y^2"));
  for (int k = 0; k < 20; ++k) {
    const VectorField x = hamiltonian_vector_field(HamiltonianTuple(weighted, polys(rng, 2, 3)));
    CHECK(std::abs(divergence(weighted, x, rng.point(3, -1, 1), 0.0)) <= 1e-9);
  }
}
