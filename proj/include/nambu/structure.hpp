#pragma once

// Volume Nambu-Poisson structures on open subsets of R^n.
//
// With Omega = rho dx^1 ^ ... ^ dx^n the n-ary bracket is
//   {f_1, ..., f_n} = det(df_i / dx^j) / rho
// and the Hamiltonian vector field of (H_1, ..., H_{n-1}) has components
//   X^i = {H_1, ..., H_{n-1}, x^i} = (-1)^(n-i) minor_i(H) / rho,
// minor_i being the Jacobian determinant with column i deleted.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nambu/diff.hpp"
#include "nambu/field.hpp"
#include "nambu/matrix.hpp"

namespace nambu {

/// Membership test for the open set on which a system is defined.
using DomainPredicate = std::function<bool(std::span<const double>, double)>;

class VolumeStructure {
 public:
  VolumeStructure() = default;
  /// `domain` may be empty, meaning all of R^n (minus the zeros of rho).
  VolumeStructure(std::size_t dimension, ScalarField density, DomainPredicate domain = {});

  static VolumeStructure canonical(std::size_t dimension, DomainPredicate domain = {});

  std::size_t dimension() const { return dimension_; }
  const ScalarField& density() const { return density_; }
  const DomainPredicate& domain() const { return domain_; }

  /// Domain predicate holds and rho is finite and non-zero.
  bool contains(std::span<const double> x, double t) const;
  /// Throws DomainError unless contains(x, t).
  void require(std::span<const double> x, double t) const;

  /// Same structure with rho scaled by `factor`.
  VolumeStructure scaled(double factor) const;

 private:
  std::size_t dimension_ = 0;
  ScalarField density_;
  DomainPredicate domain_;
};

/// The n-1 generators of the dynamics on an n-dimensional structure.
class HamiltonianTuple {
 public:
  HamiltonianTuple(VolumeStructure structure, std::vector<ScalarField> fields);

  const VolumeStructure& structure() const { return structure_; }
  std::span<const ScalarField> fields() const { return fields_; }
  std::size_t size() const { return fields_.size(); }

 private:
  VolumeStructure structure_;
  std::vector<ScalarField> fields_;
};

/// {f_1, ..., f_n} at x. Throws DomainError outside the structure's domain.
double bracket(const VolumeStructure& s, std::span<const ScalarField> fs, std::span<const double> x, double t);

/// Carrier-generic bracket without the domain check; C = Jet1 yields the
/// bracket together with its gradient.
template <class C>
C bracket_value(const VolumeStructure& s, std::span<const ScalarField> fs, std::span<const C> x, double t) {
  if (fs.size() != s.dimension()) throw InvalidArgument("bracket needs exactly n arguments");
  C rho = s.density()(x, t);
  return determinant(jacobian<C>(fs, x, t)) / rho;
}

/// Image under the sharp map of the basis (n-1)-form with dx^omit removed:
/// the field (-1)^(n-1-omit) / rho in slot `omit`, zero elsewhere (zero-based).
VectorField sharp_basis(const VolumeStructure& s, std::size_t omit);

/// Components of X_{H_1..H_{n-1}} at x on any carrier (no domain check).
template <class C>
std::vector<C> hamiltonian_components(const VolumeStructure& s, std::span<const ScalarField> hs,
                                      std::span<const C> x, double t) {
  const std::size_t n = s.dimension();
  if (hs.size() + 1 != n) throw InvalidArgument("a Hamiltonian tuple has n-1 fields");
  Matrix<C> grads = jacobian<C>(hs, x, t);
  C rho = s.density()(x, t);
  std::vector<C> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    C minor = determinant(grads.without_column(i));
    // (-1)^(n-i) in one-based indexing is (-1)^(n-1-i) here.
    if ((n - 1 - i) % 2 == 1) minor = -minor;
    out.push_back(minor / rho);
  }
  return out;
}

/// X^i = {H_1, ..., H_{n-1}, x^i}. Evaluation enforces the domain.
VectorField hamiltonian_vector_field(const HamiltonianTuple& h);

/// X_f{g_1..g_n} - sum_i {g_1, .., X_f g_i, .., g_n}. The left term is a
/// Richardson-extrapolated central difference along X_f; the right terms
/// are exact (nested jets).
double fundamental_identity_residual(const VolumeStructure& s, std::span<const ScalarField> fs,
                                     std::span<const ScalarField> gs, std::span<const double> x, double t);

/// {f g, rest...} - f {g, rest...} - g {f, rest...}.
double leibniz_residual(const VolumeStructure& s, const ScalarField& f, const ScalarField& g,
                        std::span<const ScalarField> rest, std::span<const double> x, double t);

/// (1/rho) sum_i d(rho X^i)/dx^i by automatic differentiation.
double divergence(const VolumeStructure& s, const VectorField& field, std::span<const double> x, double t);

}  // namespace nambu
