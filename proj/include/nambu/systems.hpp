#pragma once

// Built-in systems: the third-order Kummer-Schwarz equation (ks3) and n
// coupled Riccati equations (riccati), with their presymplectic forms,
// auxiliary Hamiltonians and the conformal density that turns the Nambu
// bracket of their generators into the given first-order system.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nambu/field.hpp"
#include "nambu/matrix.hpp"
#include "nambu/random.hpp"
#include "nambu/structure.hpp"

namespace nambu {

/// Coefficient given as a number or as an expression in t.
struct Coefficient {
  std::string text;
  Coefficient(double value);             // NOLINT(google-explicit-constructor)
  Coefficient(const char* expression);   // NOLINT(google-explicit-constructor)
  Coefficient(std::string expression);   // NOLINT(google-explicit-constructor)
};

/// Two-form stored by its upper-triangular coefficients w_ij (i < j) of
/// dx^i ^ dx^j.
class TwoForm {
 public:
  TwoForm() = default;
  TwoForm(std::string name, std::size_t dimension, std::vector<ScalarField> upper);

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return dimension_; }
  /// w_ij for i < j; -w_ji for i > j; zero on the diagonal.
  ScalarField entry(std::size_t i, std::size_t j) const;
  /// Antisymmetric coefficient matrix at x.
  Matrix<double> at(std::span<const double> x, double t) const;
  /// (i_Y w)_j = sum_i Y^i w_ij.
  std::vector<double> contract(std::span<const double> y, std::span<const double> x, double t) const;
  /// max over i<j<k of |d_i w_jk + d_j w_ki + d_k w_ij|, by jets.
  double closedness_residual(std::span<const double> x, double t) const;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const;

  std::string name_;
  std::size_t dimension_ = 0;
  std::vector<ScalarField> upper_;
};

/// i_Y w = sign * d(function).
struct Pairing {
  std::string form;
  std::string field;
  std::string function;
  double sign = 1.0;
};

struct SystemPreset {
  std::string name;
  std::vector<std::string> coordinates;
  std::shared_ptr<CoefficientTable> coefficients;
  // Canonical volume (rho = 1) restricted to the domain.
  VolumeStructure structure;
  std::vector<ScalarField> hamiltonians;
  // Components of the first-order system; empty when the system has none.
  std::vector<ScalarField> rhs_components;
  VectorField rhs;
  std::vector<std::string> scalar_names;
  std::map<std::string, ScalarField> scalars;
  std::map<std::string, VectorField> vector_fields;
  std::map<std::string, TwoForm> forms;
  std::vector<Pairing> pairings;
  DomainPredicate domain;
  std::function<std::vector<double>(Rng&)> sampler;

  std::size_t dimension() const { return coordinates.size(); }
  bool has_rhs() const { return !rhs_components.empty(); }
  HamiltonianTuple tuple() const { return HamiltonianTuple(structure, hamiltonians); }
  bool in_domain(std::span<const double> x, double t) const { return !domain || domain(x, t); }

  const ScalarField& scalar(const std::string& key) const;
  const VectorField& vector_field(const std::string& key) const;
  const TwoForm& form(const std::string& key) const;
};

/// Coordinates (x, v, a) on v != 0. Hamiltonians (h, hbar) with
/// h = h3 + b1 h1 and hbar = hbar3 + b1 hbar1.
SystemPreset ks3_preset(double c0 = 0.0, const Coefficient& b1 = -1.0);

/// n copies of x' = a0 + a1 x + a2 x^2 on pairwise-distinct coordinates,
/// Hamiltonians h1 .. h(n-1).
SystemPreset riccati_preset(std::size_t n, const Coefficient& a0, const Coefficient& a1, const Coefficient& a2);

/// Builds a preset from expression text. `domain` is an expression that must
/// evaluate to a finite non-zero value inside the domain (empty: all of R^n).
SystemPreset custom_system(std::string name, std::vector<std::string> coordinates,
                           const std::map<std::string, std::string>& coefficients, const std::string& density,
                           const std::vector<std::string>& hamiltonians, const std::vector<std::string>& rhs,
                           const std::string& domain);

/// Looks up "ks3" or "riccati" (n = 3, a0 = 1, a1 = a2 = 0).
SystemPreset preset_by_name(const std::string& name);

/// |i_Y w - d(fn)| (Euclidean norm of the covector difference).
double pairing_residual(const SystemPreset& p, const std::string& form, const std::string& field,
                        const ScalarField& fn, std::span<const double> x, double t = 0.0);
/// |i_Y w - sign * d(fn)| for a stored pairing.
double pairing_residual(const SystemPreset& p, const Pairing& pairing, std::span<const double> x, double t = 0.0);

/// Bracket induced by a possibly degenerate two-form: X_g is the least-norm
/// solution of i_X w = -dg and {f, g} = -df(X_g).
double presymplectic_bracket(const TwoForm& w, const ScalarField& f, const ScalarField& g, std::span<const double> x,
                             double t = 0.0);

/// sl(2) relations of (h1, h2, h3) under omega_3ks, of (hbar1, hbar2, hbar3)
/// under omega_zp, and commutators of (Y1, Y2, Y3). Keys name the residual.
std::map<std::string, double> ks3_sl2_check(const SystemPreset& p, std::span<const double> x, double t = 0.0);

struct DensityEstimate {
  double rho = 0.0;
  // Max relative deviation of the other usable component ratios from rho.
  double spread = 0.0;
  // Coordinate used for rho.
  std::size_t index = 0;
};

/// rho* = {H_1, .., H_(n-1), x^i}_canonical / rhs^i at the first component
/// with |rhs^i| > 1e-6 |rhs|_inf. Throws DegenerateInput at stationary
/// points (|rhs|_inf <= 1e-12) and where rho* vanishes.
DensityEstimate derive_density(const SystemPreset& p, std::span<const double> x, double t = 0.0);

/// Volume structure with density rho*; its Hamiltonian field of the
/// preset's generators reproduces rhs.
VolumeStructure derived_structure(const SystemPreset& p);

/// Nambu field of the generators under derived_structure.
VectorField derived_nambu_field(const SystemPreset& p);

/// {H_1, .., H_(n-1), x^k}_canonical / rho* - rhs^k for every k.
std::vector<double> riccati_bracket_recovery(const SystemPreset& p, std::span<const double> x, double t = 0.0);

/// Magnitude of the closed-form 3KS density, |a^2/v^2 + 4 b1|^(3/2) / v^6,
/// divided by |rho*|.
double ks3_closed_form_density_ratio(const SystemPreset& p, std::span<const double> x, double t = 0.0);

}  // namespace nambu
