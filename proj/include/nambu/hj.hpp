#pragma once

// Hamilton-Jacobi machinery for the fibration pi: R^n -> R^(n-1) that drops
// the last coordinate. Sections are graphs x -> (x, gamma(x)).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nambu/diff.hpp"
#include "nambu/field.hpp"
#include "nambu/structure.hpp"

namespace nambu {

class Section {
 public:
  Section() = default;
  /// `fiber` is a field over the n-1 base coordinates.
  explicit Section(ScalarField fiber);

  std::size_t base_dimension() const { return fiber_.dimension(); }
  std::size_t dimension() const { return fiber_.dimension() + 1; }
  const ScalarField& fiber() const { return fiber_; }

  /// (b, gamma(b)).
  std::vector<double> embed(std::span<const double> base, double t = 0.0) const;

  template <class C>
  std::vector<C> embed_carrier(std::span<const C> base, double t) const {
    std::vector<C> out(base.begin(), base.end());
    out.push_back(fiber_(base, t));
    return out;
  }

 private:
  ScalarField fiber_;
};

/// Drops the last coordinate.
std::vector<double> project(std::span<const double> x);

/// T(pi) o X o gamma, a field on the base.
VectorField projected_field(const HamiltonianTuple& h, const Section& section);

/// |sum_k d(gamma)/dx^k X^k - X^n| at gamma(base): the part of
/// T(gamma)(X^gamma) - X o gamma that does not cancel identically.
double relatedness_residual(const HamiltonianTuple& h, const Section& section, std::span<const double> base,
                            double t = 0.0);

/// det of M_ij = d(H_i o gamma)/dx^j, an (n-1)x(n-1) matrix.
double hj_det_residual(const HamiltonianTuple& h, const Section& section, std::span<const double> base,
                       double t = 0.0);

/// Signed minor-weighted sum
///   (1/rho) [ sum_{k<n} (-1)^(n-k) J_k d(gamma)/dx^k - J_n ],
/// J_k the Jacobian minor of H with column k removed (one-based). It equals
/// the signed quantity inside relatedness_residual.
double hj_sum_residual(const HamiltonianTuple& h, const Section& section, std::span<const double> base,
                       double t = 0.0);

struct AnnihilatorLevel {
  std::size_t j = 0;
  // Coefficient vectors over the basis (n-1)-forms dx^1 ^ .. (omit i) .. ^ dx^n.
  std::vector<std::vector<double>> basis;
  std::size_t dimension = 0;
  std::size_t sharp_dimension = 0;
};

struct AnnihilatorReport {
  std::size_t n = 0;
  std::size_t tangent_dimension = 0;
  // levels[j - 1] for j = 1 .. n-1.
  std::vector<AnnihilatorLevel> levels;
  // rank of [sharp Ann^(n-1) | T_xN] minus dim T_xN; zero when the sharp image lies in T_xN.
  std::size_t excess_rank = 0;
  bool lagrangian = false;

  const AnnihilatorLevel& level(std::size_t j) const;
};

/// Ann^j of the tangent space of the graph at gamma(base), for 1 <= j <= n-1,
/// and the test sharp Ann^(n-1) == T_xN (sharp of all (n-1)-forms is all of
/// T_xE wherever rho != 0).
AnnihilatorReport lagrangian_check(const VolumeStructure& s, const Section& section, std::span<const double> base,
                                   double t = 0.0);

/// Same computation for an explicit tangent basis (each vector of length n)
/// at the point x.
AnnihilatorReport lagrangian_check_subspace(const VolumeStructure& s, std::span<const double> x,
                                            const std::vector<std::vector<double>>& tangent_basis, double t = 0.0);

struct CompleteSolution {
  std::function<Section(double)> family;
  std::vector<double> lambdas;
};

struct CompleteSolutionReport {
  double max_det_residual = 0.0;
  double min_abs_jacobian = 0.0;
  bool det_pass = false;
  bool jacobian_pass = false;
  bool monotone_pass = false;
  // First failure, if any, as "lambda=.. base=(..)".
  std::string failure;

  bool pass() const { return det_pass && jacobian_pass && monotone_pass; }
};

/// (a) every section solves the HJ equation to `tolerance` over the base grid;
/// (b) (x, lambda) -> Phi(x, lambda) has |det| >= 1e-10 (AD in x, central
/// differences with step 1e-5 in lambda); (c) fiber values are strictly
/// monotone in lambda at every base point.
CompleteSolutionReport complete_solution_check(const HamiltonianTuple& h, const CompleteSolution& cs,
                                               const std::vector<std::vector<double>>& base_grid,
                                               double tolerance = 1e-8, double t = 0.0);

/// The label f(x) = pr o Phi^(-1)(x): the lambda whose section passes
/// through x, located by bisection between grid values.
double recover_label(const CompleteSolution& cs, std::span<const double> x, double t = 0.0);

}  // namespace nambu
