#pragma once

// Flow integration with conservation and volume diagnostics.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nambu/field.hpp"
#include "nambu/structure.hpp"

namespace nambu {

enum class Method { Rk4Fixed, Rk45Adaptive };

struct IntegratorConfig {
  Method method = Method::Rk4Fixed;
  double t0 = 0.0;
  double t1 = 1.0;
  // Fixed-step size; the span is divided into ceil((t1 - t0) / step) equal steps.
  double step = 1e-3;
  // Adaptive (Dormand-Prince 5(4)) controls.
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-12;
  double max_step = 0.1;
  // Keep every stride-th accepted step; the final state is always kept.
  std::size_t stride = 1;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::string> diagnostic_names;
  // diagnostics[k][j] is diagnostic j at sample k.
  std::vector<std::vector<double>> diagnostics;

  std::size_t size() const { return times.size(); }
  const std::vector<double>& final_state() const { return states.back(); }

  /// Appends a diagnostic column computed from each (state, time).
  void add_diagnostic(const std::string& name,
                      const std::function<double(std::span<const double>, double)>& f);
  /// Column of a named diagnostic.
  std::vector<double> diagnostic(const std::string& name) const;
};

/// Integrates x' = X(x, t) from x0. Non-autonomous fields are sampled at
/// the stage times. Throws IntegrationError if any stage leaves `domain`
/// (empty means unrestricted) or produces non-finite values, and on step
/// underflow in adaptive mode.
Trajectory integrate(const VectorField& field, std::span<const double> x0, const IntegratorConfig& config,
                     const DomainPredicate& domain = {});

struct Drift {
  double max_drift = 0.0;
  double final_drift = 0.0;
  // False for time-dependent fields: their drift is reported, not claimed.
  bool conserved_claim = true;
};

/// |f(x(t_k), t_k) - f(x(t_0), t_0)| along the samples, keyed by field label.
std::map<std::string, Drift> conservation_report(const Trajectory& traj, std::span<const ScalarField> fields);

/// Least-squares slope of log(error) against log(step) for fixed-step RK4,
/// errors measured at t1 against a Richardson-extrapolated reference.
/// Throws DegenerateInput when any error is exactly zero.
double convergence_order(const VectorField& field, std::span<const double> x0, double t1,
                         std::span<const double> steps, double t0 = 0.0);

}  // namespace nambu
