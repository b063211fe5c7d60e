#pragma once

// Run configuration read from a JSON document.
//
//   {
//     "system": "ks3" | {"preset": "ks3", "coefficients": {"c0": 0, "b1": -1}}
//             | {"preset": "riccati", "n": 3, "coefficients": {"a0": 1, "a1": 0, "a2": 0}}
//             | {"name": "toy", "coordinates": ["x", "y", "z"], "coefficients": {"k": 2},
//                "density": "1", "hamiltonians": ["z", "k*y"], "rhs": [...], "domain": "x"},
//     "field": "rhs" | "nambu" | "hamiltonian",
//     "integrator": {"method": "rk4" | "rk45", "t0": 0, "t1": 1, "step": 1e-3, "abs_tol": 1e-10,
//                    "rel_tol": 1e-10, "initial_step": 1e-3, "min_step": 1e-12, "max_step": 0.1,
//                    "stride": 1},
//     "initial_conditions": [[0, 1, 0]],
//     "convergence_steps": [1e-2, 5e-3, 2.5e-3],
//     "samples": 100, "seed": 1, "time": 0,
//     "tolerance": 1e-8, "drift_tolerance": 1e-7,
//     "section": "lambda * x1",
//     "lambda": [-1, 0, 1] | {"from": -1, "to": 1, "count": 3},
//     "base_points": [[0.1, 0.2]],
//     "compare_closed_form": true
//   }

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nambu/dynamics.hpp"
#include "nambu/systems.hpp"

namespace nambu::cli {

/// Malformed command line or configuration (exit status 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SystemPreset system;
  // Empty selects "rhs" when the system has one and "hamiltonian" otherwise.
  std::string field;
  IntegratorConfig integrator;
  std::vector<std::vector<double>> initial_conditions;
  std::vector<double> convergence_steps;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double time = 0.0;
  std::optional<double> tolerance;
  double drift_tolerance = 1e-7;
  std::string section;
  std::vector<double> lambdas;
  std::vector<std::vector<double>> base_points;
  bool compare_closed_form = true;
};

SystemPreset build_system(const nlohmann::json& node);
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

}  // namespace nambu::cli
