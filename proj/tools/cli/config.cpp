#include "cli/config.hpp"

#include <fstream>
#include <map>
#include <set>

namespace nambu::cli {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw UsageError("unknown key '" + key + "' in " + where);
}

Coefficient coefficient(const json& v, const std::string& name) {
  if (v.is_number()) return Coefficient(v.get<double>());
  if (v.is_string()) return Coefficient(v.get<std::string>());
  throw UsageError("coefficient '" + name + "' must be a number or an expression string");
}

std::string coefficient_text(const json& v, const std::string& name) { return coefficient(v, name).text; }

std::vector<double> vector_of(const json& v, const std::string& where) {
  if (!v.is_array()) throw UsageError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw UsageError(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> points_of(const json& v, const std::string& where) {
  if (!v.is_array()) throw UsageError(where + " must be an array of points");
  std::vector<std::vector<double>> out;
  for (const auto& p : v) out.push_back(vector_of(p, where));
  return out;
}

std::vector<std::string> strings_of(const json& v, const std::string& where) {
  if (!v.is_array()) throw UsageError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw UsageError(where + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

SystemPreset build_preset(const json& node) {
  const std::string name = node.at("preset").get<std::string>();
  const json coeffs = node.value("coefficients", json::object());
  if (name == "ks3") {
    only_keys(node, {"preset", "coefficients"}, "system");
    only_keys(coeffs, {"c0", "b1"}, "ks3 coefficients");
    double c0 = 0.0;
    if (coeffs.contains("c0")) {
      if (!coeffs["c0"].is_number()) throw UsageError("ks3 coefficient c0 must be a number");
      c0 = coeffs["c0"].get<double>();
    }
    const Coefficient b1 = coeffs.contains("b1") ? coefficient(coeffs["b1"], "b1") : Coefficient(-1.0);
    return ks3_preset(c0, b1);
  }
  if (name == "riccati") {
    only_keys(node, {"preset", "n", "coefficients"}, "system");
    only_keys(coeffs, {"a0", "a1", "a2"}, "riccati coefficients");
    const std::size_t n = node.value("n", 3u);
    auto get = [&](const char* key, double fallback) {
      return coeffs.contains(key) ? coefficient(coeffs[key], key) : Coefficient(fallback);
    };
    return riccati_preset(n, get("a0", 1.0), get("a1", 0.0), get("a2", 0.0));
  }
  throw UsageError("unknown preset '" + name + "'");
}

SystemPreset build_custom(const json& node) {
  only_keys(node, {"name", "coordinates", "coefficients", "density", "hamiltonians", "rhs", "domain"}, "system");
  if (!node.contains("coordinates") || !node.contains("hamiltonians"))
    throw UsageError("an inline system needs coordinates and hamiltonians");
  std::map<std::string, std::string> coeffs;
  for (const auto& [key, value] : node.value("coefficients", json::object()).items())
    coeffs[key] = coefficient_text(value, key);
  std::vector<std::string> rhs;
  if (node.contains("rhs")) rhs = strings_of(node["rhs"], "system.rhs");
  return custom_system(node.value("name", std::string("custom")), strings_of(node["coordinates"], "system.coordinates"),
                       coeffs, node.value("density", std::string("1")),
                       strings_of(node["hamiltonians"], "system.hamiltonians"), rhs,
                       node.value("domain", std::string()));
}

IntegratorConfig integrator_of(const json& node) {
  only_keys(node, {"method", "t0", "t1", "step", "abs_tol", "rel_tol", "initial_step", "min_step", "max_step", "stride"},
            "integrator");
  IntegratorConfig c;
  const std::string method = node.value("method", std::string("rk4"));
  if (method == "rk4")
    c.method = Method::Rk4Fixed;
  else if (method == "rk45")
    c.method = Method::Rk45Adaptive;
  else
    throw UsageError("integrator.method must be rk4 or rk45");
  c.t0 = node.value("t0", c.t0);
  c.t1 = node.value("t1", c.t1);
  c.step = node.value("step", c.step);
  c.abs_tol = node.value("abs_tol", c.abs_tol);
  c.rel_tol = node.value("rel_tol", c.rel_tol);
  c.initial_step = node.value("initial_step", c.initial_step);
  c.min_step = node.value("min_step", c.min_step);
  c.max_step = node.value("max_step", c.max_step);
  c.stride = node.value("stride", c.stride);
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::vector<double> lambdas_of(const json& node) {
  if (node.is_array()) return vector_of(node, "lambda");
  only_keys(node, {"from", "to", "count"}, "lambda");
  const double from = node.at("from").get<double>();
  const double to = node.at("to").get<double>();
  const std::size_t count = node.at("count").get<std::size_t>();
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(count == 1 ? from : from + (to - from) * static_cast<double>(k) / static_cast<double>(count - 1));
  return out;
}

}  // namespace

SystemPreset build_system(const json& node) {
  try {
    if (node.is_string()) return preset_by_name(node.get<std::string>());
    if (node.is_object() && node.contains("preset")) return build_preset(node);
    if (node.is_object()) return build_custom(node);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("system must be a preset name or an object");
}

RunConfig parse_config(const json& doc) {
  only_keys(doc,
            {"system", "field", "integrator", "initial_conditions", "convergence_steps", "samples", "seed", "time",
             "tolerance", "drift_tolerance", "section", "lambda", "base_points", "compare_closed_form"},
            "config");
  if (!doc.contains("system")) throw UsageError("config needs a system");
  RunConfig c;
  try {
    c.system = build_system(doc["system"]);
    c.field = doc.value("field", std::string());
    if (!c.field.empty() && c.field != "rhs" && c.field != "nambu" && c.field != "hamiltonian")
      throw UsageError("field must be rhs, nambu or hamiltonian");
    if ((c.field == "rhs" || c.field == "nambu") && !c.system.has_rhs())
      throw UsageError("field '" + c.field + "' needs a system with a right-hand side");
    if (doc.contains("integrator")) c.integrator = integrator_of(doc["integrator"]);
    if (doc.contains("initial_conditions"))
      c.initial_conditions = points_of(doc["initial_conditions"], "initial_conditions");
    for (const auto& x : c.initial_conditions) {
      if (x.size() != c.system.dimension())
        throw UsageError("initial condition has " + std::to_string(x.size()) + " entries, the system has " +
                         std::to_string(c.system.dimension()) + " coordinates");
      if (!c.system.structure.contains(x, c.integrator.t0))
        throw UsageError("initial condition lies outside the domain of the system");
    }
    if (doc.contains("convergence_steps")) c.convergence_steps = vector_of(doc["convergence_steps"], "convergence_steps");
    c.samples = doc.value("samples", c.samples);
    c.seed = doc.value("seed", c.seed);
    c.time = doc.value("time", c.time);
    if (doc.contains("tolerance")) c.tolerance = doc["tolerance"].get<double>();
    c.drift_tolerance = doc.value("drift_tolerance", c.drift_tolerance);
    c.section = doc.value("section", std::string());
    if (doc.contains("lambda")) c.lambdas = lambdas_of(doc["lambda"]);
    if (doc.contains("base_points")) c.base_points = points_of(doc["base_points"], "base_points");
    for (const auto& b : c.base_points)
      if (b.size() + 1 != c.system.dimension()) throw UsageError("base points have n-1 coordinates");
    c.compare_closed_form = doc.value("compare_closed_form", c.compare_closed_form);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace nambu::cli
