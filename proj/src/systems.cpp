#include "nambu/systems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "nambu/diff.hpp"
#include "nambu/error.hpp"

namespace nambu {

Coefficient::Coefficient(double value) : text(format_number(value)) {}
Coefficient::Coefficient(const char* expression) : text(expression) {}
Coefficient::Coefficient(std::string expression) : text(std::move(expression)) {}

TwoForm::TwoForm(std::string name, std::size_t dimension, std::vector<ScalarField> upper)
    : name_(std::move(name)), dimension_(dimension), upper_(std::move(upper)) {
  if (upper_.size() != dimension_ * (dimension_ - 1) / 2)
    throw InvalidArgument("two-form '" + name_ + "' needs n(n-1)/2 coefficients");
}

std::size_t TwoForm::slot(std::size_t i, std::size_t j) const {
  // Row-major index of (i, j), i < j, in the strict upper triangle.
  return i * dimension_ - i * (i + 1) / 2 + (j - i - 1);
}

ScalarField TwoForm::entry(std::size_t i, std::size_t j) const {
  if (i >= dimension_ || j >= dimension_) throw InvalidArgument("two-form index out of range");
  if (i == j) return ScalarField::constant(0.0, dimension_);
  if (i < j) return upper_[slot(i, j)];
  return -1.0 * upper_[slot(j, i)];
}

Matrix<double> TwoForm::at(std::span<const double> x, double t) const {
  Matrix<double> m(dimension_, dimension_);
  for (std::size_t i = 0; i < dimension_; ++i)
    for (std::size_t j = i + 1; j < dimension_; ++j) {
      const double w = upper_[slot(i, j)](x, t);
      m(i, j) = w;
      m(j, i) = -w;
    }
  return m;
}

std::vector<double> TwoForm::contract(std::span<const double> y, std::span<const double> x, double t) const {
  if (y.size() != dimension_) throw InvalidArgument("contraction with a vector of the wrong length");
  const Matrix<double> w = at(x, t);
  std::vector<double> out(dimension_, 0.0);
  for (std::size_t j = 0; j < dimension_; ++j)
    for (std::size_t i = 0; i < dimension_; ++i) out[j] += y[i] * w(i, j);
  return out;
}

double TwoForm::closedness_residual(std::span<const double> x, double t) const {
  const std::size_t n = dimension_;
  std::vector<std::vector<double>> grads(upper_.size());
  for (std::size_t s = 0; s < upper_.size(); ++s) grads[s] = gradient<double>(upper_[s], x, t);
  auto d = [&](std::size_t k, std::size_t i, std::size_t j) {
    return i < j ? grads[slot(i, j)][k] : -grads[slot(j, i)][k];
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        worst = std::max(worst, std::abs(d(i, j, k) + d(j, k, i) + d(k, i, j)));
  return worst;
}

const ScalarField& SystemPreset::scalar(const std::string& key) const {
  auto it = scalars.find(key);
  if (it == scalars.end()) throw InvalidArgument("unknown function '" + key + "' in system " + name);
  return it->second;
}

const VectorField& SystemPreset::vector_field(const std::string& key) const {
  auto it = vector_fields.find(key);
  if (it == vector_fields.end()) throw InvalidArgument("unknown vector field '" + key + "' in system " + name);
  return it->second;
}

const TwoForm& SystemPreset::form(const std::string& key) const {
  auto it = forms.find(key);
  if (it == forms.end()) throw InvalidArgument("unknown two-form '" + key + "' in system " + name);
  return it->second;
}

namespace {

struct Builder {
  SystemPreset& p;

  ScalarField parse(const std::string& text, const std::string& label) const {
    return ScalarField::parse(text, p.coordinates, p.coefficients, label);
  }
  void scalar(const std::string& key, const std::string& text) {
    p.scalar_names.push_back(key);
    p.scalars[key] = parse(text, key);
  }
  void vector(const std::string& key, const std::vector<std::string>& texts) {
    std::vector<ScalarField> comps;
    for (std::size_t i = 0; i < texts.size(); ++i) comps.push_back(parse(texts[i], key + "^" + std::to_string(i + 1)));
    p.vector_fields[key] = VectorField::from_components(std::move(comps), key);
  }
  void form(const std::string& key, const std::vector<std::string>& upper) {
    std::vector<ScalarField> entries;
    for (const auto& text : upper) entries.push_back(parse(text, key));
    p.forms[key] = TwoForm(key, p.dimension(), std::move(entries));
  }
  void rhs(const std::vector<std::string>& texts) {
    p.rhs_components.clear();
    for (std::size_t i = 0; i < texts.size(); ++i)
      p.rhs_components.push_back(parse(texts[i], "d" + p.coordinates[i] + "/dt"));
    p.rhs = VectorField::from_components(p.rhs_components, p.name + " rhs");
  }
};

}  // namespace

SystemPreset ks3_preset(double c0, const Coefficient& b1) {
  SystemPreset p;
  p.name = "ks3";
  p.coordinates = {"x", "v", "a"};
  p.coefficients = std::make_shared<CoefficientTable>();
  p.coefficients->set("c0", c0);
  p.coefficients->set("b1", std::string_view(b1.text));
  p.domain = [](std::span<const double> x, double) { return x.size() == 3 && x[1] != 0.0 && std::isfinite(x[1]); };
  p.structure = VolumeStructure::canonical(3, p.domain);

  Builder b{p};
  b.scalar("h1", "-2/v");
  b.scalar("h2", "-a/v^2");
  b.scalar("h3", "-a^2/(2*v^3) - 2*c0*v");
  // Images of h_i under the prolongation of x^2 d/dx to (x, v, a).
  b.scalar("hbar1", "4*x/v");
  b.scalar("hbar2", "2*a*x/v^2 - 2");
  b.scalar("hbar3", "a^2*x/v^3 - 2*a/v - 4*c0*x*v");
  b.scalar("hbb1", "-4*x^2/v");
  b.scalar("hbb2", "4*x - 2*a*x^2/v^2");
  b.scalar("hbb3", "-a^2*x^2/v^3 + 4*a*x/v - 4*v - 12*c0*x^2*v");
  b.scalar("h", "(-a^2/(2*v^3) - 2*c0*v) + b1*(-2/v)");
  b.scalar("hbar", "(a^2*x/v^3 - 2*a/v - 4*c0*x*v) + b1*(4*x/v)");
  p.hamiltonians = {p.scalars.at("h"), p.scalars.at("hbar")};

  b.vector("Y1", {"0", "0", "2*v"});
  b.vector("Y2", {"0", "v", "2*a"});
  b.vector("Y3", {"v", "a", "3/2*a^2/v - 2*c0*v^3"});
  b.rhs({"v", "a", "3/2*a^2/v - 2*c0*v^3 + 2*b1*v"});

  // Upper entries in the order (x,v), (x,a), (v,a).
  b.form("omega_3ks", {"0", "0", "1/v^3"});
  b.form("omega_zp", {"-2*a/v^3", "2/v^2", "-2*x/v^3"});
  b.form("omega_bb", {"4*x*a/v^3 + 4/v", "-4*x/v^2", "2*x^2/v^3"});

  for (int i = 1; i <= 3; ++i) {
    const std::string k = std::to_string(i);
    p.pairings.push_back({"omega_3ks", "Y" + k, "h" + k, -1.0});
    p.pairings.push_back({"omega_zp", "Y" + k, "hbar" + k, -1.0});
    p.pairings.push_back({"omega_bb", "Y" + k, "hbb" + k, -1.0});
  }

  p.sampler = [](Rng& rng) {
    const double x = rng.uniform(-1.0, 1.0);
    const double mag = rng.uniform(0.6, 2.0);
    const double v = rng.uniform() < 0.5 ? -mag : mag;
    const double a = rng.uniform(-1.0, 1.0);
    return std::vector<double>{x, v, a};
  };
  return p;
}

namespace {

std::string riccati_hamiltonian(std::size_t n, std::size_t l) {
  const std::string xl = "x" + std::to_string(l);
  std::string s0, s1, s2;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == l) continue;
    const std::string xk = "x" + std::to_string(k);
    const std::string den = k > l ? "(" + xl + " - " + xk + ")" : "(" + xk + " - " + xl + ")";
    const std::string plus = s0.empty() ? "" : " + ";
    s0 += plus + "1/" + den;
    s1 += plus + "(" + xl + " + " + xk + ")/" + den;
    s2 += plus + xl + "*" + xk + "/" + den;
  }
  return "a0*(" + s0 + ") + a1/2*(" + s1 + ") + a2*(" + s2 + ")";
}

}  // namespace

SystemPreset riccati_preset(std::size_t n, const Coefficient& a0, const Coefficient& a1, const Coefficient& a2) {
  if (n < 3) throw InvalidArgument("the Riccati system needs n >= 3");
  if (n > kMaxVariables) throw InvalidArgument("the Riccati system supports n <= 8");
  SystemPreset p;
  p.name = "riccati";
  p.coordinates = default_coordinates(n);
  p.coefficients = std::make_shared<CoefficientTable>();
  p.coefficients->set("a0", std::string_view(a0.text));
  p.coefficients->set("a1", std::string_view(a1.text));
  p.coefficients->set("a2", std::string_view(a2.text));
  p.domain = [n](std::span<const double> x, double) {
    if (x.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(x[i])) return false;
      for (std::size_t j = i + 1; j < n; ++j)
        if (x[i] == x[j]) return false;
    }
    return true;
  };
  p.structure = VolumeStructure::canonical(n, p.domain);

  Builder b{p};
  for (std::size_t l = 1; l < n; ++l) {
    b.scalar("h" + std::to_string(l), riccati_hamiltonian(n, l));
    p.hamiltonians.push_back(p.scalars.at("h" + std::to_string(l)));
  }
  std::vector<std::string> rhs;
  for (const auto& c : p.coordinates) rhs.push_back("a0 + a1*" + c + " + a2*" + c + "^2");
  b.rhs(rhs);

  for (std::size_t l = 1; l < n; ++l) {
    std::vector<std::string> upper;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) {
        const std::string xi = "x" + std::to_string(i);
        const std::string xj = "x" + std::to_string(j);
        upper.push_back(i == l || j == l ? "1/(" + xi + " - " + xj + ")^2" : "0");
      }
    b.form("omega" + std::to_string(l), upper);
  }

  p.sampler = [n](Rng& rng) {
    while (true) {
      std::vector<double> x = rng.point(n, -2.0, 2.0);
      bool separated = true;
      for (std::size_t i = 0; i < n && separated; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (std::abs(x[i] - x[j]) < 0.2) {
            separated = false;
            break;
          }
      if (separated) return x;
    }
  };
  return p;
}

SystemPreset custom_system(std::string name, std::vector<std::string> coordinates,
                           const std::map<std::string, std::string>& coefficients, const std::string& density,
                           const std::vector<std::string>& hamiltonians, const std::vector<std::string>& rhs,
                           const std::string& domain) {
  const std::size_t n = coordinates.size();
  if (n < 3 || n > kMaxVariables) throw InvalidArgument("system dimension must lie in [3, 8]");
  if (hamiltonians.size() + 1 != n) throw InvalidArgument("a system needs exactly n-1 Hamiltonians");
  if (!rhs.empty() && rhs.size() != n) throw InvalidArgument("rhs must have one component per coordinate");

  SystemPreset p;
  p.name = std::move(name);
  p.coordinates = std::move(coordinates);
  p.coefficients = std::make_shared<CoefficientTable>();
  for (const auto& [key, text] : coefficients) p.coefficients->set(key, std::string_view(text));

  if (!domain.empty()) {
    const ScalarField d = ScalarField::parse(domain, p.coordinates, p.coefficients, "domain");
    p.domain = [d](std::span<const double> x, double t) {
      try {
        const double v = d(x, t);
        return std::isfinite(v) && v != 0.0;
      } catch (const DomainError&) {
        return false;
      }
    };
  }
  const ScalarField rho =
      ScalarField::parse(density.empty() ? "1" : density, p.coordinates, p.coefficients, "rho");
  p.structure = VolumeStructure(n, rho, p.domain);

  Builder b{p};
  for (std::size_t i = 0; i < hamiltonians.size(); ++i) {
    const std::string key = "H" + std::to_string(i + 1);
    b.scalar(key, hamiltonians[i]);
    p.hamiltonians.push_back(p.scalars.at(key));
  }
  if (!rhs.empty()) b.rhs(rhs);

  const VolumeStructure s = p.structure;
  p.sampler = [s, n](Rng& rng) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      std::vector<double> x = rng.point(n, -1.0, 1.0);
      if (s.contains(x, 0.0)) return x;
    }
    throw DegenerateInput("could not sample a point inside the domain");
  };
  return p;
}

SystemPreset preset_by_name(const std::string& name) {
  if (name == "ks3") return ks3_preset();
  if (name == "riccati") return riccati_preset(3, 1.0, 0.0, 0.0);
  throw InvalidArgument("unknown system '" + name + "'");
}

namespace {

double covector_gap(std::span<const double> a, std::span<const double> b, double sign) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - sign * b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double pairing_residual(const SystemPreset& p, const std::string& form, const std::string& field,
                        const ScalarField& fn, std::span<const double> x, double t) {
  const TwoForm& w = p.form(form);
  const VectorField& y = p.vector_field(field);
  if (!p.in_domain(x, t)) throw DomainError("point outside the domain of " + p.name);
  const std::vector<double> lhs = w.contract(y(x, t), x, t);
  return covector_gap(lhs, gradient<double>(fn, x, t), 1.0);
}

double pairing_residual(const SystemPreset& p, const Pairing& pairing, std::span<const double> x, double t) {
  const TwoForm& w = p.form(pairing.form);
  const VectorField& y = p.vector_field(pairing.field);
  const ScalarField& fn = p.scalar(pairing.function);
  if (!p.in_domain(x, t)) throw DomainError("point outside the domain of " + p.name);
  const std::vector<double> lhs = w.contract(y(x, t), x, t);
  return covector_gap(lhs, gradient<double>(fn, x, t), pairing.sign);
}

double presymplectic_bracket(const TwoForm& w, const ScalarField& f, const ScalarField& g, std::span<const double> x,
                             double t) {
  const std::size_t n = w.dimension();
  const Matrix<double> m = w.at(x, t);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  const std::vector<double> dg = gradient<double>(g, x, t);
  const std::vector<double> df = gradient<double>(f, x, t);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = dg[i];
  // (i_X w)_j = sum_i X^i w_ij = -(W X)_j, so i_X w = -dg reads W X = dg.
  const Eigen::VectorXd xg = a.completeOrthogonalDecomposition().solve(rhs);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += df[i] * xg(static_cast<Eigen::Index>(i));
  return -s;
}

std::map<std::string, double> ks3_sl2_check(const SystemPreset& p, std::span<const double> x, double t) {
  if (p.name != "ks3") throw InvalidArgument("sl(2) check applies to the ks3 system");
  if (!p.in_domain(x, t)) throw DomainError("point outside the domain of ks3 (v = 0)");
  std::map<std::string, double> out;
  auto relation = [&](const std::string& form, const std::string& prefix) {
    const TwoForm& w = p.form(form);
    const ScalarField& f1 = p.scalar(prefix + "1");
    const ScalarField& f2 = p.scalar(prefix + "2");
    const ScalarField& f3 = p.scalar(prefix + "3");
    const std::string a = prefix + "1", b = prefix + "2", c = prefix + "3";
    out["{" + a + "," + b + "}-" + a] = std::abs(presymplectic_bracket(w, f1, f2, x, t) - f1(x, t));
    out["{" + a + "," + c + "}-2" + b] = std::abs(presymplectic_bracket(w, f1, f3, x, t) - 2.0 * f2(x, t));
    out["{" + b + "," + c + "}-" + c] = std::abs(presymplectic_bracket(w, f2, f3, x, t) - f3(x, t));
  };
  relation("omega_3ks", "h");
  relation("omega_zp", "hbar");

  const VectorField& y1 = p.vector_field("Y1");
  const VectorField& y2 = p.vector_field("Y2");
  const VectorField& y3 = p.vector_field("Y3");
  auto commutator = [&](const VectorField& a, const VectorField& b, const VectorField& c, double k) {
    const std::vector<double> lb = lie_bracket(a, b, x, t);
    const std::vector<double> target = c(x, t);
    return covector_gap(lb, target, k);
  };
  out["[Y1,Y3]-2Y2"] = commutator(y1, y3, y2, 2.0);
  out["[Y1,Y2]-Y1"] = commutator(y1, y2, y1, 1.0);
  out["[Y2,Y3]-Y3"] = commutator(y2, y3, y3, 1.0);
  return out;
}

namespace {

constexpr double kStationary = 1e-12;
constexpr double kUsable = 1e-6;

// Ratio of canonical bracket to rhs on any carrier. The component is chosen
// from the plain values so that every carrier uses the same one. Returns
// false at stationary points.
template <class C>
bool density_ratio(const VolumeStructure& canonical, std::span<const ScalarField> hs,
                   std::span<const ScalarField> rhs, std::span<const C> x, double t, C& rho, std::size_t& index,
                   double* spread) {
  const std::size_t n = rhs.size();
  std::vector<C> r;
  r.reserve(n);
  double top = 0.0;
  for (const auto& f : rhs) {
    r.push_back(f(x, t));
    top = std::max(top, std::abs(value_of(r.back())));
  }
  if (!(top > kStationary)) return false;
  const std::vector<C> brackets = hamiltonian_components<C>(canonical, hs, x, t);
  index = n;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(value_of(r[i])) > kUsable * top) {
      index = i;
      break;
    }
  rho = brackets[index] / r[index];
  if (spread) {
    const double base = value_of(rho);
    *spread = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(std::abs(value_of(r[j])) > kUsable * top)) continue;
      const double ratio = value_of(brackets[j]) / value_of(r[j]);
      *spread = std::max(*spread, std::abs(ratio - base) / std::abs(base));
    }
  }
  return true;
}

void require_rhs(const SystemPreset& p) {
  if (!p.has_rhs()) throw InvalidArgument("system " + p.name + " has no first-order rhs");
}

}  // namespace

DensityEstimate derive_density(const SystemPreset& p, std::span<const double> x, double t) {
  require_rhs(p);
  if (!p.in_domain(x, t)) throw DomainError("point outside the domain of " + p.name);
  DensityEstimate est;
  double rho = 0.0;
  if (!density_ratio<double>(p.structure, p.hamiltonians, p.rhs_components, x, t, rho, est.index, &est.spread))
    throw DegenerateInput("stationary point: every rhs component vanishes");
  if (rho == 0.0 || !std::isfinite(rho)) throw DegenerateInput("derived density is zero or non-finite here");
  est.rho = rho;
  return est;
}

VolumeStructure derived_structure(const SystemPreset& p) {
  require_rhs(p);
  const VolumeStructure canonical = p.structure;
  const std::vector<ScalarField> hs = p.hamiltonians;
  const std::vector<ScalarField> rhs = p.rhs_components;
  bool time_dependent = false;
  for (const auto& f : hs) time_dependent = time_dependent || f.depends_on_time();
  for (const auto& f : rhs) time_dependent = time_dependent || f.depends_on_time();
  auto density = [canonical, hs, rhs](auto x, double t) {
    using C = typename decltype(x)::value_type;
    C rho(0.0);
    std::size_t index = 0;
    if (!density_ratio<C>(canonical, hs, rhs, x, t, rho, index, nullptr)) return C(0.0);
    return rho;
  };
  return VolumeStructure(p.dimension(), ScalarField::native<1>(p.dimension(), "rho*", density, time_dependent),
                         p.domain);
}

VectorField derived_nambu_field(const SystemPreset& p) {
  return hamiltonian_vector_field(HamiltonianTuple(derived_structure(p), p.hamiltonians));
}

std::vector<double> riccati_bracket_recovery(const SystemPreset& p, std::span<const double> x, double t) {
  const DensityEstimate est = derive_density(p, x, t);
  const std::vector<double> brackets = hamiltonian_components<double>(p.structure, p.hamiltonians, x, t);
  std::vector<double> out(brackets.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = brackets[k] / est.rho - p.rhs_components[k](x, t);
  return out;
}

double ks3_closed_form_density_ratio(const SystemPreset& p, std::span<const double> x, double t) {
  if (p.name != "ks3") throw InvalidArgument("the closed-form density comparison applies to the ks3 system");
  const DensityEstimate est = derive_density(p, x, t);
  const double v = x[1];
  const double a = x[2];
  const double b1 = p.coefficients->value("b1", t);
  const double closed = std::pow(std::abs(a * a / (v * v) + 4.0 * b1), 1.5) / std::pow(v, 6);
  return closed / std::abs(est.rho);
}

}  // namespace nambu
