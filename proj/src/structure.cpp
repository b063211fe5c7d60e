#include "nambu/structure.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace nambu {

VolumeStructure::VolumeStructure(std::size_t dimension, ScalarField density, DomainPredicate domain)
    : dimension_(dimension), density_(std::move(density)), domain_(std::move(domain)) {
  if (dimension_ < 3) throw InvalidArgument("a volume Nambu-Poisson structure needs n >= 3");
  if (dimension_ > kMaxVariables) throw InvalidArgument("dimension exceeds the jet capacity");
  if (density_.dimension() != dimension_) throw InvalidArgument("density dimension differs from n");
}

VolumeStructure VolumeStructure::canonical(std::size_t dimension, DomainPredicate domain) {
  return VolumeStructure(dimension, ScalarField::constant(1.0, dimension), std::move(domain));
}

bool VolumeStructure::contains(std::span<const double> x, double t) const {
  if (x.size() != dimension_) return false;
  for (double v : x)
    if (!std::isfinite(v)) return false;
  if (domain_ && !domain_(x, t)) return false;
  try {
    const double rho = density_(x, t);
    return std::isfinite(rho) && rho != 0.0;
  } catch (const DomainError&) {
    return false;
  }
}

void VolumeStructure::require(std::span<const double> x, double t) const {
  if (x.size() != dimension_)
    throw InvalidArgument("point of dimension " + std::to_string(x.size()) + " for a structure of dimension " +
                          std::to_string(dimension_));
  if (!contains(x, t)) throw DomainError("point outside the domain of the structure");
}

VolumeStructure VolumeStructure::scaled(double factor) const {
  return VolumeStructure(dimension_, factor * density_, domain_);
}

HamiltonianTuple::HamiltonianTuple(VolumeStructure structure, std::vector<ScalarField> fields)
    : structure_(std::move(structure)), fields_(std::move(fields)) {
  if (fields_.size() + 1 != structure_.dimension())
    throw InvalidArgument("a Hamiltonian tuple has exactly n-1 fields");
  for (const auto& f : fields_)
    if (f.dimension() != structure_.dimension()) throw InvalidArgument("Hamiltonian dimension differs from n");
}

double bracket(const VolumeStructure& s, std::span<const ScalarField> fs, std::span<const double> x, double t) {
  s.require(x, t);
  return bracket_value<double>(s, fs, x, t);
}

VectorField sharp_basis(const VolumeStructure& s, std::size_t omit) {
  const std::size_t n = s.dimension();
  if (omit >= n) throw InvalidArgument("sharp_basis index out of range");
  const double sign = (n - 1 - omit) % 2 == 0 ? 1.0 : -1.0;
  auto f = [s, omit, sign, n](auto x, double t) {
    using C = typename decltype(x)::value_type;
    std::vector<C> out(n, C(0.0));
    out[omit] = C(sign) / s.density()(x, t);
    return out;
  };
  return VectorField::make<1>(n, n, "sharp(d^" + std::to_string(omit + 1) + ")", f);
}

VectorField hamiltonian_vector_field(const HamiltonianTuple& h) {
  const VolumeStructure& s = h.structure();
  std::vector<ScalarField> hs(h.fields().begin(), h.fields().end());
  auto f = [s, hs](auto x, double t) {
    using C = typename decltype(x)::value_type;
    if constexpr (std::is_same_v<C, double>) s.require(x, t);
    return hamiltonian_components<C>(s, hs, x, t);
  };
  std::string label = "X(";
  for (std::size_t i = 0; i < hs.size(); ++i) label += (i ? "," : "") + hs[i].label();
  label += ")";
  return VectorField::make<1>(s.dimension(), s.dimension(), label, f);
}

namespace {

// X_f g as a scalar field: the bracket {f_1, .., f_{n-1}, g}.
ScalarField applied_field(const VolumeStructure& s, std::vector<ScalarField> fs, const ScalarField& g) {
  fs.push_back(g);
  auto f = [s, fs](auto x, double t) {
    using C = typename decltype(x)::value_type;
    return bracket_value<C>(s, fs, x, t);
  };
  return ScalarField::native<1>(s.dimension(), "X" + g.label(), f);
}

}  // namespace

double fundamental_identity_residual(const VolumeStructure& s, std::span<const ScalarField> fs,
                                     std::span<const ScalarField> gs, std::span<const double> x, double t) {
  const std::size_t n = s.dimension();
  if (fs.size() + 1 != n || gs.size() != n)
    throw InvalidArgument("fundamental identity needs n-1 and n functions");
  s.require(x, t);

  const std::vector<double> flow = hamiltonian_components<double>(s, fs, x, t);
  double speed = 0.0;
  for (double v : flow) speed = std::max(speed, std::abs(v));

  double lhs = 0.0;
  if (speed > 0.0) {
    double scale = 1.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    const double h = 1e-3 * scale / speed;
    std::vector<double> p(n);
    auto bracket_at = [&](double step) {
      for (std::size_t i = 0; i < n; ++i) p[i] = x[i] + step * flow[i];
      return bracket(s, gs, p, t);
    };
    auto central = [&](double step) { return (bracket_at(step) - bracket_at(-step)) / (2.0 * step); };
    const double coarse = central(h);
    const double fine = central(h / 2.0);
    lhs = (4.0 * fine - coarse) / 3.0;
  }

  std::vector<ScalarField> f_list(fs.begin(), fs.end());
  double rhs = 0.0;
  std::vector<ScalarField> args(gs.begin(), gs.end());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ScalarField> replaced = args;
    replaced[i] = applied_field(s, f_list, gs[i]);
    rhs += bracket_value<double>(s, replaced, x, t);
  }
  return lhs - rhs;
}

double leibniz_residual(const VolumeStructure& s, const ScalarField& f, const ScalarField& g,
                        std::span<const ScalarField> rest, std::span<const double> x, double t) {
  if (rest.size() + 1 != s.dimension()) throw InvalidArgument("Leibniz residual needs n-1 remaining arguments");
  s.require(x, t);
  auto with_first = [&](const ScalarField& first) {
    std::vector<ScalarField> args{first};
    args.insert(args.end(), rest.begin(), rest.end());
    return bracket_value<double>(s, args, x, t);
  };
  const double fv = f(x, t);
  const double gv = g(x, t);
  return with_first(f * g) - fv * with_first(g) - gv * with_first(f);
}

double divergence(const VolumeStructure& s, const VectorField& field, std::span<const double> x, double t) {
  const std::size_t n = s.dimension();
  if (field.input_dimension() != n || field.output_dimension() != n)
    throw InvalidArgument("divergence needs a vector field on the structure's space");
  s.require(x, t);
  auto seeded = seed<double>(x);
  std::span<const Jet1> xs(seeded);
  const std::vector<Jet1> comps = field(xs, t);
  const Jet1 rho = s.density()(xs, t);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Jet1 flux = rho * comps[i];
    if (i < flux.size()) sum += flux.d[i];
  }
  return sum / rho.value;
}

}  // namespace nambu
