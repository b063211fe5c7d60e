#include "nambu/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "nambu/error.hpp"

namespace nambu {

void IntegratorConfig::validate() const {
  if (!(t1 > t0)) throw InvalidArgument("integration span needs t1 > t0");
  if (stride < 1) throw InvalidArgument("sample stride must be >= 1");
  if (method == Method::Rk4Fixed) {
    if (!(step > 0.0)) throw InvalidArgument("fixed step must be positive");
  } else {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
    if (!(initial_step > 0.0) || !(min_step > 0.0) || !(max_step >= min_step))
      throw InvalidArgument("adaptive step bounds must satisfy 0 < min_step <= max_step");
  }
}

void Trajectory::add_diagnostic(const std::string& name,
                                const std::function<double(std::span<const double>, double)>& f) {
  diagnostic_names.push_back(name);
  diagnostics.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) diagnostics[k].push_back(f(states[k], times[k]));
}

std::vector<double> Trajectory::diagnostic(const std::string& name) const {
  auto it = std::find(diagnostic_names.begin(), diagnostic_names.end(), name);
  if (it == diagnostic_names.end()) throw InvalidArgument("no diagnostic named '" + name + "'");
  const auto j = static_cast<std::size_t>(it - diagnostic_names.begin());
  std::vector<double> out;
  out.reserve(diagnostics.size());
  for (const auto& row : diagnostics) out.push_back(row[j]);
  return out;
}

namespace {

using State = std::vector<double>;

class Stepper {
 public:
  Stepper(const VectorField& field, const DomainPredicate& domain, double last_valid)
      : field_(field), domain_(domain), last_valid_(last_valid) {}

  State operator()(const State& x, double t) const {
    bool finite = std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
    if (!finite || (domain_ && !domain_(x, t)))
      throw IntegrationError("trajectory left the domain after t = " + std::to_string(last_valid_), last_valid_);
    State k;
    try {
      k = field_(x, t);
    } catch (const DomainError& e) {
      throw IntegrationError(std::string("trajectory left the domain: ") + e.what(), last_valid_);
    }
    for (double v : k)
      if (!std::isfinite(v))
        throw IntegrationError("non-finite vector field value after t = " + std::to_string(last_valid_),
                               last_valid_);
    return k;
  }

  void set_last_valid(double t) { last_valid_ = t; }

 private:
  const VectorField& field_;
  const DomainPredicate& domain_;
  double last_valid_;
};

State axpy(const State& x, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State y = x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double s = 0.0;
    for (const auto& [c, k] : terms) s += c * (*k)[i];
    y[i] += h * s;
  }
  return y;
}

State rk4_step(const Stepper& f, const State& x, double t, double h) {
  const State k1 = f(x, t);
  const State k2 = f(axpy(x, h, {{0.5, &k1}}), t + 0.5 * h);
  const State k3 = f(axpy(x, h, {{0.5, &k2}}), t + 0.5 * h);
  const State k4 = f(axpy(x, h, {{1.0, &k3}}), t + h);
  return axpy(x, h, {{1.0 / 6.0, &k1}, {2.0 / 6.0, &k2}, {2.0 / 6.0, &k3}, {1.0 / 6.0, &k4}});
}

void check_state(const Stepper& f, const State& x, double t) { (void)f(x, t); }

Trajectory integrate_rk4(const VectorField& field, const State& x0, const IntegratorConfig& cfg,
                         const DomainPredicate& domain) {
  Stepper f(field, domain, cfg.t0);
  const double span = cfg.t1 - cfg.t0;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg.step - 1e-9)));
  const double h = span / static_cast<double>(steps);

  Trajectory traj;
  traj.times.push_back(cfg.t0);
  traj.states.push_back(x0);
  State x = x0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = cfg.t0 + static_cast<double>(k - 1) * h;
    x = rk4_step(f, x, t, h);
    const double t_next = k == steps ? cfg.t1 : cfg.t0 + static_cast<double>(k) * h;
    check_state(f, x, t_next);
    f.set_last_valid(t_next);
    if (k % cfg.stride == 0 || k == steps) {
      traj.times.push_back(t_next);
      traj.states.push_back(x);
    }
  }
  return traj;
}

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr std::array<std::array<double, 6>, 7> kA{{
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0},
}};
constexpr std::array<double, 7> kB5{35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
                                    11.0 / 84.0, 0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600.0, 0.0,           7571.0 / 16695.0, 393.0 / 640.0,
                                    -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};

Trajectory integrate_rk45(const VectorField& field, const State& x0, const IntegratorConfig& cfg,
                          const DomainPredicate& domain) {
  Stepper f(field, domain, cfg.t0);
  const std::size_t n = x0.size();

  Trajectory traj;
  traj.times.push_back(cfg.t0);
  traj.states.push_back(x0);

  State x = x0;
  double t = cfg.t0;
  double h = std::min({cfg.initial_step, cfg.max_step, cfg.t1 - cfg.t0});
  double previous_error = 1e-4;
  bool rejected = false;
  std::size_t accepted = 0;

  std::array<State, 7> k;
  k[0] = f(x, t);
  while (t < cfg.t1) {
    const double remaining = cfg.t1 - t;
    const bool last = h >= remaining;
    if (last) h = remaining;

    for (std::size_t s = 1; s < 7; ++s) {
      State y = x;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
        y[i] += h * acc;
      }
      k[s] = f(y, t + kC[s] * h);
    }
    State y5 = x;
    double err_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double hi = 0.0;
      double lo = 0.0;
      for (std::size_t s = 0; s < 7; ++s) {
        hi += kB5[s] * k[s][i];
        lo += kB4[s] * k[s][i];
      }
      y5[i] = x[i] + h * hi;
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x[i]), std::abs(y5[i]));
      const double e = h * (hi - lo) / scale;
      err_sq += e * e;
    }
    const double error = std::sqrt(err_sq / static_cast<double>(n));

    if (error <= 1.0) {
      t = last ? cfg.t1 : t + h;
      x = std::move(y5);
      k[0] = k[6];
      f.set_last_valid(t);
      ++accepted;
      if (accepted % cfg.stride == 0 || t >= cfg.t1) {
        traj.times.push_back(t);
        traj.states.push_back(x);
      }
      // PI controller (alpha = 0.17, beta = 0.04).
      double factor = error == 0.0 ? 10.0
                                   : 0.9 * std::pow(error, -0.17) * std::pow(std::max(previous_error, 1e-4), 0.04);
      factor = std::clamp(factor, 0.2, 10.0);
      if (rejected) factor = std::min(factor, 1.0);
      previous_error = std::max(error, 1e-4);
      rejected = false;
      if (!last) h = std::min(h * factor, cfg.max_step);
    } else {
      rejected = true;
      h *= std::max(0.2, 0.9 * std::pow(error, -0.2));
      if (h < cfg.min_step)
        throw IntegrationError("adaptive step fell below min_step at t = " + std::to_string(t), t);
    }
  }
  return traj;
}

}  // namespace

Trajectory integrate(const VectorField& field, std::span<const double> x0, const IntegratorConfig& config,
                     const DomainPredicate& domain) {
  config.validate();
  if (x0.size() != field.input_dimension() || field.output_dimension() != field.input_dimension())
    throw InvalidArgument("initial state dimension does not match the vector field");
  State start(x0.begin(), x0.end());
  if (domain && !domain(x0, config.t0))
    throw IntegrationError("initial state outside the domain", config.t0);
  return config.method == Method::Rk4Fixed ? integrate_rk4(field, start, config, domain)
                                           : integrate_rk45(field, start, config, domain);
}

std::map<std::string, Drift> conservation_report(const Trajectory& traj, std::span<const ScalarField> fields) {
  if (traj.size() == 0) throw InvalidArgument("empty trajectory");
  std::map<std::string, Drift> out;
  for (std::size_t j = 0; j < fields.size(); ++j) {
    const ScalarField& f = fields[j];
    Drift d;
    d.conserved_claim = !f.depends_on_time();
    const double start = f(traj.states.front(), traj.times.front());
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double drift = std::abs(f(traj.states[k], traj.times[k]) - start);
      d.max_drift = std::max(d.max_drift, drift);
      d.final_drift = drift;
    }
    std::string key = f.label().empty() ? "field" + std::to_string(j) : f.label();
    out[key] = d;
  }
  return out;
}

double convergence_order(const VectorField& field, std::span<const double> x0, double t1,
                         std::span<const double> steps, double t0) {
  if (steps.size() < 3) throw InvalidArgument("convergence_order needs at least 3 step sizes");
  std::vector<double> hs(steps.begin(), steps.end());
  std::sort(hs.begin(), hs.end(), std::greater<>());
  const double ratio = hs[1] / hs[0];
  for (std::size_t i = 1; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw InvalidArgument("step sizes must be positive");
    if (std::abs(hs[i] / hs[i - 1] - ratio) > 1e-6 * ratio)
      throw InvalidArgument("step sizes must be geometrically spaced");
  }

  auto solve = [&](double h) {
    IntegratorConfig cfg;
    cfg.method = Method::Rk4Fixed;
    cfg.t0 = t0;
    cfg.t1 = t1;
    cfg.step = h;
    cfg.stride = std::numeric_limits<std::size_t>::max();
    return integrate(field, x0, cfg).final_state();
  };

  const State half = solve(hs.back() / 2.0);
  const State quarter = solve(hs.back() / 4.0);
  State reference(quarter.size());
  for (std::size_t i = 0; i < quarter.size(); ++i) reference[i] = quarter[i] + (quarter[i] - half[i]) / 15.0;

  std::vector<double> lx;
  std::vector<double> ly;
  for (double h : hs) {
    const State y = solve(h);
    double e = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) e = std::max(e, std::abs(y[i] - reference[i]));
    if (e == 0.0) throw DegenerateInput("integration error is exactly zero; order is undefined");
    lx.push_back(std::log(h));
    ly.push_back(std::log(e));
  }
  const double m = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace nambu
