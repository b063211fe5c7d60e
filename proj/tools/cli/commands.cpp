#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>

#include "cli/report.hpp"
#include "nambu/hj.hpp"
#include "nambu/random.hpp"

namespace nambu::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::filesystem::path out_dir(const Options& o) { return o.out ? std::filesystem::path(*o.out) : "."; }

std::uint64_t seed_of(const RunConfig& c, const Options& o) { return o.seed.value_or(c.seed); }

double tolerance_or(const RunConfig& c, double fallback) { return c.tolerance.value_or(fallback); }

void emit(const json& report, const std::vector<Check>& checks, const Options& o, std::ostream& out,
          const std::string& stem) {
  const std::string text = o.format == "csv" ? checks_csv(checks).str() : report.dump(2) + "\n";
  out << text;
  if (o.out) write_file(out_dir(o) / (stem + (o.format == "csv" ? ".csv" : ".json")), text);
}

int verdict(const std::vector<Check>& checks) { return all_pass(checks) ? kPass : kCheckFailure; }

struct FlowChoice {
  std::string name;
  VectorField field;
  VolumeStructure structure;
};

FlowChoice choose_flow(const RunConfig& c) {
  const SystemPreset& p = c.system;
  const std::string name = c.field.empty() ? (p.has_rhs() ? "rhs" : "hamiltonian") : c.field;
  if (name == "rhs") return {name, p.rhs, derived_structure(p)};
  if (name == "nambu") return {name, derived_nambu_field(p), derived_structure(p)};
  return {name, hamiltonian_vector_field(p.tuple()), p.structure};
}

std::vector<std::string> base_coordinates(const SystemPreset& p) {
  return {p.coordinates.begin(), p.coordinates.end() - 1};
}

std::vector<std::vector<double>> base_grid(const RunConfig& c, Rng& rng) {
  if (!c.base_points.empty()) return c.base_points;
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < c.samples; ++k) out.push_back(project(c.system.sampler(rng)));
  return out;
}

std::string strip_assignment(const std::string& text) {
  const auto eq = text.find('=');
  return eq == std::string::npos ? text : text.substr(eq + 1);
}

/// Section parsed over the base coordinates with `lambda` bound to a value.
Section parse_section(const SystemPreset& p, const std::string& text, std::optional<double> lambda) {
  auto table = std::make_shared<CoefficientTable>(*p.coefficients);
  if (lambda) table->set("lambda", *lambda);
  const auto coords = base_coordinates(p);
  return Section(ScalarField::parse(strip_assignment(text), coords, table, "gamma"));
}

// verify suites

std::vector<Check> suite_bracket(const RunConfig& c, Rng& rng) {
  const SystemPreset& p = c.system;
  const VolumeStructure& s = p.structure;
  const std::size_t n = p.dimension();
  const double t = c.time;
  double antisym = 0.0, leibniz = 0.0, conserved = 0.0;
  for (std::size_t k = 0; k < c.samples; ++k) {
    const auto x = p.sampler(rng);
    const ScalarField f = random_polynomial(rng, p.coordinates, 4, 3);
    const ScalarField g = random_polynomial(rng, p.coordinates, 4, 3);
    std::vector<ScalarField> args = p.hamiltonians;
    args.push_back(f);
    const double b = bracket(s, args, x, t);
    std::swap(args.front(), args.back());
    antisym = std::max(antisym, std::abs(b + bracket(s, args, x, t)));

    std::vector<ScalarField> with_f = p.hamiltonians, with_g = p.hamiltonians;
    with_f.insert(with_f.begin(), f);
    with_g.insert(with_g.begin(), g);
    const double scale =
        1.0 + std::abs(f(x, t) * bracket(s, with_g, x, t)) + std::abs(g(x, t) * bracket(s, with_f, x, t));
    leibniz = std::max(leibniz, std::abs(leibniz_residual(s, f, g, p.hamiltonians, x, t)) / scale);

    const auto comps = hamiltonian_components<double>(s, p.hamiltonians, x, t);
    for (const auto& h : p.hamiltonians) {
      const auto dh = gradient<double>(h, x, t);
      double dot = 0.0, mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += dh[i] * comps[i];
        mag += std::abs(dh[i] * comps[i]);
      }
      conserved = std::max(conserved, std::abs(dot) / std::max(1.0, mag));
    }
  }
  return {make_check("antisymmetry", c.samples, antisym, 0.0),
          make_check("leibniz (relative)", c.samples, leibniz, tolerance_or(c, 1e-9)),
          make_check("conservation of generators (relative)", c.samples, conserved, 1e-10)};
}

std::vector<Check> suite_fi(const RunConfig& c, Rng& rng) {
  const SystemPreset& p = c.system;
  const std::size_t n = p.dimension();
  double worst = 0.0;
  for (std::size_t k = 0; k < c.samples; ++k) {
    const auto x = p.sampler(rng);
    std::vector<ScalarField> fs, gs;
    for (std::size_t i = 0; i + 1 < n; ++i) fs.push_back(random_polynomial(rng, p.coordinates, 3, 2));
    for (std::size_t i = 0; i < n; ++i) gs.push_back(random_polynomial(rng, p.coordinates, 3, 2));
    worst = std::max(worst, std::abs(fundamental_identity_residual(p.structure, fs, gs, x, c.time)));
  }
  return {make_check("fundamental identity", c.samples, worst, tolerance_or(c, 1e-6))};
}

std::vector<Check> suite_hj(const RunConfig& c, Rng& rng) {
  if (c.section.empty()) throw UsageError("the hj suite needs a section");
  const SystemPreset& p = c.system;
  const Section gamma =
      parse_section(p, c.section, c.lambdas.empty() ? std::nullopt : std::optional<double>(c.lambdas.front()));
  const HamiltonianTuple h = p.tuple();
  const auto grid = base_grid(c, rng);
  double det = 0.0, rel = 0.0, agree = 0.0;
  for (const auto& b : grid) {
    det = std::max(det, std::abs(hj_det_residual(h, gamma, b, c.time)));
    const double r = relatedness_residual(h, gamma, b, c.time);
    rel = std::max(rel, r);
    agree = std::max(agree, std::abs(std::abs(hj_sum_residual(h, gamma, b, c.time)) - r));
  }
  const double tol = tolerance_or(c, 1e-8);
  return {make_check("hj determinant", grid.size(), det, tol), make_check("relatedness", grid.size(), rel, tol),
          make_check("sum residual matches relatedness", grid.size(), agree, 1e-8)};
}

std::vector<Check> suite_lagrangian(const RunConfig& c, Rng& rng) {
  const SystemPreset& p = c.system;
  const std::size_t n = p.dimension();
  const auto base = base_coordinates(p);
  std::optional<Section> fixed;
  if (!c.section.empty())
    fixed = parse_section(p, c.section, c.lambdas.empty() ? std::nullopt : std::optional<double>(c.lambdas.front()));
  double not_flagged = 0.0, wrong_dims = 0.0, codim2_flagged = 0.0;
  for (std::size_t k = 0; k < c.samples; ++k) {
    const auto x = p.sampler(rng);
    const Section sec = fixed ? *fixed : Section(random_polynomial(rng, base, 4, 3));
    const auto r = lagrangian_check(p.structure, sec, project(x), c.time);
    if (!r.lagrangian) not_flagged += 1;
    bool dims = r.level(n - 1).dimension == n - 1;
    for (std::size_t j = 1; j + 1 < n; ++j) dims = dims && r.level(j).dimension == 0;
    if (!dims) wrong_dims += 1;

    std::vector<std::vector<double>> basis;
    for (std::size_t i = 0; i + 2 < n; ++i) basis.push_back(rng.point(n, -1, 1));
    if (lagrangian_check_subspace(p.structure, x, basis, c.time).lagrangian) codim2_flagged += 1;
  }
  return {make_check("codimension-1 graphs flagged lagrangian (failures)", c.samples, not_flagged, 0.0),
          make_check("annihilator dimensions (failures)", c.samples, wrong_dims, 0.0),
          make_check("codimension-2 subspaces flagged non-lagrangian (failures)", c.samples, codim2_flagged, 0.0)};
}

std::vector<Check> suite_system(const RunConfig& c, Rng& rng) {
  const SystemPreset& p = c.system;
  const double t = c.time;
  std::vector<std::vector<double>> points;
  for (std::size_t k = 0; k < c.samples; ++k) points.push_back(p.sampler(rng));
  std::vector<Check> checks;

  for (const auto& [name, form] : p.forms) {
    double closed = 0.0, anti = 0.0;
    for (const auto& x : points) {
      closed = std::max(closed, form.closedness_residual(x, t));
      const auto m = form.at(x, t);
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) anti = std::max(anti, std::abs(m(i, j) + m(j, i)));
    }
    checks.push_back(make_check("antisymmetry " + name, points.size(), anti, 0.0));
    checks.push_back(make_check("closedness " + name, points.size(), closed, 1e-6));
  }

  if (p.name == "ks3") {
    const bool all_forms = p.coefficients->value("c0", t) == 0.0;
    double pair = 0.0, sl2 = 0.0, comm = 0.0;
    for (const auto& x : points) {
      for (const auto& pairing : p.pairings)
        if (all_forms || pairing.form == "omega_3ks") pair = std::max(pair, pairing_residual(p, pairing, x, t));
      for (const auto& [key, r] : ks3_sl2_check(p, x, t)) {
        if (key.front() == '[')
          comm = std::max(comm, r);
        else
          sl2 = std::max(sl2, r);
      }
    }
    checks.push_back(make_check(all_forms ? "pairings" : "pairings (omega_3ks only, c0 != 0)", points.size(), pair,
                                1e-9));
    checks.push_back(make_check("sl2 function brackets", points.size(), sl2, 1e-9));
    checks.push_back(make_check("vector field commutators", points.size(), comm, 1e-8));
  }

  if (p.has_rhs()) {
    double spread = 0.0, recovery = 0.0;
    std::size_t used = 0;
    for (const auto& x : points) {
      try {
        spread = std::max(spread, derive_density(p, x, t).spread);
        if (p.name == "riccati") {
          const auto r = riccati_bracket_recovery(p, x, t);
          const auto f = p.rhs(x, t);
          double rn = 0.0, fn = 0.0;
          for (std::size_t i = 0; i < r.size(); ++i) {
            rn = std::max(rn, std::abs(r[i]));
            fn = std::max(fn, std::abs(f[i]));
          }
          recovery = std::max(recovery, rn / fn);
        }
        ++used;
      } catch (const DegenerateInput&) {
      }
    }
    checks.push_back(make_check("density spread", used, spread, 1e-6));
    if (p.name == "riccati") checks.push_back(make_check("bracket recovery (relative)", used, recovery, 1e-6));
  }
  return checks;
}

}  // namespace

int cmd_simulate(const RunConfig& c, const Options& o, std::ostream& out) {
  if (c.initial_conditions.empty()) throw UsageError("simulate needs at least one initial condition");
  const SystemPreset& p = c.system;
  const FlowChoice flow = choose_flow(c);
  const bool csv = o.format == "csv";
  json runs = json::array();
  std::vector<Check> checks;

  for (std::size_t k = 0; k < c.initial_conditions.size(); ++k) {
    const auto& x0 = c.initial_conditions[k];
    Trajectory traj = integrate(flow.field, x0, c.integrator, p.domain);
    for (const auto& h : p.hamiltonians) traj.add_diagnostic(h.label(), [&h](auto x, double t) { return h(x, t); });
    traj.add_diagnostic("divergence", [&flow](std::span<const double> x, double t) {
      try {
        return divergence(flow.structure, flow.field, x, t);
      } catch (const DomainError&) {
        return kNaN;
      }
    });

    std::vector<std::string> header{"t"};
    header.insert(header.end(), p.coordinates.begin(), p.coordinates.end());
    header.insert(header.end(), traj.diagnostic_names.begin(), traj.diagnostic_names.end());
    const std::string file = "trajectory_" + std::to_string(k) + (csv ? ".csv" : ".json");
    if (csv) {
      CsvTable table(header);
      for (std::size_t s = 0; s < traj.size(); ++s) {
        std::vector<double> row{traj.times[s]};
        row.insert(row.end(), traj.states[s].begin(), traj.states[s].end());
        row.insert(row.end(), traj.diagnostics[s].begin(), traj.diagnostics[s].end());
        table.add_row(row);
      }
      write_file(out_dir(o) / file, table.str());
    } else {
      json rows = json::array();
      for (std::size_t s = 0; s < traj.size(); ++s) {
        json row = json::array({traj.times[s]});
        for (double v : traj.states[s]) row.push_back(v);
        for (double v : traj.diagnostics[s]) row.push_back(v);
        rows.push_back(row);
      }
      write_file(out_dir(o) / file, json{{"columns", header}, {"rows", rows}}.dump() + "\n");
    }

    json run;
    run["index"] = k;
    run["file"] = file;
    run["initial_condition"] = x0;
    run["final_time"] = traj.times.back();
    run["final_state"] = traj.final_state();
    run["samples"] = traj.size();
    json drift = json::object();
    for (const auto& [label, d] : conservation_report(traj, p.hamiltonians)) {
      drift[label] = {{"max", d.max_drift}, {"final", d.final_drift}, {"conserved_claim", d.conserved_claim}};
      if (d.conserved_claim)
        checks.push_back(make_check("drift " + label + " (run " + std::to_string(k) + ")", traj.size(), d.max_drift,
                                    c.drift_tolerance));
    }
    run["drift"] = drift;
    if (!c.convergence_steps.empty())
      run["convergence_order"] =
          convergence_order(flow.field, x0, c.integrator.t1, c.convergence_steps, c.integrator.t0);
    runs.push_back(run);
  }

  const json report = report_json(p.name, "simulate", checks, {{"field", flow.name}, {"runs", runs}});
  write_file(out_dir(o) / "summary.json", report.dump(2) + "\n");
  out << (csv ? checks_csv(checks).str() : report.dump(2) + "\n");
  return verdict(checks);
}

int cmd_verify(const RunConfig& c, const std::string& suite, const Options& o, std::ostream& out) {
  Rng rng(seed_of(c, o));
  std::vector<Check> checks;
  if (suite == "bracket")
    checks = suite_bracket(c, rng);
  else if (suite == "fi")
    checks = suite_fi(c, rng);
  else if (suite == "hj")
    checks = suite_hj(c, rng);
  else if (suite == "lagrangian")
    checks = suite_lagrangian(c, rng);
  else if (suite == "system")
    checks = suite_system(c, rng);
  else
    throw UsageError("unknown suite '" + suite + "'");
  const json report = report_json(c.system.name, "verify " + suite, checks, {{"seed", seed_of(c, o)}});
  emit(report, checks, o, out, "report");
  return verdict(checks);
}

int cmd_derive_density(const RunConfig& c, const Options& o, std::ostream& out) {
  const SystemPreset& p = c.system;
  if (!p.has_rhs()) throw UsageError("derive-density needs a system with a right-hand side");
  const bool ratio = c.compare_closed_form && p.name == "ks3";
  std::vector<std::string> header{"t"};
  header.insert(header.end(), p.coordinates.begin(), p.coordinates.end());
  header.insert(header.end(), {"rho", "spread", "index"});
  if (ratio) header.push_back("closed_form_ratio");
  CsvTable table(header);

  Rng rng(seed_of(c, o));
  std::size_t skipped = 0;
  double spread = 0.0;
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
  for (std::size_t k = 0; k < c.samples; ++k) {
    const auto x = p.sampler(rng);
    DensityEstimate est;
    try {
      est = derive_density(p, x, c.time);
    } catch (const DegenerateInput&) {
      ++skipped;
      continue;
    }
    spread = std::max(spread, est.spread);
    std::vector<double> row{c.time};
    row.insert(row.end(), x.begin(), x.end());
    row.insert(row.end(), {est.rho, est.spread, static_cast<double>(est.index)});
    if (ratio) {
      const double r = ks3_closed_form_density_ratio(p, x, c.time);
      ratio_min = std::min(ratio_min, r);
      ratio_max = std::max(ratio_max, r);
      row.push_back(r);
    }
    table.add_row(row);
  }
  write_file(out_dir(o) / "density.csv", table.str());

  const std::vector<Check> checks{make_check("density spread", table.rows(), spread, tolerance_or(c, 1e-6))};
  json extra{{"file", "density.csv"}, {"requested", c.samples}, {"skipped", skipped}, {"seed", seed_of(c, o)}};
  if (ratio && table.rows() > 0) extra["closed_form_ratio"] = {{"min", ratio_min}, {"max", ratio_max}};
  const json report = report_json(p.name, "derive-density", checks, extra);
  emit(report, checks, o, out, "density_summary");
  return verdict(checks);
}

int cmd_hj_scan(const RunConfig& c, const Options& o, std::ostream& out) {
  if (c.section.empty()) throw UsageError("hj-scan needs a section");
  if (c.lambdas.empty()) throw UsageError("hj-scan needs a non-empty lambda range");
  const SystemPreset& p = c.system;
  parse_section(p, c.section, 0.0);
  Rng rng(seed_of(c, o));
  const auto grid = base_grid(c, rng);
  const HamiltonianTuple h = p.tuple();
  const double tol = tolerance_or(c, 1e-8);

  std::vector<std::string> header{"t", "lambda"};
  const auto base = base_coordinates(p);
  header.insert(header.end(), base.begin(), base.end());
  header.insert(header.end(), {"hj_det", "relatedness"});
  CsvTable table(header);
  std::vector<Check> checks;
  for (double lambda : c.lambdas) {
    const Section gamma = parse_section(p, c.section, lambda);
    double worst = 0.0;
    for (const auto& b : grid) {
      const double det = hj_det_residual(h, gamma, b, c.time);
      const double rel = relatedness_residual(h, gamma, b, c.time);
      worst = std::max(worst, std::abs(det));
      std::vector<double> row{c.time, lambda};
      row.insert(row.end(), b.begin(), b.end());
      row.insert(row.end(), {det, rel});
      table.add_row(row);
    }
    checks.push_back(make_check("hj lambda=" + format_number(lambda), grid.size(), worst, tol));
  }
  write_file(out_dir(o) / "hj_scan.csv", table.str());

  const CompleteSolution cs{[&p, &c](double lambda) { return parse_section(p, c.section, lambda); }, c.lambdas};
  const CompleteSolutionReport r = complete_solution_check(h, cs, grid, tol, c.time);
  checks.push_back(Check{"complete solution", grid.size() * c.lambdas.size(), r.max_det_residual, tol, r.pass()});
  json detail{{"det_pass", r.det_pass},
              {"jacobian_pass", r.jacobian_pass},
              {"monotone_pass", r.monotone_pass},
              {"min_abs_jacobian", r.min_abs_jacobian}};
  if (!r.failure.empty()) detail["failure"] = r.failure;
  const json report = report_json(p.name, "hj-scan", checks, {{"file", "hj_scan.csv"}, {"complete_solution", detail}});
  emit(report, checks, o, out, "hj_scan_summary");
  return verdict(checks);
}

int cmd_list_systems(const Options& o, std::ostream& out) {
  struct Entry {
    SystemPreset preset;
    std::string description;
  };
  const std::vector<Entry> entries{
      {preset_by_name("ks3"), "third-order Kummer-Schwarz equation as a first-order system on v != 0"},
      {preset_by_name("riccati"), "n coupled Riccati equations on pairwise-distinct coordinates (n = 3 to 8)"}};
  if (o.format == "csv") {
    CsvTable t({"name", "dimension", "coordinates", "coefficients", "description"});
    for (const auto& e : entries) {
      std::string coords, coeffs;
      for (const auto& s : e.preset.coordinates) coords += (coords.empty() ? "" : " ") + s;
      for (const auto& s : e.preset.coefficients->names()) coeffs += (coeffs.empty() ? "" : " ") + s;
      t.add_row(std::vector<std::string>{e.preset.name, std::to_string(e.preset.dimension()), coords, coeffs,
                                         e.description});
    }
    out << t.str();
    return kPass;
  }
  json list = json::array();
  for (const auto& e : entries)
    list.push_back({{"name", e.preset.name},
                    {"dimension", e.preset.dimension()},
                    {"coordinates", e.preset.coordinates},
                    {"coefficients", e.preset.coefficients->names()},
                    {"hamiltonians", [&] {
                       std::vector<std::string> labels;
                       for (const auto& h : e.preset.hamiltonians) labels.push_back(h.label());
                       return labels;
                     }()},
                    {"description", e.description}});
  out << json{{"version", kVersion}, {"systems", list}}.dump(2) << "\n";
  return kPass;
}

}  // namespace nambu::cli
