#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cli/config.hpp"
#include "cli/report.hpp"

using namespace nambu;
using namespace nambu::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nambu_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const json& config) {
  const fs::path dir = scratch(name);
  const fs::path path = dir / "config.json";
  std::ofstream(path) << config.dump(2);
  return path;
}

Run run(const std::string& args, const std::string& name = "run") {
  const fs::path err = fs::temp_directory_path() / "nambu_cli_tests" / (name + ".stderr");
  fs::create_directories(err.parent_path());
  const std::string cmd = std::string(NAMBU_CLI_PATH) + " " + args + " 2>" + err.string();
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = slurp(err);
  return r;
}

const json kToy = {{"name", "toy"}, {"coordinates", {"x1", "x2", "x3"}}, {"hamiltonians", {"x3", "x2"}}};

bool all_checks_pass(const json& report) {
  for (const auto& c : report.at("checks"))
    if (!c.at("pass").get<bool>()) return false;
  return true;
}

double check_residual(const json& report, const std::string& name) {
  for (const auto& c : report.at("checks"))
    if (c.at("name") == name) return c.at("max_residual").get<double>();
  FAIL("missing check " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig ks3 = parse_config(json{{"system", "ks3"}, {"initial_conditions", {{0, 1, 0}}}});
  CHECK(ks3.system.name == "ks3");
  CHECK(ks3.initial_conditions.size() == 1);

  const RunConfig ric = parse_config(
      json{{"system", {{"preset", "riccati"}, {"n", 4}, {"coefficients", {{"a1", 1}, {"a0", "sin(t)"}}}}},
           {"integrator", {{"method", "rk45"}, {"t1", 2}}},
           {"lambda", {{"from", -1}, {"to", 1}, {"count", 5}}}});
  CHECK(ric.system.dimension() == 4);
  CHECK(ric.integrator.method == Method::Rk45Adaptive);
  CHECK(ric.integrator.t1 == 2.0);
  CHECK(ric.lambdas == std::vector<double>{-1, -0.5, 0, 0.5, 1});

  const RunConfig toy = parse_config(json{{"system", kToy}});
  CHECK(toy.system.name == "toy");
  CHECK_FALSE(toy.system.has_rhs());

  CHECK_THROWS_AS(parse_config(json{{"system", "ks3"}, {"integratr", json::object()}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"system", "ks3"}, {"initial_conditions", {{0, 0, 1}}}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"system", "ks3"}, {"initial_conditions", {{0, 1}}}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"system", "lorenz"}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"system", kToy}, {"field", "rhs"}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"system", "ks3"}, {"integrator", {{"method", "euler"}}}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"seed", 1}}), UsageError);
}

TEST_CASE("csv formatting") {
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(csv_number(1.0) == "1");
  CHECK(csv_number(std::nan("")) == "nan");
  CsvTable t({"t", "name"});
  t.add_row(std::vector<std::string>{"0", "a,b"});
  CHECK(t.str() == "t,name\r\n0,\"a,b\"\r\n");
  CHECK_THROWS(t.add_row(std::vector<double>{1.0}));
}

TEST_CASE("list-systems") {
  const Run r = run("list-systems");
  CHECK(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("systems").size() == 2);
  CHECK(j.at("systems")[0].at("name") == "ks3");
  const Run csv = run("--format csv list-systems");
  CHECK(csv.out.rfind("name,dimension,coordinates,coefficients,description", 0) == 0);
}

TEST_CASE("simulate ks3 writes conserved trajectories") {
  const fs::path cfg = write_config("sim_ks3", json{{"system", "ks3"},
                                                     {"integrator", {{"method", "rk4"}, {"step", 1e-3}}},
                                                     {"initial_conditions", {{0, 1, 0}}}});
  const fs::path out = cfg.parent_path() / "out";
  const Run r = run("--config " + cfg.string() + " --out " + out.string() + " --format csv simulate", "sim_ks3");
  INFO(r.err);
  REQUIRE(r.status == 0);
  const std::string csv = slurp(out / "trajectory_0.csv");
  CHECK(csv.rfind("t,x,v,a,h,hbar,divergence\r\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1002);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("runs")[0].at("drift").at("h").at("max").get<double>() <= 1e-7);
  CHECK(summary.at("runs")[0].at("drift").at("hbar").at("max").get<double>() <= 1e-7);
  CHECK(all_checks_pass(summary));
}

TEST_CASE("simulate linear riccati reaches the closed form") {
  const fs::path cfg = write_config(
      "sim_ric", json{{"system", {{"preset", "riccati"}, {"coefficients", {{"a0", 0}, {"a1", 1}}}}},
                      {"integrator", {{"method", "rk45"}, {"abs_tol", 1e-10}, {"rel_tol", 1e-10}}},
                      {"initial_conditions", {{1, 2, 3}}},
                      {"convergence_steps", {1e-2, 5e-3, 2.5e-3}}});
  const Run r = run("--config " + cfg.string() + " --out " + (cfg.parent_path() / "out").string() + " simulate",
                    "sim_ric");
  INFO(r.err);
  REQUIRE(r.status == 0);
  const json summary = json::parse(r.out);
  const auto final_state = summary.at("runs")[0].at("final_state").get<std::vector<double>>();
  for (int i = 0; i < 3; ++i) CHECK(std::abs(final_state[i] - (i + 1) * std::exp(1.0)) <= 1e-8);
  CHECK(summary.at("runs")[0].at("convergence_order").get<double>() == Catch::Approx(4.0).margin(0.5));
}

TEST_CASE("usage and runtime errors") {
  const fs::path empty = write_config("empty_ic", json{{"system", "ks3"}, {"initial_conditions", json::array()}});
  const Run r = run("--config " + empty.string() + " --out " + empty.parent_path().string() + " simulate", "empty");
  CHECK(r.status == 2);
  CHECK(json::parse(r.err).at("error") == "usage");
  CHECK(r.err.find('\n') == r.err.size() - 1);

  CHECK(run("simulate").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("--config /nonexistent/config.json verify bracket").status == 2);

  const fs::path suite = write_config("bad_suite", json{{"system", "ks3"}});
  CHECK(run("--config " + suite.string() + " verify nonsense").status == 2);

  const fs::path bad_expr = write_config("bad_expr", json{{"system", kToy}, {"section", "x1 + * x2"}, {"lambda", {0}}});
  const Run p = run("--config " + bad_expr.string() + " --out " + bad_expr.parent_path().string() + " hj-scan", "bad");
  CHECK(p.status == 2);
  CHECK(json::parse(p.err).at("error") == "parse");

  json leaving = kToy;
  leaving["rhs"] = {"-1", "0", "0"};
  leaving["domain"] = "sqrt(x1)";
  const fs::path exits = write_config("leaves", json{{"system", leaving},
                                                     {"field", "rhs"},
                                                     {"integrator", {{"step", 0.01}}},
                                                     {"initial_conditions", {{0.5, 0.1, 0.2}}}});
  const Run e = run("--config " + exits.string() + " --out " + exits.parent_path().string() + " simulate", "leaves");
  CHECK(e.status == 3);
  const json err = json::parse(e.err);
  CHECK(err.at("error") == "integration");
  CHECK(err.at("last_valid_time").get<double>() <= 0.5);
}

TEST_CASE("verify suites") {
  const fs::path ks3 = write_config("verify_ks3", json{{"system", "ks3"}, {"samples", 50}});
  for (const char* suite : {"bracket", "fi", "lagrangian", "system"}) {
    const Run r = run("--config " + ks3.string() + " verify " + suite, std::string("verify_") + suite);
    INFO(suite << " " << r.out << r.err);
    CHECK(r.status == 0);
    CHECK(all_checks_pass(json::parse(r.out)));
  }

  const fs::path ric =
      write_config("verify_ric", json{{"system", {{"preset", "riccati"}, {"n", 4}, {"coefficients", {{"a2", 0.5}}}}},
                                      {"samples", 50}});
  const Run rr = run("--config " + ric.string() + " verify system", "verify_ric");
  INFO(rr.out);
  CHECK(rr.status == 0);

  const fs::path hj = write_config("verify_hj", json{{"system", kToy}, {"section", "gamma_n = x2^2"}, {"samples", 20}});
  const Run h = run("--config " + hj.string() + " verify hj", "verify_hj");
  CHECK(h.status == 0);
  CHECK(check_residual(json::parse(h.out), "hj determinant") == 0.0);

  const fs::path bad = write_config("verify_hj_bad", json{{"system", kToy}, {"section", "x1"}, {"samples", 5}});
  const Run b = run("--config " + bad.string() + " --format csv verify hj", "verify_hj_bad");
  CHECK(b.status == 1);
  CHECK(b.out.rfind("name,samples,max_residual,tolerance,pass\r\n", 0) == 0);
}

TEST_CASE("derive-density") {
  const fs::path ks3 = write_config("density_ks3", json{{"system", "ks3"}});
  const fs::path out = ks3.parent_path() / "out";
  const Run r = run("--config " + ks3.string() + " --out " + out.string() + " derive-density", "density_ks3");
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("checks")[0].at("samples") == 100);
  CHECK(j.at("skipped") == 0);
  CHECK(slurp(out / "density.csv").rfind("t,x,v,a,rho,spread,index,closed_form_ratio\r\n", 0) == 0);

  const fs::path ric = write_config("density_ric", json{{"system", {{"preset", "riccati"}, {"n", 4}}}});
  CHECK(run("--config " + ric.string() + " --out " + ric.parent_path().string() + " derive-density").status == 0);

  const fs::path zero = write_config(
      "density_zero", json{{"system", {{"preset", "riccati"}, {"coefficients", {{"a0", 0}, {"a1", 0}, {"a2", 0}}}}}});
  const Run z = run("--config " + zero.string() + " --out " + zero.parent_path().string() + " derive-density");
  CHECK(z.status == 0);
  CHECK(json::parse(z.out).at("skipped") == 100);
}

TEST_CASE("hj-scan") {
  const fs::path flat = write_config("scan_flat", json{{"system", kToy}, {"section", "lambda"}, {"lambda", {-1, 0, 1}},
                                                       {"samples", 10}});
  const fs::path out = flat.parent_path() / "out";
  const Run r = run("--config " + flat.string() + " --out " + out.string() + " hj-scan", "scan_flat");
  INFO(r.out << r.err);
  CHECK(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("complete_solution").at("det_pass") == true);
  CHECK(slurp(out / "hj_scan.csv").rfind("t,lambda,x1,x2,hj_det,relatedness\r\n", 0) == 0);

  const fs::path tilted = write_config("scan_tilt", json{{"system", kToy}, {"section", "lambda*x1"},
                                                         {"lambda", {-1, 0, 1}}, {"samples", 10}});
  const Run t = run("--config " + tilted.string() + " --out " + tilted.parent_path().string() + " hj-scan", "tilt");
  CHECK(t.status == 1);
  const json tj = json::parse(t.out);
  CHECK(check_residual(tj, "hj lambda=-1") == 1.0);
  CHECK(check_residual(tj, "hj lambda=0") == 0.0);
  CHECK(check_residual(tj, "hj lambda=1") == 1.0);

  const fs::path none = write_config("scan_none", json{{"system", kToy}, {"section", "lambda"}, {"lambda", json::array()}});
  CHECK(run("--config " + none.string() + " --out " + none.parent_path().string() + " hj-scan").status == 2);
}

TEST_CASE("identical config and seed give identical output") {
  const fs::path cfg = write_config("determinism", json{{"system", "ks3"},
                                                         {"integrator", {{"step", 1e-2}}},
                                                         {"initial_conditions", {{0, 1, 0}, {0.3, -1.2, 0.5}}},
                                                         {"samples", 30}});
  const fs::path a = cfg.parent_path() / "a", b = cfg.parent_path() / "b";
  for (const fs::path& dir : {a, b}) {
    REQUIRE(run("--config " + cfg.string() + " --out " + dir.string() + " --format csv simulate").status == 0);
    REQUIRE(run("--config " + cfg.string() + " --out " + dir.string() + " --seed 7 derive-density").status == 0);
    REQUIRE(run("--config " + cfg.string() + " --out " + dir.string() + " --seed 7 verify system").status == 0);
  }
  for (const char* file : {"trajectory_0.csv", "trajectory_1.csv", "summary.json", "density.csv",
                           "density_summary.json", "report.json"})
    CHECK(slurp(a / file) == slurp(b / file));
  const Run s1 = run("--config " + cfg.string() + " --seed 8 verify bracket");
  const Run s2 = run("--config " + cfg.string() + " --seed 9 verify bracket");
  CHECK(s1.out != s2.out);
}
