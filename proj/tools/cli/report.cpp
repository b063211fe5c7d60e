#include "cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cli/config.hpp"

namespace nambu::cli {

std::string csv_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(csv_number(v));
  add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw std::logic_error("csv row width does not match the header");
  rows_.push_back(cells);
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += quote(cells[i]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

Check make_check(std::string name, std::size_t samples, double max_residual, double tolerance) {
  return Check{std::move(name), samples, max_residual, tolerance, max_residual <= tolerance};
}

nlohmann::json check_json(const Check& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["samples"] = c.samples;
  j["max_residual"] = c.max_residual;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  return j;
}

nlohmann::json report_json(const std::string& system, const std::string& command, const std::vector<Check>& checks,
                           const nlohmann::json& extra) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["system"] = system;
  j["command"] = command;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) j["checks"].push_back(check_json(c));
  j["pass"] = all_pass(checks);
  for (const auto& [key, value] : extra.items()) j[key] = value;
  return j;
}

CsvTable checks_csv(const std::vector<Check>& checks) {
  CsvTable t({"name", "samples", "max_residual", "tolerance", "pass"});
  for (const auto& c : checks)
    t.add_row(std::vector<std::string>{c.name, std::to_string(c.samples), csv_number(c.max_residual),
                                       csv_number(c.tolerance), c.pass ? "true" : "false"});
  return t;
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace nambu::cli
