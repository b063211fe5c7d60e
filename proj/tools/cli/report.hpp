#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace nambu::cli {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits; nan, inf and -inf spelled out.
std::string csv_number(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Check {
  std::string name;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Check whose verdict is max_residual <= tolerance.
Check make_check(std::string name, std::size_t samples, double max_residual, double tolerance);

nlohmann::json check_json(const Check& c);
/// {version, system, command, checks: [...]} plus `extra` merged in.
nlohmann::json report_json(const std::string& system, const std::string& command, const std::vector<Check>& checks,
                           const nlohmann::json& extra = nlohmann::json::object());
CsvTable checks_csv(const std::vector<Check>& checks);
bool all_pass(const std::vector<Check>& checks);

void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace nambu::cli
