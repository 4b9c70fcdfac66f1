#pragma once

#include <json.hpp>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "tdsw/config.hpp"

namespace tdsw::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitResonance = 2,
  kExitConvergence = 3,
};

// std::monostate marks a missing (masked) value.
using Cell = std::variant<std::monostate, double, long long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // Rows whose status is "masked".
  int masked_rows() const;
};

// 12 significant digits; -0 is printed as 0.
std::string format_number(double x);
void write_csv(std::ostream& os, const Table& t);
nlohmann::json to_json(const Table& t);

// Reason codes are joined with ';' in the reason column.
Table cmd_shift(const RunConfig& cfg, int jobs);
nlohmann::json cmd_blindspot(const RunConfig& cfg);
Table cmd_spectrum(const RunConfig& cfg, int jobs);
Table cmd_rates(const RunConfig& cfg, int jobs);
// Runs the acceptance criteria (all when ids is empty).
Table cmd_verify(const std::vector<int>& ids, int jobs);

// Maps an exception escaping a command to the documented exit code.
int exit_code_for(const std::exception& e);

}  // namespace tdsw::cli
