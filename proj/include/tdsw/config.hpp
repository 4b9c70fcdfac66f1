#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdsw/models.hpp"

namespace tdsw {

// Flat key=value text with [section] headers; '#' or ';' start a comment.
//
//   [model]     kind = rabi|jc|kerr, omega_q, omega_a, omega_b, kerr, g_p, omega_p (GHz),
//               phi_p (rad), n_a, n_b
//   [sweep]     variable = omega_p|g_p|delta, start, stop (GHz), points
//   [backends]  analytic2, analytic4, floquet, lindblad (true|false)
//   [bath]      kappa (MHz)
//   [floquet]   steps
//   [lindblad]  n_a, steps
//   [output]    path, format = csv|json
//
// Values are converted to rad/ns at parse time.
struct IniEntry {
  std::string value;
  int line = 0;
};
using IniSection = std::map<std::string, IniEntry>;
using IniDocument = std::map<std::string, IniSection>;

// Syntax-level parse; throws ConfigError with the offending line.
IniDocument parse_ini(std::istream& in);

struct SweepSpec {
  std::string variable;  // "omega_p", "g_p" or "delta"
  double start = 0.0;    // rad/ns
  double stop = 0.0;
  int points = 0;
  std::vector<double> values() const;
};

struct Backends {
  bool analytic2 = true;
  bool analytic4 = true;
  bool floquet = false;
  bool lindblad = false;
};

struct RunConfig {
  std::string kind;  // "rabi", "jc" or "kerr"
  RabiParams rabi;
  KerrParams kerr;
  bool has_omega_p = false;
  std::optional<SweepSpec> sweep;
  Backends backends;
  double kappa = 0.0;  // rad/ns; 0 when [bath] is absent
  int floquet_steps = 1000;
  int lindblad_n_a = 4;
  int lindblad_steps = 400;
  std::string output_path;
  std::string output_format = "csv";

  bool is_qubit() const { return kind == "rabi" || kind == "jc"; }
  double omega_p() const { return is_qubit() ? rabi.omega_p : kerr.omega_p; }
  cplx g_p() const { return is_qubit() ? rabi.g_p : kerr.g_p; }
  void set_omega_p(double w);
  void set_g_p(double g);
  SystemModel build() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

}  // namespace tdsw
