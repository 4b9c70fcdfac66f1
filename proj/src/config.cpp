#include "tdsw/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "tdsw/errors.hpp"
#include "tdsw/units.hpp"

namespace tdsw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  const auto p = s.find_first_of("#;");
  return p == std::string::npos ? s : s.substr(0, p);
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

double to_double(const IniEntry& e, const std::string& key) {
  const char* b = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(b, &end);
  if (end == b || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("'" + key + "' expects a number, got '" + e.value + "'", e.line);
  return v;
}

int to_int(const IniEntry& e, const std::string& key) {
  const char* b = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(b, &end, 10);
  if (end == b || *end != '\0' || errno == ERANGE || v < -1000000000L || v > 1000000000L)
    throw ConfigError("'" + key + "' expects an integer, got '" + e.value + "'", e.line);
  return static_cast<int>(v);
}

bool to_bool(const IniEntry& e, const std::string& key) {
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + e.value + "'", e.line);
}

// Rejects keys outside the allowed set for a section.
void check_keys(const IniSection& sec, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [k, e] : sec)
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in [" + name + "]", e.line);
}

const IniEntry* find(const IniSection& sec, const std::string& key) {
  auto it = sec.find(key);
  return it == sec.end() ? nullptr : &it->second;
}

const IniEntry& require(const IniSection& sec, const std::string& section, const std::string& key, int line) {
  const IniEntry* e = find(sec, key);
  if (!e) throw ConfigError("missing required key '" + key + "' in [" + section + "]", line);
  return *e;
}

}  // namespace

IniDocument parse_ini(std::istream& in) {
  IniDocument doc;
  std::string raw;
  std::string section;
  std::map<std::string, int> header_line;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_name(section)) throw ConfigError("invalid section name '" + section + "'", line);
      if (header_line.count(section)) throw ConfigError("duplicate section [" + section + "]", line);
      header_line[section] = line;
      doc[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    if (section.empty()) throw ConfigError("key outside of any [section]", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!valid_name(key)) throw ConfigError("invalid key '" + key + "'", line);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);
    auto& sec = doc[section];
    if (sec.count(key)) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line);
    sec[key] = {value, line};
  }
  return doc;
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) v[i] = start + (stop - start) * i / (points - 1);
  return v;
}

void RunConfig::set_omega_p(double w) {
  rabi.omega_p = w;
  kerr.omega_p = w;
}

void RunConfig::set_g_p(double g) {
  rabi.g_p = g;
  kerr.g_p = g;
}

SystemModel RunConfig::build() const {
  if (kind == "rabi") return build_rabi(rabi);
  if (kind == "jc") return build_jc(rabi);
  return build_kerr(kerr);
}

RunConfig parse_config(std::istream& in) {
  const IniDocument doc = parse_ini(in);
  static const std::set<std::string> sections = {"model",    "sweep",   "backends", "bath",
                                                  "floquet", "lindblad", "output"};
  for (const auto& [name, sec] : doc)
    if (!sections.count(name)) {
      const int line = sec.empty() ? 0 : sec.begin()->second.line;
      throw ConfigError("unknown section [" + name + "]", line);
    }
  auto section = [&](const std::string& n) -> const IniSection* {
    auto it = doc.find(n);
    return it == doc.end() ? nullptr : &it->second;
  };

  RunConfig cfg;
  const IniSection* model = section("model");
  if (!model) throw ConfigError("missing [model] section");
  const IniEntry& kind = require(*model, "model", "kind", 0);
  cfg.kind = kind.value;
  if (cfg.kind != "rabi" && cfg.kind != "jc" && cfg.kind != "kerr")
    throw ConfigError("model kind must be rabi, jc or kerr, got '" + cfg.kind + "'", kind.line);

  const bool qubit = cfg.is_qubit();
  check_keys(*model, "model",
             qubit ? std::set<std::string>{"kind", "omega_q", "omega_a", "g_p", "omega_p", "phi_p", "n_a"}
                   : std::set<std::string>{"kind", "omega_a", "omega_b", "kerr", "g_p", "omega_p", "phi_p", "n_a",
                                           "n_b"});
  auto ghz_key = [&](const std::string& k) { return units::ghz(to_double(require(*model, "model", k, kind.line), k)); };
  const double g_p = ghz_key("g_p");
  double omega_p = 0.0;
  if (const IniEntry* e = find(*model, "omega_p")) {
    omega_p = units::ghz(to_double(*e, "omega_p"));
    cfg.has_omega_p = true;
  }
  double phi_p = 0.0;
  if (const IniEntry* e = find(*model, "phi_p")) phi_p = to_double(*e, "phi_p");
  if (qubit) {
    cfg.rabi = RabiParams{ghz_key("omega_q"), ghz_key("omega_a"), g_p, omega_p, phi_p};
    if (const IniEntry* e = find(*model, "n_a")) cfg.rabi.n_a = to_int(*e, "n_a");
  } else {
    cfg.kerr.omega_a = ghz_key("omega_a");
    cfg.kerr.omega_b = ghz_key("omega_b");
    cfg.kerr.kerr = ghz_key("kerr");
    cfg.kerr.g_p = g_p;
    cfg.kerr.omega_p = omega_p;
    cfg.kerr.phi_p = phi_p;
    if (const IniEntry* e = find(*model, "n_a")) cfg.kerr.n_a = to_int(*e, "n_a");
    if (const IniEntry* e = find(*model, "n_b")) cfg.kerr.n_b = to_int(*e, "n_b");
  }
  if (g_p < 0.0) throw ConfigError("g_p must be >= 0 (use phi_p for the phase)", find(*model, "g_p")->line);
  try {
    if (qubit)
      cfg.rabi.validate(false);
    else
      cfg.kerr.validate(false);
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("[model]: ") + e.what(), kind.line);
  }

  if (const IniSection* sw = section("sweep")) {
    check_keys(*sw, "sweep", {"variable", "start", "stop", "points"});
    const int hl = sw->empty() ? 0 : sw->begin()->second.line;
    SweepSpec spec;
    const IniEntry& var = require(*sw, "sweep", "variable", hl);
    spec.variable = var.value;
    if (spec.variable != "omega_p" && spec.variable != "g_p" && spec.variable != "delta")
      throw ConfigError("sweep variable must be omega_p, g_p or delta, got '" + spec.variable + "'", var.line);
    spec.start = units::ghz(to_double(require(*sw, "sweep", "start", hl), "start"));
    const IniEntry& stop = require(*sw, "sweep", "stop", hl);
    spec.stop = units::ghz(to_double(stop, "stop"));
    const IniEntry& pts = require(*sw, "sweep", "points", hl);
    spec.points = to_int(pts, "points");
    if (!(spec.start < spec.stop)) throw ConfigError("sweep start must be < stop", stop.line);
    if (spec.points < 2) throw ConfigError("sweep points must be >= 2", pts.line);
    if (spec.variable != "delta" && spec.start < 0.0)
      throw ConfigError("sweep of " + spec.variable + " must start at >= 0", var.line);
    cfg.sweep = spec;
  }

  if (const IniSection* be = section("backends")) {
    check_keys(*be, "backends", {"analytic2", "analytic4", "floquet", "lindblad"});
    if (auto e = find(*be, "analytic2")) cfg.backends.analytic2 = to_bool(*e, "analytic2");
    if (auto e = find(*be, "analytic4")) cfg.backends.analytic4 = to_bool(*e, "analytic4");
    if (auto e = find(*be, "floquet")) cfg.backends.floquet = to_bool(*e, "floquet");
    if (auto e = find(*be, "lindblad")) {
      cfg.backends.lindblad = to_bool(*e, "lindblad");
      if (cfg.backends.lindblad && !qubit)
        throw ConfigError("lindblad backend is available for rabi and jc models only", e->line);
    }
  }

  if (const IniSection* bath = section("bath")) {
    check_keys(*bath, "bath", {"kappa"});
    const IniEntry& k = require(*bath, "bath", "kappa", 0);
    cfg.kappa = units::mhz(to_double(k, "kappa"));
    if (!(cfg.kappa > 0.0)) throw ConfigError("kappa must be > 0", k.line);
  }

  if (const IniSection* fl = section("floquet")) {
    check_keys(*fl, "floquet", {"steps"});
    if (auto e = find(*fl, "steps")) {
      cfg.floquet_steps = to_int(*e, "steps");
      if (cfg.floquet_steps < 1000) throw ConfigError("floquet steps must be >= 1000", e->line);
    }
  }

  if (const IniSection* lb = section("lindblad")) {
    check_keys(*lb, "lindblad", {"n_a", "steps"});
    if (auto e = find(*lb, "n_a")) {
      cfg.lindblad_n_a = to_int(*e, "n_a");
      if (cfg.lindblad_n_a < 4) throw ConfigError("lindblad n_a must be >= 4", e->line);
    }
    if (auto e = find(*lb, "steps")) {
      cfg.lindblad_steps = to_int(*e, "steps");
      if (cfg.lindblad_steps < 50) throw ConfigError("lindblad steps must be >= 50", e->line);
    }
  }

  if (const IniSection* out = section("output")) {
    check_keys(*out, "output", {"path", "format"});
    if (auto e = find(*out, "path")) cfg.output_path = e->value;
    if (auto e = find(*out, "format")) {
      cfg.output_format = e->value;
      if (cfg.output_format != "csv" && cfg.output_format != "json")
        throw ConfigError("output format must be csv or json", e->line);
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace tdsw
