#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tdsw/commands.hpp"
#include "tdsw/errors.hpp"
#include "tdsw/parallel.hpp"

using namespace tdsw;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;
  int jobs = 0;
  std::vector<int> criteria;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << text;
}

std::string render(const cli::Table& t, const std::string& format) {
  if (format == "json") return cli::to_json(t).dump(2) + "\n";
  std::ostringstream os;
  cli::write_csv(os, t);
  return os.str();
}

// One-row table from a flat JSON object (keys in sorted order).
cli::Table table_from_object(const nlohmann::json& obj) {
  cli::Table t;
  std::vector<cli::Cell> row;
  for (const auto& [k, v] : obj.items()) {
    t.columns.push_back(k);
    if (v.is_null())
      row.emplace_back();
    else if (v.is_boolean())
      row.emplace_back(v.get<bool>());
    else if (v.is_number_integer())
      row.emplace_back(v.get<long long>());
    else if (v.is_number())
      row.emplace_back(v.get<double>());
    else if (v.is_array()) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ";") + x.get<std::string>();
      row.emplace_back(s);
    } else
      row.emplace_back(v.get<std::string>());
  }
  t.rows.push_back(std::move(row));
  return t;
}

int run(const std::string& command, const Options& opt) {
  const int jobs = opt.jobs > 0 ? opt.jobs : default_jobs();
  if (command == "verify") {
    const cli::Table t = cli::cmd_verify(opt.criteria, jobs);
    emit(render(t, opt.format.empty() ? "csv" : opt.format), opt.out);
    for (const auto& row : t.rows)
      if (std::get<std::string>(row[2]) != "PASS") return cli::kExitConvergence;
    return cli::kExitOk;
  }

  if (opt.config.empty()) throw ConfigError("--config PATH is required for " + command);
  const RunConfig cfg = load_config(opt.config);
  const std::string format = opt.format.empty() ? cfg.output_format : opt.format;
  const std::string path = opt.out.empty() ? cfg.output_path : opt.out;

  if (command == "blindspot") {
    const nlohmann::json j = cli::cmd_blindspot(cfg);
    emit(format == "json" ? j.dump(2) + "\n" : render(table_from_object(j), "csv"), path);
    return cli::kExitOk;
  }
  cli::Table t;
  if (command == "shift")
    t = cli::cmd_shift(cfg, jobs);
  else if (command == "spectrum")
    t = cli::cmd_spectrum(cfg, jobs);
  else
    t = cli::cmd_rates(cfg, jobs);
  emit(render(t, format), path);
  if (!t.rows.empty() && t.masked_rows() == static_cast<int>(t.rows.size())) {
    std::cerr << "tdsw: every sweep point was masked\n";
    return cli::kExitResonance;
  }
  return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent Schrieffer-Wolff shifts, blind spots and induced rates"};
  app.require_subcommand(1, 1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "run configuration (key=value with [section] headers)");
    sub->add_option("--out", opt.out, "output file (default: stdout or [output] path)");
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jobs", opt.jobs, "worker threads (default: available cores)")->check(CLI::PositiveNumber);
  };
  add_common(app.add_subcommand("shift", "dressed shift sweep: closed form, cascade, Floquet"));
  add_common(app.add_subcommand("blindspot", "analytic and Floquet-refined blind spot"));
  add_common(app.add_subcommand("spectrum", "conditioned resonator spectra from the Lindblad probe"));
  add_common(app.add_subcommand("rates", "induced decay and heating rates"));
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  add_common(verify);
  verify->add_option("--criterion", opt.criteria, "criterion ids to run (default: all)")
      ->check(CLI::Range(1, 7));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const std::exception& e) {
    std::cerr << "tdsw " << command << ": " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
}
