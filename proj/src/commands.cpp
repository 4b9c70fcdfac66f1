#include "tdsw/commands.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tdsw/acceptance.hpp"
#include "tdsw/errors.hpp"
#include "tdsw/exact_sim.hpp"
#include "tdsw/parallel.hpp"
#include "tdsw/units.hpp"

namespace tdsw::cli {

namespace {

using units::to_ghz;
using units::to_mhz;

// Perturbative radius of convergence in g_p / Delta_p.
constexpr double kValidityRadius = 0.4;
// Blind-spot backends agree when the roots differ by less than this (MHz).
constexpr double kAgreementMhz = 0.5;

struct Reasons {
  std::vector<std::string> codes;
  bool masked = false;
  void flag(const std::string& c) { codes.push_back(c); }
  void mask(const std::string& c) {
    codes.push_back(c);
    masked = true;
  }
  std::string status() const { return masked ? "masked" : codes.empty() ? "ok" : "flagged"; }
  std::string joined() const {
    std::string s;
    for (const auto& c : codes) s += (s.empty() ? "" : ";") + c;
    return s;
  }
};

Cell maybe(double x) { return std::isfinite(x) ? Cell{x} : Cell{}; }

TransitionSpec transition_for(const RunConfig& cfg) {
  return cfg.is_qubit() ? qubit_transition(0) : kerr_transition(1, 0);
}

double pump_detuning(const RunConfig& cfg) {
  if (cfg.is_qubit()) return cfg.rabi.pump_detuning();
  return std::min(cfg.kerr.pump_detuning(1), cfg.kerr.pump_detuning(2));
}

double chi2_closed_form(const RunConfig& cfg) {
  if (cfg.kind == "rabi") return chi2_qubit(cfg.rabi);
  if (cfg.kind == "jc") return chi2_jc(cfg.rabi);
  return chi2_kerr(cfg.kerr, 1);
}

// Points of a sweep over omega_p or g_p, or the single configured point.
std::vector<RunConfig> sweep_points(const RunConfig& cfg, const char* command) {
  std::vector<RunConfig> pts;
  if (!cfg.sweep) {
    if (!cfg.has_omega_p) throw ConfigError(std::string(command) + " needs [model] omega_p or a [sweep] over omega_p");
    pts.push_back(cfg);
    return pts;
  }
  const SweepSpec& s = *cfg.sweep;
  if (s.variable == "delta")
    throw ConfigError(std::string(command) + " sweeps omega_p or g_p; delta is for the spectrum command");
  if (s.variable == "g_p" && !cfg.has_omega_p) throw ConfigError("a g_p sweep needs [model] omega_p");
  for (double v : s.values()) {
    RunConfig c = cfg;
    if (s.variable == "omega_p")
      c.set_omega_p(v);
    else
      c.set_g_p(v);
    pts.push_back(std::move(c));
  }
  return pts;
}

double floquet_shift(const RunConfig& cfg, Reasons& why) {
  try {
    const SystemModel m = cfg.build();
    const int steps = std::max(cfg.floquet_steps, recommended_floquet_steps(m));
    const FloquetResult fr = propagate_period(m, {steps});
    const DressedShift d = dressed_shift(fr, transition_for(cfg));
    if (d.flagged) why.flag(d.reason);
    return d.value;
  } catch (const LabelingError&) {
    why.mask("floquet_labeling");
  } catch (const ConvergenceError&) {
    why.mask("floquet_convergence");
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double engine_shift4(const RunConfig& cfg, Reasons& why) {
  try {
    const SystemModel m = cfg.build();
    const SwtResult r = swt_cascade(m, {});
    return transition_shift(m.space(), effective_hamiltonian_rwa(r, 4).real_diagonal(), transition_for(cfg));
  } catch (const ParametricResonance&) {
    why.mask("resonance_analytic4");
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Operator excited_projector(const HilbertSpace& space) {
  Mat pe = Mat::Zero(2, 2);
  pe(1, 1) = 1.0;
  return embed(space, 0, pe);
}

}  // namespace

int Table::masked_rows() const {
  int idx = -1;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == "status") idx = static_cast<int>(i);
  if (idx < 0) return 0;
  int n = 0;
  for (const auto& r : rows)
    if (const auto* s = std::get_if<std::string>(&r[idx]); s && *s == "masked") ++n;
  return n;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>)
              os << format_number(v);
            else if constexpr (std::is_same_v<V, long long>)
              os << v;
            else if constexpr (std::is_same_v<V, std::string>)
              os << v;
            else if constexpr (std::is_same_v<V, bool>)
              os << (v ? "true" : "false");
          },
          row[i]);
    }
    os << '\n';
  }
}

nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>)
              obj[t.columns[i]] = nullptr;
            else
              obj[t.columns[i]] = v;
          },
          row[i]);
    }
    rows.push_back(std::move(obj));
  }
  return {{"columns", t.columns}, {"rows", rows}};
}

// ------------------------------------------------------------------- shift

Table cmd_shift(const RunConfig& cfg, int jobs) {
  const std::vector<RunConfig> pts = sweep_points(cfg, "shift");
  const Backends& be = cfg.backends;
  Table t;
  t.columns = {"omega_p_ghz", "g_p_mhz", "g_over_delta"};
  if (be.analytic2) t.columns.push_back("chi_analytic2_mhz");
  if (be.analytic4) t.columns.push_back("chi_analytic4_mhz");
  if (be.floquet) t.columns.push_back("chi_floquet_mhz");
  t.columns.insert(t.columns.end(), {"status", "reason"});

  t.rows = parallel_map<std::vector<Cell>>(static_cast<int>(pts.size()), jobs, [&](int i) {
    const RunConfig& c = pts[i];
    Reasons why;
    std::vector<Cell> row{to_ghz(c.omega_p()), to_mhz(std::abs(c.g_p()))};
    const double ratio = std::abs(c.g_p()) / pump_detuning(c);
    row.push_back(maybe(ratio));
    if (c.omega_p() <= 0.0) {
      why.mask("static_pump");
      for (int k = 0; k < be.analytic2 + be.analytic4 + be.floquet; ++k) row.emplace_back();
    } else {
      if (!(ratio <= kValidityRadius)) why.flag("outside_convergence_radius");
      if (be.analytic2) {
        double x = std::numeric_limits<double>::quiet_NaN();
        try {
          x = chi2_closed_form(c);
        } catch (const ParametricResonance&) {
          why.mask("resonance_analytic2");
        }
        row.push_back(maybe(to_mhz(x)));
      }
      if (be.analytic4) row.push_back(maybe(to_mhz(engine_shift4(c, why))));
      if (be.floquet) row.push_back(maybe(to_mhz(floquet_shift(c, why))));
    }
    row.emplace_back(why.status());
    row.emplace_back(why.joined());
    return row;
  });
  return t;
}

// --------------------------------------------------------------- blindspot

nlohmann::json cmd_blindspot(const RunConfig& cfg) {
  if (cfg.kind == "jc") throw NoBlindSpot("the JC model has no Bloch-Siegert term and no blind spot");
  BlindSpot bs = cfg.is_qubit() ? blind_spot(cfg.rabi) : blind_spot(cfg.kerr);

  RunConfig at = cfg;
  at.set_omega_p(bs.omega);
  nlohmann::json out;
  out["model"] = cfg.kind;
  out["seed_ghz"] = to_ghz(bs.seed);
  out["omega_bs_analytic_ghz"] = to_ghz(bs.omega);
  out["chi2_residual_mhz"] = to_mhz(chi2_closed_form(at));
  if (!cfg.is_qubit()) out["chi2_ground_at_root_mhz"] = to_mhz(chi2_kerr_ground(at.kerr));

  std::vector<std::string> reasons;
  auto chi_floquet = [&](double w) {
    RunConfig c = cfg;
    c.set_omega_p(w);
    Reasons why;
    const double x = floquet_shift(c, why);
    if (why.masked) throw ConvergenceError("Floquet shift unavailable at " + format_number(to_ghz(w)) + " GHz (" +
                                           why.joined() + ")");
    return x;
  };

  const double x0 = chi_floquet(bs.omega);
  out["chi_floquet_at_analytic_mhz"] = to_mhz(x0);
  // Bracket the Floquet root around the analytic one, widening until the sign changes.
  double h = 1e-3 * bs.omega;
  double lo = bs.omega - h, hi = bs.omega + h;
  double flo = chi_floquet(lo), fhi = chi_floquet(hi);
  for (int i = 0; i < 4 && flo * fhi > 0.0; ++i) {
    h *= 2.0;
    lo = bs.omega - h;
    hi = bs.omega + h;
    flo = chi_floquet(lo);
    fhi = chi_floquet(hi);
  }
  if (flo * fhi > 0.0) {
    reasons.push_back("no_floquet_bracket");
    out["omega_bs_floquet_ghz"] = nullptr;
    out["chi_floquet_residual_mhz"] = nullptr;
    out["backend_agreement_mhz"] = nullptr;
    out["agree"] = false;
  } else {
    std::uintmax_t it = 60;
    const auto r = boost::math::tools::bisect(chi_floquet, lo, hi, boost::math::tools::eps_tolerance<double>(36), it);
    const double wf = 0.5 * (r.first + r.second);
    const double diff = std::abs(to_mhz(wf - bs.omega));
    out["omega_bs_floquet_ghz"] = to_ghz(wf);
    out["chi_floquet_residual_mhz"] = to_mhz(chi_floquet(wf));
    out["backend_agreement_mhz"] = diff;
    out["agree"] = diff < kAgreementMhz;
    if (!(diff < kAgreementMhz)) reasons.push_back("backend_disagreement");
  }
  out["status"] = reasons.empty() ? "ok" : "flagged";
  out["reason"] = reasons;
  return out;
}

// ---------------------------------------------------------------- spectrum

Table cmd_spectrum(const RunConfig& cfg, int jobs) {
  if (!cfg.sweep || cfg.sweep->variable != "delta")
    throw ConfigError("spectrum needs a [sweep] with variable = delta");
  if (!cfg.has_omega_p) throw ConfigError("spectrum needs [model] omega_p");
  if (!(cfg.kappa > 0.0)) throw ConfigError("spectrum needs [bath] kappa");
  const std::vector<double> delta = cfg.sweep->values();
  const SystemModel m = cfg.build();
  const int n = static_cast<int>(delta.size());
  const std::vector<double> s = parallel_map<double>(2 * n, jobs, [&](int i) {
    return probe_response(m, cfg.kappa, i / n, delta[i % n]);
  });

  Table t;
  t.columns = {"delta_mhz", "response_level0", "response_level1"};
  double peak[2] = {0.0, 0.0};
  for (int i = 0; i < 2 * n; ++i) peak[i / n] = std::max(peak[i / n], s[i]);
  for (int j = 0; j < n; ++j) {
    std::vector<Cell> row{to_mhz(delta[j])};
    for (int lv = 0; lv < 2; ++lv) row.push_back(peak[lv] > 0.0 ? Cell{s[lv * n + j] / peak[lv]} : Cell{});
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ------------------------------------------------------------------- rates

Table cmd_rates(const RunConfig& cfg, int jobs) {
  if (!(cfg.kappa > 0.0)) throw ConfigError("rates needs [bath] kappa");
  const std::vector<RunConfig> pts = sweep_points(cfg, "rates");
  const BathSpectrum bath = BathSpectrum::flat(cfg.kappa);
  const bool qubit = cfg.is_qubit();
  const bool fit = cfg.backends.lindblad;

  Table t;
  t.columns = {"omega_p_ghz", "g_p_mhz", "n_b", "gamma_minus_down_mhz", "gamma_minus_up_mhz",
               "gamma_plus_down_mhz", "gamma_plus_up_mhz"};
  if (qubit) t.columns.push_back("gamma_plus_up_same_sign_pairing_mhz");
  t.columns.insert(t.columns.end(), {"bound_mhz", "g_over_delta"});
  if (fit) t.columns.insert(t.columns.end(), {"gamma_fit_mhz", "fit_r_squared"});
  t.columns.insert(t.columns.end(), {"status", "reason"});
  const int levels = qubit ? 1 : cfg.kerr.n_b - 1;

  auto blocks = parallel_map<std::vector<std::vector<Cell>>>(static_cast<int>(pts.size()), jobs, [&](int i) {
    const RunConfig& c = pts[i];
    std::vector<std::vector<Cell>> rows;
    RateReport rep;
    Reasons base;
    try {
      rep = qubit ? induced_rates(c.rabi, bath) : induced_rates(c.kerr, bath);
    } catch (const ParametricResonance&) {
      base.mask("resonance");
    }
    double gamma_fit = std::numeric_limits<double>::quiet_NaN(), r2 = gamma_fit;
    if (fit && !base.masked) {
      try {
        RabiParams p = c.rabi;
        p.n_a = c.lindblad_n_a;
        const SystemModel m = c.kind == "rabi" ? build_rabi(p) : build_jc(p);
        const LevelRates& lr = rep.levels.front();
        const int start = lr.down() >= lr.up() ? m.space().index({1, 0}) : m.space().index({0, 0});
        const RelaxationRun run =
            relaxation_rate(m, {{build_ladder(m.space(), 1), c.kappa}}, start, excited_projector(m.space()),
                            c.lindblad_steps);
        gamma_fit = run.fit.gamma;
        r2 = run.fit.r_squared;
        if (run.fit.flagged) base.flag("fit_" + run.fit.reason);
      } catch (const ConvergenceError&) {
        base.mask("lindblad_convergence");
      } catch (const LabelingError&) {
        base.mask("floquet_labeling");
      }
    }
    for (int lv = 0; lv < levels; ++lv) {
      Reasons why = base;
      std::vector<Cell> row{to_ghz(c.omega_p()), to_mhz(std::abs(c.g_p())), static_cast<long long>(lv + 1)};
      const double dp = qubit ? c.rabi.pump_detuning() : c.kerr.pump_detuning(lv + 1);
      const double ratio = std::abs(c.g_p()) / dp;
      if (!base.masked || !rep.levels.empty()) {
        const LevelRates& r = rep.levels.at(lv);
        for (double x : {r.minus_down, r.minus_up, r.plus_down, r.plus_up}) row.push_back(to_mhz(x));
        if (qubit) row.push_back(to_mhz(rep.plus_up_same_sign_pairing));
      } else {
        for (int k = 0; k < (qubit ? 5 : 4); ++k) row.emplace_back();
      }
      row.push_back(maybe(to_mhz(c.kappa * ratio * ratio)));
      row.push_back(maybe(ratio));
      if (!(ratio <= kValidityRadius)) why.flag("outside_convergence_radius");
      if (fit) {
        row.push_back(maybe(to_mhz(gamma_fit)));
        row.push_back(maybe(r2));
      }
      row.emplace_back(why.status());
      row.emplace_back(why.joined());
      rows.push_back(std::move(row));
    }
    return rows;
  });
  for (auto& b : blocks)
    for (auto& r : b) t.rows.push_back(std::move(r));
  return t;
}

// ------------------------------------------------------------------ verify

Table cmd_verify(const std::vector<int>& ids, int jobs) {
  Table t;
  t.columns = {"criterion", "title", "result", "seconds", "detail"};
  for (const auto& r : acceptance::run_criteria(ids, jobs))
    t.rows.push_back({static_cast<long long>(r.id), r.title, std::string(r.passed() ? "PASS" : "FAIL"), r.seconds,
                      r.detail()});
  return t;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ParametricResonance*>(&e) || dynamic_cast<const NoBlindSpot*>(&e)) return kExitResonance;
  if (dynamic_cast<const InvalidParameter*>(&e) || dynamic_cast<const DimensionMismatch*>(&e)) return kExitResonance;
  if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const LabelingError*>(&e)) return kExitConvergence;
  return kExitConvergence;
}

}  // namespace tdsw::cli
