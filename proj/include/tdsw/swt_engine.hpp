#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdsw/harmonic_series.hpp"

namespace tdsw {

// Diagonal H0 plus periodic interaction V(t), both in angular units (rad/ns).
struct SystemModel {
  std::string kind;  // "rabi", "jc", "kerr", "rabi-multitone", ...
  Operator h0;
  HarmonicOperator v;
  // Subsystem carrying the linear resonator (the last one for shipped models).
  int resonator = 1;

  const HilbertSpace& space() const { return h0.space(); }
  const ToneBasis& basis() const { return v.basis(); }
  void validate() const;
};

struct ResonanceFlag {
  int row = 0;
  int col = 0;
  ToneKey key;
  double denominator = 0.0;
  int order = 0;  // generator order that met it
};

struct SlowDiagonalFlag {
  int order = 0;
  ToneKey key;
  double frequency = 0.0;
};

struct ConvergenceDiag {
  double max_generator_element = 0.0;
  double min_denominator = std::numeric_limits<double>::infinity();
  double radius_estimate = 0.0;
  double resonance_threshold = 0.0;
  std::vector<ResonanceFlag> resonance_flags;
  std::vector<std::pair<int, int>> degenerate_pairs;
  std::vector<SlowDiagonalFlag> slow_diagonal_flags;
  std::vector<std::string> warnings;
};

enum class ResonancePolicy { Throw, Record };

struct SolveOptions {
  // Absolute threshold on |(E_l - E_j) + k.w|; <= 0 selects 1e-6 * max H0 gap.
  double resonance_threshold = 0.0;
  ResonancePolicy policy = ResonancePolicy::Throw;
};

double default_resonance_threshold(const Operator& h0);

// Particular solution of i dS/dt + [S,H0] + V_od = 0:
//   s_jl(k) = -v_jl(k) / ((E_l - E_j) + k.w).
// Updates diag (may be null) with denominators and flags.
HarmonicOperator solve_generator(const Operator& h0, const HarmonicOperator& v_od,
                                 const SolveOptions& opts = {}, ConvergenceDiag* diag = nullptr,
                                 int order = 1);

struct SwtOptions {
  int max_order = 4;
  // Also eliminate off-diagonal terms through this order even when they cannot
  // reach the retained diagonal orders (0 = only what the diagonals need).
  int eliminate_through = 0;
  SolveOptions solve;
  // When set, diagonal terms with |k.w| < 10 * linewidth are reported.
  std::optional<double> linewidth;
};

struct SwtResult {
  Operator h0;
  ToneBasis basis;
  int max_order = 0;
  // generators[j] is S^(j+1), an order-(j+1) generator.
  std::vector<HarmonicOperator> generators;
  // order -> diagonal (pinched) interaction at that order
  std::map<int, HarmonicOperator> v_diag;
  // order -> off-diagonal remainder left after the last generator
  std::map<int, HarmonicOperator> v_offdiag;
  ConvergenceDiag diagnostics;
};

SwtResult swt_cascade(const SystemModel& model, const SwtOptions& opts = {});

// H0 + sum_{m<=order} rwa_project(v_diag[m]).
Operator effective_hamiltonian_rwa(const SwtResult& r, int order);
// H0 + sum_{m<=order} v_diag[m] as a time function.
HarmonicOperator effective_hamiltonian_full(const SwtResult& r, int order);

// Dressed-shift bookkeeping shared by the engine and the Floquet backend.
// f(level) = E(level, n+1) - E(level, n) on the resonator; chi = f(plus) - f(minus).
struct TransitionSpec {
  int plus_level = 0;
  int minus_level = 1;
  int resonator_n = 0;
  int nonlinear_subsystem = 0;
  int resonator_subsystem = 1;
};

// Qubit: chi = f(g) - f(e), the sign convention of the closed-form qubit shift.
TransitionSpec qubit_transition(int resonator_n = 0);
// Kerr: chi(n_b-1; n_b) = f(n_b) - f(n_b-1).
TransitionSpec kerr_transition(int n_b = 1, int resonator_n = 0);

int level_index(const HilbertSpace& space, const TransitionSpec& t, int level, int resonator_n);
double transition_shift(const HilbertSpace& space, const RVec& energies, const TransitionSpec& t);

}  // namespace tdsw
