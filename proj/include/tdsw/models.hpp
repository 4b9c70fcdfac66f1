#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "tdsw/swt_engine.hpp"

namespace tdsw {

// Qubit (subsystem 0) coupled to a resonator (subsystem 1) through
// g(t) = 2|g_p| cos(w_p t + phi_p); all frequencies in rad/ns.
struct RabiParams {
  double omega_q = 0.0;
  double omega_a = 0.0;
  cplx g_p = 0.0;
  double omega_p = 0.0;
  double phi_p = 0.0;
  int n_a = 12;

  double omega_minus() const { return omega_q - omega_a; }
  double omega_plus() const { return omega_q + omega_a; }
  // Amplitude of the exp(-i w_p t) component of g(t).
  cplx drive_amplitude() const;
  // Detuning entering the validity ratio: min |w_sigma +- w_p|.
  double pump_detuning() const;
  void validate(bool require_pump = true) const;
};

// Kerr oscillator (subsystem 0, H = w_b n - K n^2) coupled to a resonator.
struct KerrParams {
  double omega_a = 0.0;
  double omega_b = 0.0;
  double kerr = 0.0;
  cplx g_p = 0.0;
  double omega_p = 0.0;
  double phi_p = 0.0;
  int n_a = 10;
  int n_b = 4;

  // Omega_sigma(n) = w_b + K - 2Kn + sigma w_a, the (n-1 -> n) transition minus/plus w_a.
  double Omega(int n, int sigma) const;
  cplx drive_amplitude() const;
  // min |Omega_sigma(n) +- w_p| over the given levels.
  double pump_detuning(int n_b_level) const;
  void validate(bool require_pump = true) const;
};

struct Tone {
  double omega = 0.0;
  cplx amplitude = 0.0;  // exp(-i w t) component of the coupling
};

SystemModel build_rabi(const RabiParams& p);
SystemModel build_jc(const RabiParams& p);
SystemModel build_kerr(const KerrParams& p);
// Static coupling 2 g_static sigma_x (a + a^dagger) plus arbitrary tones.
SystemModel build_rabi_multitone(double omega_q, double omega_a, double g_static,
                                 const std::vector<Tone>& tones, int n_a);

// Closed-form second-order shifts (resonator-frequency splittings).
double chi2_qubit(const RabiParams& p);
double chi2_jc(const RabiParams& p);
// Bloch-Siegert (w_+) partial sum of chi2_qubit.
double chi2_bloch_siegert(const RabiParams& p);
// Static tone g0 (w_0 = 0) plus the pump tone of p. The static term is the w_p -> 0 limit of
// chi2_qubit; it is the exact shift of a static coupling sqrt(2) g0 sigma_x (a + a^dagger), whose
// mean square matches that of the tone 2 g0 cos(w t).
double chi2_two_tone(const RabiParams& p, double g0);
// Pump frequency w_1 in (w_-, w_BS) at which a pump of amplitude p.g_p cancels the static shift of g0.
double two_tone_cancellation(const RabiParams& p, double g0);

// Exact transition shift chi(n_b-1; n_b); equals the eight-term closed form at n_b = 1.
double chi2_kerr(const KerrParams& p, int n_b = 1);
// Coefficient of n_a in the order-2 energy of Kerr level n.
double kerr_resonator_pull(const KerrParams& p, int n);
double chi2_kerr_ground(const KerrParams& p);

// Quartic qubit coefficients: H4 = C sigma_z (n^2 + n + 1/2) + T (2n + 1)/4 + ...
struct QuarticQubitTerms {
  double c_sigma_z = 0.0;
  double t_resonator = 0.0;
};
QuarticQubitTerms quartic_qubit_terms(const RabiParams& p);
// Fourth-order splitting on the n -> n+1 resonator transition: 4 C (n+1).
double chi4_qubit(const RabiParams& p, int resonator_n = 0);
// Five-term quartic Kerr bracket with weights -18, 36, 54, 6, 4 and prefactor -|g|^4/4.
double chi4_kerr_01(const KerrParams& p);

struct BlindSpot {
  double seed = 0.0;
  double omega = 0.0;
};
BlindSpot blind_spot(const RabiParams& p);
BlindSpot blind_spot(const KerrParams& p);

// Zero-temperature bath: kappa(w) = 0 for w <= 0.
class BathSpectrum {
 public:
  explicit BathSpectrum(std::function<double(double)> positive_branch);
  static BathSpectrum flat(double kappa0);
  double operator()(double omega) const;

 private:
  std::function<double(double)> f_;
};

struct LevelRates {
  int n_b = 1;
  double minus_down = 0.0;
  double minus_up = 0.0;
  double plus_down = 0.0;
  double plus_up = 0.0;
  double down() const { return minus_down + plus_down; }
  double up() const { return minus_up + plus_up; }
};

struct RateReport {
  std::vector<LevelRates> levels;  // qubit: a single n_b = 1 entry
  // Qubit only: heating with kappa(-w_q +- w_p) paired to 1/(w_+ +- w_p).
  double plus_up_same_sign_pairing = std::numeric_limits<double>::quiet_NaN();
  double delta_p = 0.0;
  double g_abs = 0.0;
};

RateReport induced_rates(const RabiParams& p, const BathSpectrum& bath);
RateReport induced_rates(const KerrParams& p, const BathSpectrum& bath);

}  // namespace tdsw
