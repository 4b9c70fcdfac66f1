#include <doctest.h>

#include <cmath>

#include "tdsw/errors.hpp"
#include "tdsw/models.hpp"
#include "tdsw/swt_engine.hpp"
#include "tdsw/units.hpp"

using namespace tdsw;
using units::ghz;
using units::mhz;
using units::to_ghz;
using units::to_mhz;

namespace {

RabiParams rabi_ref(double wp_ghz, double g_mhz = 40.0, int n_a = 12) {
  return RabiParams{ghz(5.0), ghz(3.0), mhz(g_mhz), ghz(wp_ghz), 0.0, n_a};
}

KerrParams kerr_params(double wa, double wb, double wp_ghz, int n_b = 4, int n_a = 6) {
  KerrParams p;
  p.omega_a = ghz(wa);
  p.omega_b = ghz(wb);
  p.kerr = mhz(300.0);
  p.g_p = mhz(10.0);
  p.omega_p = ghz(wp_ghz);
  p.n_a = n_a;
  p.n_b = n_b;
  return p;
}
KerrParams kerr_top(double wp_ghz, int n_b = 4) { return kerr_params(2.0, 1.5, wp_ghz, n_b); }
KerrParams kerr_bottom(double wp_ghz) { return kerr_params(1.5, 2.0, wp_ghz); }

// Engine order-m RWA energies.
RVec engine_energies(const SystemModel& m, int order) {
  return effective_hamiltonian_rwa(swt_cascade(m), order).real_diagonal();
}

// Eight-term quadratic Kerr shift on the 0 -> 1 transition, transcribed independently.
double kerr_eight_term(const KerrParams& p) {
  const double wb = p.omega_b, k = p.kerr, wa = p.omega_a, wp = p.omega_p;
  const double om1 = wb - k - wa, op1 = wb - k + wa, om2 = wb - 3 * k - wa, op2 = wb - 3 * k + wa;
  double s = 0.0;
  for (int pm : {1, -1}) s += 1 / (om1 + pm * wp) + 1 / (op1 + pm * wp) - 1 / (om2 + pm * wp) - 1 / (op2 + pm * wp);
  return 2.0 * std::norm(p.g_p) * s;
}

}  // namespace

TEST_CASE("bare Hamiltonians") {
  const RabiParams p = rabi_ref(2.2, 40.0, 4);
  const SystemModel m = build_rabi(p);
  const RVec e = m.h0.real_diagonal();
  // Index 0 of the qubit is the ground state, E(g) = -w_q/2.
  CHECK(e(m.space().index({0, 0})) == doctest::Approx(-0.5 * p.omega_q + 0.5 * p.omega_a));
  CHECK(e(m.space().index({1, 2})) == doctest::Approx(0.5 * p.omega_q + 2.5 * p.omega_a));

  const KerrParams k = kerr_top(1.13);
  const SystemModel mk = build_kerr(k);
  const RVec ek = mk.h0.real_diagonal();
  auto level = [&](int n) { return ek(mk.space().index({n, 0})); };
  CHECK(level(1) - level(0) == doctest::Approx(k.omega_b - k.kerr));
  CHECK(level(2) - level(1) == doctest::Approx(k.omega_b - 3.0 * k.kerr));
  CHECK(ek(mk.space().index({0, 1})) - level(0) == doctest::Approx(k.omega_a));
}

TEST_CASE("JC coupling connects only |g,n+1> and |e,n>") {
  const SystemModel m = build_jc(rabi_ref(2.2, 40.0, 4));
  const HilbertSpace& sp = m.space();
  for (const auto& [key, a] : m.v.terms()) {
    for (int n = 0; n + 1 < 4; ++n) {
      CHECK(a.matrix()(sp.index({1, n + 1}), sp.index({0, n})) == cplx(0.0));
      CHECK(std::abs(a.matrix()(sp.index({0, n + 1}), sp.index({1, n}))) > 0.0);
    }
  }
}

TEST_CASE("chi2_qubit closed-form values") {
  CHECK(to_mhz(chi2_qubit(rabi_ref(2.2))) == doctest::Approx(14.3726).epsilon(1e-5));
  CHECK(to_mhz(chi2_qubit(rabi_ref(0.0))) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(std::abs(chi2_qubit(rabi_ref(4.0))) < 1e-15);
  CHECK(chi2_qubit(rabi_ref(2.2, 0.0)) == 0.0);
  CHECK_THROWS_AS(chi2_qubit(rabi_ref(2.0)), ParametricResonance);
}

TEST_CASE("chi2_jc values and Bloch-Siegert decomposition") {
  CHECK(to_mhz(chi2_jc(rabi_ref(0.0))) == doctest::Approx(-3.2).epsilon(1e-12));
  CHECK(to_mhz(chi2_jc(rabi_ref(4.0))) == doctest::Approx(3.2 / 3.0).epsilon(1e-12));
  double prev = std::abs(chi2_jc(rabi_ref(10.0)));
  for (double w : {20.0, 40.0, 80.0}) {
    const double c = std::abs(chi2_jc(rabi_ref(w)));
    CHECK(c < prev);
    prev = c;
  }
  for (double w : {0.0, 1.1, 2.2, 4.0, 6.3}) {
    const RabiParams p = rabi_ref(w);
    CHECK(chi2_qubit(p) - chi2_jc(p) == doctest::Approx(chi2_bloch_siegert(p)).epsilon(1e-14));
  }
}

TEST_CASE("order-2 qubit shift equals the engine on a grid") {
  for (double w : {0.7, 1.5, 2.2, 3.1, 4.4, 5.6, 6.8, 9.3}) {
    RabiParams p = rabi_ref(w, 40.0, 6);
    const SystemModel m = build_rabi(p);
    const double eng = transition_shift(m.space(), engine_energies(m, 2), qubit_transition());
    CHECK(eng == doctest::Approx(chi2_qubit(p)).epsilon(1e-10));
    const SystemModel j = build_jc(p);
    CHECK(transition_shift(j.space(), engine_energies(j, 2), qubit_transition()) ==
          doctest::Approx(chi2_jc(p)).epsilon(1e-10));
  }
}

TEST_CASE("two-tone shift") {
  const double g0 = mhz(40.0);
  RabiParams p = rabi_ref(2.2, 0.0);
  CHECK(chi2_two_tone(p, g0) == doctest::Approx(chi2_qubit(rabi_ref(0.0))).epsilon(1e-14));
  p = rabi_ref(0.0);
  CHECK(chi2_two_tone(p, g0) == doctest::Approx(2.0 * chi2_qubit(rabi_ref(0.0))).epsilon(1e-14));

  // Engine oracle: static coupling sqrt(2) g0 sigma_x (a + a^dag) plus one pump tone.
  // The multitone builder applies 2 g_static.
  const RabiParams q = rabi_ref(2.2, 25.0, 6);
  const SystemModel m = build_rabi_multitone(q.omega_q, q.omega_a, g0 / std::sqrt(2.0), {{q.omega_p, q.g_p}}, q.n_a);
  CHECK(transition_shift(m.space(), engine_energies(m, 2), qubit_transition()) ==
        doctest::Approx(chi2_two_tone(q, g0)).epsilon(1e-10));
  // A static coupling 2 g0 doubles the static term.
  const SystemModel m2 = build_rabi_multitone(q.omega_q, q.omega_a, g0, {{q.omega_p, q.g_p}}, q.n_a);
  CHECK(transition_shift(m2.space(), engine_energies(m2, 2), qubit_transition()) ==
        doctest::Approx(chi2_qubit(q) + 2.0 * chi2_qubit(rabi_ref(0.0))).epsilon(1e-10));

  // Cancellation of the static shift by a pump of the same amplitude.
  const RabiParams c = rabi_ref(0.0);
  const double w1 = two_tone_cancellation(c, g0);
  CHECK(w1 > c.omega_minus());
  CHECK(w1 < blind_spot(c).omega);
  RabiParams at = c;
  at.omega_p = w1;
  CHECK(std::abs(chi2_two_tone(at, g0)) < 1e-10 * std::abs(chi2_qubit(rabi_ref(0.0))));
  CHECK_THROWS_AS(two_tone_cancellation(c, 0.0), InvalidParameter);
}

TEST_CASE("chi2_kerr closed-form values") {
  CHECK(to_mhz(chi2_kerr(kerr_top(0.0))) == doctest::Approx(-0.2431).epsilon(1e-3));
  for (double w : {0.3, 0.9, 1.13, 2.4, 3.7}) {
    const KerrParams p = kerr_top(w);
    CHECK(chi2_kerr(p, 1) == doctest::Approx(kerr_eight_term(p)).epsilon(1e-12));
  }
  // Nearly harmonic ladder: the n_b and n_b + 1 terms cancel.
  KerrParams h = kerr_top(1.13);
  h.kerr = mhz(1e-6);
  KerrParams ref = h;
  ref.kerr = mhz(300.0);
  CHECK(std::abs(chi2_kerr(h)) < 1e-6 * std::abs(chi2_kerr(ref)));
  KerrParams z = kerr_top(1.13);
  z.g_p = 0.0;
  CHECK(chi2_kerr(z) == 0.0);
  CHECK(chi2_kerr_ground(z) == 0.0);
  CHECK_THROWS_AS(chi2_kerr(kerr_top(1.13), 0), InvalidParameter);
  CHECK_THROWS_AS(chi2_kerr(kerr_top(1.13, 4), 3), InvalidParameter);
}

TEST_CASE("chi2_kerr changes sign across the bottom-set window") {
  CHECK(chi2_kerr(kerr_bottom(0.3)) > 0.0);
  CHECK(chi2_kerr(kerr_bottom(0.45)) < 0.0);
  CHECK(chi2_kerr(kerr_bottom(1.0)) < 0.0);
}

TEST_CASE("chi2_kerr telescopes to the engine level shifts") {
  const KerrParams p = kerr_top(1.13, 5);
  const SystemModel m = build_kerr(p);
  const RVec e2 = rwa_project(swt_cascade(m).v_diag.at(2)).real_diagonal();
  const HilbertSpace& sp = m.space();
  auto pull = [&](int nb) { return e2(sp.index({nb, 1})) - e2(sp.index({nb, 0})); };
  CHECK(chi2_kerr_ground(p) == doctest::Approx(pull(0)).epsilon(1e-10));
  double sum = 0.0;
  for (int n = 1; n <= 3; ++n) {
    sum += chi2_kerr(p, n);
    CHECK(sum == doctest::Approx(pull(n) - pull(0)).epsilon(1e-10));
  }
}

TEST_CASE("quartic qubit terms") {
  const RabiParams p = rabi_ref(2.2);
  RabiParams p2 = p;
  p2.g_p = 2.0 * p.g_p;
  CHECK(chi4_qubit(p2) == doctest::Approx(16.0 * chi4_qubit(p)).epsilon(1e-12));
  CHECK(chi4_qubit(p, 2) == doctest::Approx(3.0 * chi4_qubit(p, 0)).epsilon(1e-12));

  for (double w : {1.3, 2.2, 3.1, 5.5, 7.1}) {
    const RabiParams q = rabi_ref(w);
    const SystemModel m = build_rabi(q);
    const SwtResult r = swt_cascade(m);
    const RVec e4 = rwa_project(r.v_diag.at(4)).real_diagonal();
    const QuarticQubitTerms t = quartic_qubit_terms(q);
    const HilbertSpace& sp = m.space();
    // Term generated by S2 acting on the squeezing remainder of order 2.
    const HarmonicOperator vod2 = hs_off_diag(m.h0, cplx(0.5) * hs_commutator(r.generators.at(0), m.v));
    const RVec e_ii = rwa_project(hs_pinch(m.h0, cplx(0.5) * hs_commutator(r.generators.at(1), vod2))).real_diagonal();
    for (int n = 0; n + 2 < q.n_a; ++n) {
      const double eg = e4(sp.index({0, n})), ee = e4(sp.index({1, n}));
      CHECK(eg - ee == doctest::Approx(2.0 * t.c_sigma_z * (n * n + n + 0.5)).epsilon(1e-9));
      for (int s : {0, 1})
        CHECK(e_ii(sp.index({s, n})) == doctest::Approx(t.t_resonator * (2 * n + 1) / 4.0).epsilon(1e-9));
    }
    const double total = transition_shift(sp, effective_hamiltonian_rwa(r, 4).real_diagonal(), qubit_transition());
    CHECK(total == doctest::Approx(chi2_qubit(q) + chi4_qubit(q)).epsilon(1e-9));
  }
}

TEST_CASE("quartic Kerr bracket: homogeneity and poles") {
  const KerrParams p = kerr_top(1.13);
  KerrParams p2 = p;
  p2.g_p = 2.0 * p.g_p;
  CHECK(chi4_kerr_01(p2) == doctest::Approx(16.0 * chi4_kerr_01(p)).epsilon(1e-12));
  // Poles at |Omega_-(3)| = w_a - w_b + 5K and |Omega_-(0)| = w_a - w_b - K.
  for (double pole : {std::abs(p.Omega(3, -1)), std::abs(p.Omega(0, -1))}) {
    KerrParams near = p, far = p;
    near.omega_p = pole + ghz(1e-4);
    far.omega_p = pole + ghz(0.05);
    INFO("pole at " << to_ghz(pole) << " GHz");
    CHECK(std::abs(chi4_kerr_01(near)) > 50.0 * std::abs(chi4_kerr_01(far)));
  }
}

TEST_CASE("qubit blind spot") {
  const BlindSpot bs = blind_spot(rabi_ref(2.2));
  CHECK(to_ghz(bs.omega) == doctest::Approx(4.0).epsilon(1e-14));
  RabiParams at = rabi_ref(0.0);
  at.omega_p = bs.omega;
  CHECK(std::abs(chi2_qubit(at)) < 1e-15);
  RabiParams inverted = rabi_ref(2.2);
  std::swap(inverted.omega_q, inverted.omega_a);
  CHECK_THROWS_AS(blind_spot(inverted), NoBlindSpot);
}

TEST_CASE("Kerr blind spot") {
  const KerrParams p = kerr_bottom(0.0);
  const BlindSpot bs = blind_spot(p);
  CHECK(to_ghz(bs.seed) == doctest::Approx(std::sqrt(0.2 * 0.4)).epsilon(1e-12));
  CHECK(bs.omega > p.Omega(1, -1));
  CHECK(bs.omega < -p.Omega(2, -1));
  CHECK(std::abs(to_mhz(bs.omega - bs.seed)) < 30.0);
  KerrParams at = p;
  at.omega_p = bs.omega;
  CHECK(std::abs(chi2_kerr(at)) < 1e-10 * std::abs(chi2_kerr(kerr_bottom(0.0))));
  CHECK(std::abs(chi2_kerr_ground(at)) > 0.0);
  CHECK_THROWS_AS(blind_spot(kerr_top(0.0)), NoBlindSpot);
}

TEST_CASE("bath spectrum is zero-temperature") {
  const BathSpectrum b = BathSpectrum::flat(mhz(1.0));
  CHECK(b(ghz(1.0)) == mhz(1.0));
  CHECK(b(0.0) == 0.0);
  CHECK(b(-ghz(1.0)) == 0.0);
  CHECK_THROWS_AS(BathSpectrum::flat(-1.0), InvalidParameter);
  const BathSpectrum bad([](double) { return -1.0; });
  CHECK_THROWS_AS(bad(1.0), InvalidParameter);
}

TEST_CASE("qubit induced rates") {
  const double k0 = mhz(1.0);
  const BathSpectrum bath = BathSpectrum::flat(k0);

  SUBCASE("closed forms near w_-") {
    const RabiParams p = rabi_ref(2.2);
    const LevelRates r = induced_rates(p, bath).levels.front();
    const double g2 = std::norm(p.g_p);
    const double expect = k0 * g2 * (1 / std::pow(p.omega_minus() + p.omega_p, 2) +
                                     1 / std::pow(p.omega_minus() - p.omega_p, 2));
    CHECK(r.minus_down == doctest::Approx(expect).epsilon(1e-14));
    CHECK(r.minus_up == 0.0);
    CHECK(r.minus_down > 100.0 * (r.plus_down + r.plus_up));
  }
  SUBCASE("heating near w_+ in the resonator vacuum") {
    const RabiParams p = rabi_ref(8.2);
    const RateReport rep = induced_rates(p, bath);
    const LevelRates& r = rep.levels.front();
    const double dominant = k0 * std::norm(p.g_p) / std::pow(p.omega_plus() - p.omega_p, 2);
    CHECK(r.plus_up > 0.0);
    CHECK(r.plus_up == doctest::Approx(dominant).epsilon(1e-14));
    CHECK(r.plus_up > 100.0 * (r.minus_down + r.minus_up + r.plus_down));
    CHECK(rep.plus_up_same_sign_pairing < 1e-3 * r.plus_up);
  }
  SUBCASE("each bath branch is bounded by kappa (g/Delta)^2") {
    // A rate sums two pump sidebands; each is at most kappa0 (g/Delta_p)^2.
    for (double w : {0.5, 5.0, 12.0}) {
      const RateReport rep = induced_rates(rabi_ref(w), bath);
      const double bound = k0 * std::pow(rep.g_abs / rep.delta_p, 2) * (1.0 + 1e-12);
      const LevelRates& r = rep.levels.front();
      for (double x : {r.minus_down, r.minus_up, r.plus_down, r.plus_up}) CHECK(x <= 2.0 * bound);
      // Above w_q only one sideband of each rate survives at zero temperature.
      if (w > 5.0)
        for (double x : {r.minus_down, r.minus_up, r.plus_down, r.plus_up}) CHECK(x <= bound);
    }
  }
  SUBCASE("rates do not cancel at the blind spot") {
    const LevelRates r = induced_rates(rabi_ref(4.0), bath).levels.front();
    CHECK(r.down() > 0.0);
  }
  SUBCASE("quadratic in g and inverse square in the detuning") {
    const LevelRates a = induced_rates(rabi_ref(2.2, 20.0), bath).levels.front();
    const LevelRates b = induced_rates(rabi_ref(2.2, 40.0), bath).levels.front();
    CHECK(b.minus_down == doctest::Approx(4.0 * a.minus_down).epsilon(1e-14));
    CHECK(b.plus_down == doctest::Approx(4.0 * a.plus_down).epsilon(1e-14));
    // Doubling the detuning from w_- (2.2 -> 2.4 GHz) quarters the dominant term.
    const RabiParams p1 = rabi_ref(2.2), p2 = rabi_ref(2.4);
    const double d1 = induced_rates(p1, bath).levels.front().minus_down;
    const double d2 = induced_rates(p2, bath).levels.front().minus_down;
    const double sub1 = k0 * std::norm(p1.g_p) / std::pow(p1.omega_minus() + p1.omega_p, 2);
    const double sub2 = k0 * std::norm(p2.g_p) / std::pow(p2.omega_minus() + p2.omega_p, 2);
    CHECK((d2 - sub2) == doctest::Approx(0.25 * (d1 - sub1)).epsilon(1e-12));
  }
}

TEST_CASE("Kerr induced rates are reported per Fock level") {
  const KerrParams p = kerr_top(1.13);
  const RateReport rep = induced_rates(p, BathSpectrum::flat(mhz(1.0)));
  REQUIRE(rep.levels.size() == static_cast<std::size_t>(p.n_b - 1));
  for (std::size_t i = 0; i < rep.levels.size(); ++i) {
    const LevelRates& r = rep.levels[i];
    CHECK(r.n_b == static_cast<int>(i) + 1);
    CHECK(r.down() + r.up() > 0.0);
    const double om = p.Omega(r.n_b, -1);
    double expect = 0.0;
    for (int s : {1, -1}) {
      const double d = om + s * p.omega_p;
      if (p.omega_a + d > 0.0) expect += mhz(1.0) * std::norm(p.g_p) / (d * d);
    }
    CHECK(r.minus_down == doctest::Approx(expect).epsilon(1e-14));
  }
  CHECK(std::isnan(rep.plus_up_same_sign_pairing));
}

TEST_CASE("parameter validation") {
  RabiParams p = rabi_ref(2.2);
  p.omega_q = -1.0;
  CHECK_THROWS_AS(build_rabi(p), InvalidParameter);
  p = rabi_ref(2.2, 40.0, 3);
  CHECK_THROWS_AS(build_rabi(p), InvalidParameter);
  CHECK_THROWS_AS(build_rabi(rabi_ref(0.0)), InvalidParameter);
  CHECK_THROWS_AS(chi2_qubit(rabi_ref(-1.0)), InvalidParameter);
  KerrParams k = kerr_top(1.13, 2);
  CHECK_THROWS_AS(build_kerr(k), InvalidParameter);
  k = kerr_top(1.13);
  k.kerr = 0.0;
  CHECK_THROWS_AS(build_kerr(k), InvalidParameter);
}
