#include "tdsw/models.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "tdsw/errors.hpp"

namespace tdsw {

namespace {

void require_finite_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidParameter(std::string(name) + " must be positive");
}

// 1/den with the closed-form resonance guard.
double inv(double den, double threshold) {
  if (std::abs(den) < threshold)
    throw ParametricResonance("closed form hits a resonant denominator " + std::to_string(den), -1, -1, {},
                              den);
  return 1.0 / den;
}

double qubit_threshold(const RabiParams& p) { return 1e-6 * (p.omega_q + p.omega_a); }
double kerr_threshold(const KerrParams& p) { return 1e-6 * (p.omega_b + p.omega_a); }

// sum_+- 1/(x +- w)
double pair_sum(double x, double w, double threshold) { return inv(x + w, threshold) + inv(x - w, threshold); }

}  // namespace

cplx RabiParams::drive_amplitude() const { return g_p * std::polar(1.0, -phi_p); }

double RabiParams::pump_detuning() const {
  double d = std::numeric_limits<double>::infinity();
  for (double w : {omega_minus(), omega_plus()})
    for (int s : {1, -1}) d = std::min(d, std::abs(w + s * omega_p));
  return d;
}

void RabiParams::validate(bool require_pump) const {
  require_finite_positive(omega_q, "omega_q");
  require_finite_positive(omega_a, "omega_a");
  if (require_pump)
    require_finite_positive(omega_p, "omega_p");
  else if (omega_p < 0.0 || !std::isfinite(omega_p))
    throw InvalidParameter("omega_p must be >= 0");
  if (!std::isfinite(std::abs(g_p))) throw InvalidParameter("g_p must be finite");
  if (n_a < 4) throw InvalidParameter("n_a must be >= 4");
}

double KerrParams::Omega(int n, int sigma) const { return omega_b + kerr - 2.0 * kerr * n + sigma * omega_a; }

cplx KerrParams::drive_amplitude() const { return g_p * std::polar(1.0, -phi_p); }

double KerrParams::pump_detuning(int level) const {
  double d = std::numeric_limits<double>::infinity();
  for (int sigma : {1, -1})
    for (int s : {1, -1}) d = std::min(d, std::abs(Omega(level, sigma) + s * omega_p));
  return d;
}

void KerrParams::validate(bool require_pump) const {
  require_finite_positive(omega_a, "omega_a");
  require_finite_positive(omega_b, "omega_b");
  require_finite_positive(kerr, "K");
  if (require_pump)
    require_finite_positive(omega_p, "omega_p");
  else if (omega_p < 0.0 || !std::isfinite(omega_p))
    throw InvalidParameter("omega_p must be >= 0");
  if (!std::isfinite(std::abs(g_p))) throw InvalidParameter("g_p must be finite");
  if (n_b < 3) throw InvalidParameter("n_b must be >= 3");
  if (n_a < 2) throw InvalidParameter("n_a must be >= 2");
}

namespace {

SystemModel assemble(std::string kind, const Operator& h0, const Operator& coupling, double omega_p, cplx amp) {
  ToneBasis basis({omega_p});
  HarmonicOperator v(basis, h0.space());
  if (amp != cplx(0.0)) {
    v.add_term(basis.unit_key(0, 1), amp * coupling);
    v.add_term(basis.unit_key(0, -1), std::conj(amp) * coupling);
  }
  SystemModel m{std::move(kind), h0, std::move(v), 1};
  m.validate();
  return m;
}

Operator rabi_h0(const HilbertSpace& space, double omega_q, double omega_a) {
  const Operator id = Operator::identity(space);
  return cplx(-0.5 * omega_q) * sigma_z(space, 0) + cplx(omega_a) * (build_number(space, 1) + cplx(0.5) * id);
}

}  // namespace

SystemModel build_rabi(const RabiParams& p) {
  p.validate();
  HilbertSpace space({2, p.n_a});
  const Operator a = build_ladder(space, 1);
  const Operator x = sigma_x(space, 0) * (a + dagger(a));
  return assemble("rabi", rabi_h0(space, p.omega_q, p.omega_a), x, p.omega_p, p.drive_amplitude());
}

SystemModel build_jc(const RabiParams& p) {
  p.validate();
  HilbertSpace space({2, p.n_a});
  const Operator a = build_ladder(space, 1);
  const Operator x = sigma_plus(space, 0) * a + sigma_minus(space, 0) * dagger(a);
  return assemble("jc", rabi_h0(space, p.omega_q, p.omega_a), x, p.omega_p, p.drive_amplitude());
}

SystemModel build_kerr(const KerrParams& p) {
  p.validate();
  HilbertSpace space({p.n_b, p.n_a});
  const Operator nb = build_number(space, 0);
  const Operator h0 = cplx(p.omega_b) * nb - cplx(p.kerr) * (nb * nb) + cplx(p.omega_a) * build_number(space, 1);
  const Operator a = build_ladder(space, 1);
  const Operator b = build_ladder(space, 0);
  const Operator x = (b + dagger(b)) * (a + dagger(a));
  return assemble("kerr", h0, x, p.omega_p, p.drive_amplitude());
}

SystemModel build_rabi_multitone(double omega_q, double omega_a, double g_static, const std::vector<Tone>& tones,
                                 int n_a) {
  RabiParams check{omega_q, omega_a, 0.0, 1.0, 0.0, n_a};
  check.validate();
  std::vector<double> w;
  for (const auto& t : tones) w.push_back(t.omega);
  ToneBasis basis(w);
  HilbertSpace space({2, n_a});
  const Operator a = build_ladder(space, 1);
  const Operator x = sigma_x(space, 0) * (a + dagger(a));
  HarmonicOperator v(basis, space);
  if (g_static != 0.0) v.add_term(basis.zero_key(), cplx(2.0 * g_static) * x);
  for (int i = 0; i < basis.size(); ++i) {
    if (tones[i].amplitude == cplx(0.0)) continue;
    v.add_term(basis.unit_key(i, 1), tones[i].amplitude * x);
    v.add_term(basis.unit_key(i, -1), std::conj(tones[i].amplitude) * x);
  }
  SystemModel m{"rabi-multitone", rabi_h0(space, omega_q, omega_a), std::move(v), 1};
  m.validate();
  return m;
}

double chi2_qubit(const RabiParams& p) {
  p.validate(false);
  const double th = qubit_threshold(p);
  const double g2 = std::norm(p.g_p);
  return -2.0 * g2 * (pair_sum(p.omega_minus(), p.omega_p, th) + pair_sum(p.omega_plus(), p.omega_p, th));
}

double chi2_jc(const RabiParams& p) {
  p.validate(false);
  return -2.0 * std::norm(p.g_p) * pair_sum(p.omega_minus(), p.omega_p, qubit_threshold(p));
}

double chi2_bloch_siegert(const RabiParams& p) {
  p.validate(false);
  return -2.0 * std::norm(p.g_p) * pair_sum(p.omega_plus(), p.omega_p, qubit_threshold(p));
}

double chi2_two_tone(const RabiParams& p, double g0) {
  RabiParams stat = p;
  stat.g_p = g0;
  stat.omega_p = 0.0;
  return chi2_qubit(p) + chi2_qubit(stat);
}

double two_tone_cancellation(const RabiParams& p, double g0) {
  p.validate(false);
  if (g0 == 0.0) throw InvalidParameter("static amplitude must be nonzero");
  if (std::abs(p.g_p) == 0.0) throw InvalidParameter("pump amplitude must be nonzero");
  const double lo = p.omega_minus();
  const double hi = blind_spot(p).omega;
  auto f = [&](double w) {
    RabiParams q = p;
    q.omega_p = w;
    return chi2_two_tone(q, g0);
  };
  // Stay clear of the resonance guard at the w_- pole.
  const double eps = 10.0 * qubit_threshold(p);
  std::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, lo + eps, hi, boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (r.first + r.second);
}

double kerr_resonator_pull(const KerrParams& p, int n) {
  p.validate(false);
  if (n < 0 || n + 1 >= p.n_b)
    throw InvalidParameter("Kerr level " + std::to_string(n) + " needs level n+1 inside the truncation");
  const double th = kerr_threshold(p);
  const double g2 = std::norm(p.g_p);
  double f = 0.0;
  for (int sigma : {1, -1}) {
    if (n > 0) f += n * pair_sum(p.Omega(n, sigma), p.omega_p, th);
    f -= (n + 1) * pair_sum(p.Omega(n + 1, sigma), p.omega_p, th);
  }
  return g2 * f;
}

double chi2_kerr(const KerrParams& p, int n_b) {
  if (n_b < 1) throw InvalidParameter("chi2_kerr needs n_b >= 1");
  return kerr_resonator_pull(p, n_b) - kerr_resonator_pull(p, n_b - 1);
}

double chi2_kerr_ground(const KerrParams& p) { return kerr_resonator_pull(p, 0); }

QuarticQubitTerms quartic_qubit_terms(const RabiParams& p) {
  p.validate(false);
  const double th = qubit_threshold(p);
  const double wp = p.omega_p, wq = p.omega_q, wa = p.omega_a;
  const double g4 = std::norm(p.g_p) * std::norm(p.g_p);
  // sp[s] = 1/(w_s + w_p), sm[s] = 1/(w_s - w_p); s = 0 -> w_+, s = 1 -> w_-
  const double ws[2] = {p.omega_plus(), p.omega_minus()};
  double sp[2], sm[2];
  for (int s = 0; s < 2; ++s) {
    sp[s] = inv(ws[s] + wp, th);
    sm[s] = inv(ws[s] - wp, th);
  }
  double c = 0.0;
  for (int s = 0; s < 2; ++s) {
    const int o = 1 - s;
    c += std::pow(sp[s] + sm[s], 3) - sp[s] * sp[s] * sm[s] - sm[s] * sm[s] * sp[s];
    c += 2.0 * (sp[s] + sm[s]) * std::pow(sp[o] + sm[o], 2);
    c += -2.0 * sp[s] * sp[o] * sm[o] - 2.0 * sm[s] * sm[o] * sp[o];
  }
  double sum4 = 0.0;
  for (int a : {1, -1})
    for (int b : {1, -1}) sum4 += inv(wq + a * wa + b * wp, th);
  const double t = -g4 * (inv(wa, th) * sum4 * sum4 +
                          inv(wa + wp, th) * std::pow(inv(wq + wa + wp, th) + inv(wq - wa - wp, th), 2) +
                          inv(wa - wp, th) * std::pow(inv(wq - wa + wp, th) + inv(wq + wa - wp, th), 2));
  return {g4 * c, t};
}

double chi4_qubit(const RabiParams& p, int resonator_n) {
  if (resonator_n < 0) throw InvalidParameter("resonator level must be >= 0");
  return 4.0 * quartic_qubit_terms(p).c_sigma_z * (resonator_n + 1);
}

double chi4_kerr_01(const KerrParams& p) {
  p.validate(false);
  const double th = kerr_threshold(p);
  double t = 0.0;
  for (int s : {1, -1}) {
    auto f = [&](int n, int sigma) { return inv(p.Omega(n, sigma) + s * p.omega_p, th); };
    t += -18.0 * f(3, -1) * f(3, -1) * f(2, -1) + 36.0 * f(2, -1) * f(3, -1) * f(2, 1) +
         54.0 * f(2, 1) * f(3, -1) * f(2, 1) + 6.0 * f(0, -1) * f(2, -1) * f(1, 1) +
         4.0 * f(0, 1) * f(1, -1) * f(1, 1);
  }
  const double g4 = std::norm(p.g_p) * std::norm(p.g_p);
  return -0.25 * g4 * t;
}

BlindSpot blind_spot(const RabiParams& p) {
  p.validate(false);
  if (!(p.omega_q > p.omega_a)) throw NoBlindSpot("no blind spot exists for omega_q <= omega_a");
  const double w = std::sqrt(p.omega_q * p.omega_q - p.omega_a * p.omega_a);
  return {w, w};
}

BlindSpot blind_spot(const KerrParams& p) {
  p.validate(false);
  const double lo = p.Omega(1, -1);
  const double hi = -p.Omega(2, -1);
  if (!(lo > 0.0 && hi > 0.0))
    throw NoBlindSpot("Kerr blind spot needs Omega_-(1) > 0 > Omega_-(2), i.e. 0 < w_b - K - w_a < 2K");
  BlindSpot out;
  out.seed = std::sqrt(lo * hi);
  auto f = [&](double w) {
    KerrParams q = p;
    q.omega_p = w;
    q.g_p = 1.0;
    return chi2_kerr(q, 1);
  };
  const double eps = 10.0 * kerr_threshold(p);
  std::uintmax_t it = 300;
  auto r = boost::math::tools::toms748_solve(f, lo + eps, hi - eps, boost::math::tools::eps_tolerance<double>(52),
                                             it);
  out.omega = 0.5 * (r.first + r.second);
  return out;
}

BathSpectrum::BathSpectrum(std::function<double(double)> positive_branch) : f_(std::move(positive_branch)) {
  if (!f_) throw InvalidParameter("bath spectrum function is empty");
}

BathSpectrum BathSpectrum::flat(double kappa0) {
  if (!(kappa0 >= 0.0)) throw InvalidParameter("kappa must be >= 0");
  return BathSpectrum([kappa0](double) { return kappa0; });
}

double BathSpectrum::operator()(double omega) const {
  if (omega <= 0.0) return 0.0;
  const double k = f_(omega);
  if (!(k >= 0.0)) throw InvalidParameter("bath spectrum must be nonnegative");
  return k;
}

namespace {

// Per-level rates; Omega_s,+-(n) = Omega_s(n) +- w_p.
LevelRates level_rates(int n_b, double om_minus, double om_plus, double omega_a, double omega_p, double g2,
                       const BathSpectrum& bath, double th) {
  LevelRates r;
  r.n_b = n_b;
  for (int s : {1, -1}) {
    const double dm = om_minus + s * omega_p;
    const double dp = om_plus + s * omega_p;
    const double wm = g2 * inv(dm, th) * inv(dm, th);
    const double wpl = g2 * inv(dp, th) * inv(dp, th);
    r.minus_down += bath(omega_a + dm) * wm;
    r.minus_up += bath(-omega_a - dm) * wm;
    r.plus_down += bath(-omega_a + dp) * wpl;
    r.plus_up += bath(omega_a - dp) * wpl;
  }
  return r;
}

}  // namespace

RateReport induced_rates(const RabiParams& p, const BathSpectrum& bath) {
  p.validate(false);
  const double th = qubit_threshold(p);
  const double g2 = std::norm(p.g_p);
  RateReport rep;
  rep.levels.push_back(level_rates(1, p.omega_minus(), p.omega_plus(), p.omega_a, p.omega_p, g2, bath, th));
  double lit = 0.0;
  for (int s : {1, -1}) {
    const double d = p.omega_plus() + s * p.omega_p;
    lit += bath(-p.omega_q + s * p.omega_p) * g2 * inv(d, th) * inv(d, th);
  }
  rep.plus_up_same_sign_pairing = lit;
  rep.delta_p = p.pump_detuning();
  rep.g_abs = std::abs(p.g_p);
  return rep;
}

RateReport induced_rates(const KerrParams& p, const BathSpectrum& bath) {
  p.validate(false);
  const double th = kerr_threshold(p);
  const double g2 = std::norm(p.g_p);
  RateReport rep;
  rep.delta_p = std::numeric_limits<double>::infinity();
  for (int n = 1; n < p.n_b; ++n) {
    rep.levels.push_back(level_rates(n, p.Omega(n, -1), p.Omega(n, 1), p.omega_a, p.omega_p, g2, bath, th));
    rep.delta_p = std::min(rep.delta_p, p.pump_detuning(n));
  }
  rep.g_abs = std::abs(p.g_p);
  return rep;
}

}  // namespace tdsw
