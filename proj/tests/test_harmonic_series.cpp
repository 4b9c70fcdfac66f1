#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tdsw/errors.hpp"
#include "tdsw/harmonic_series.hpp"
#include "tdsw/models.hpp"
#include "tdsw/swt_engine.hpp"
#include "tdsw/units.hpp"

using namespace tdsw;
using units::ghz;
using units::mhz;

namespace {

Operator random_operator(const HilbertSpace& sp, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Mat m(sp.total_dim(), sp.total_dim());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return Operator(sp, m);
}

// Random series on keys -2..2 of a single tone; Hermitian as a time function when requested.
HarmonicOperator random_series(const ToneBasis& b, const HilbertSpace& sp, std::mt19937& rng, bool hermitian) {
  HarmonicOperator h(b, sp);
  for (int k = 0; k <= 2; ++k) {
    Operator a = random_operator(sp, rng);
    if (hermitian && k == 0) a = cplx(0.5) * (a + dagger(a));
    h.add_term({k}, a);
    if (k > 0) h.add_term({-k}, hermitian ? dagger(a) : random_operator(sp, rng));
  }
  return h;
}

}  // namespace

TEST_CASE("ToneBasis validates tones") {
  CHECK_THROWS_AS(ToneBasis({0.0}), InvalidParameter);
  CHECK_THROWS_AS(ToneBasis({-1.0}), InvalidParameter);
  CHECK_THROWS_AS(ToneBasis({1.0, 1.0 + 1e-12}), InvalidParameter);
  ToneBasis b({2.0, 3.0});
  CHECK(b.frequency({1, -2}) == doctest::Approx(-4.0));
  CHECK(b.zero_key() == ToneKey{0, 0});
  CHECK(b.unit_key(1, -1) == ToneKey{0, -1});
  CHECK_THROWS_AS(b.frequency({1}), DimensionMismatch);
}

TEST_CASE("commutator adds tone keys") {
  ToneBasis b({1.3});
  HilbertSpace sp({3});
  std::mt19937 rng(2);
  const Operator a = random_operator(sp, rng), c = random_operator(sp, rng);
  HarmonicOperator ha(b, sp), hb(b, sp);
  ha.add_term({1}, a);
  hb.add_term({-1}, c);
  const HarmonicOperator r = hs_commutator(ha, hb);
  CHECK(r.terms().size() == 1);
  CHECK((r.term({0}) - commutator(a, c)).max_abs() < 1e-14);
}

TEST_CASE("commutator of mismatched bases throws") {
  HilbertSpace sp({2});
  HarmonicOperator a(ToneBasis({1.0}), sp), b(ToneBasis({2.0}), sp);
  CHECK_THROWS_AS(hs_commutator(a, b), DimensionMismatch);
}

TEST_CASE("self-commutator of a Hermitian series vanishes at every instant") {
  ToneBasis b({2.1});
  HilbertSpace sp({2, 3});
  std::mt19937 rng(5);
  const HarmonicOperator h = random_series(b, sp, rng, true);
  CHECK(h.is_hermitian());
  const HarmonicOperator c = hs_commutator(h, h);
  std::uniform_real_distribution<double> ut(0.0, 10.0);
  for (int i = 0; i < 10; ++i) CHECK(evaluate_at_time(c, ut(rng)).max_abs() < 1e-12 * h.max_abs() * h.max_abs());
}

TEST_CASE("Rabi [S1, V] carries keys 0 and +-2 only") {
  RabiParams p{ghz(5.0), ghz(3.0), mhz(40.0), ghz(2.2), 0.0, 6};
  const SystemModel m = build_rabi(p);
  const HarmonicOperator s1 = solve_generator(m.h0, hs_off_diag(m.h0, m.v));
  const HarmonicOperator c = hs_commutator(s1, m.v);
  for (const auto& [k, a] : c.terms()) CHECK((k == ToneKey{0} || k == ToneKey{2} || k == ToneKey{-2}));
  CHECK(c.has_term({0}));
  CHECK(c.has_term({2}));
}

TEST_CASE("evaluate_at_time basics") {
  ToneBasis b({0.7});
  HilbertSpace sp({2});
  const Operator x = sigma_x(sp, 0);
  CHECK((evaluate_at_time(HarmonicOperator::constant(b, x), 3.3) - x).max_abs() == 0.0);
  const double g = 0.04;
  HarmonicOperator h(b, sp);
  h.add_term({1}, cplx(g) * x);
  h.add_term({-1}, cplx(g) * x);
  CHECK((evaluate_at_time(h, 0.0) - cplx(2.0 * g) * x).max_abs() < 1e-15);
  const double t = 1.9;
  CHECK((evaluate_at_time(h, t) - cplx(2.0 * g * std::cos(0.7 * t)) * x).max_abs() < 1e-15);
}

TEST_CASE("evaluate_at_time is a homomorphism") {
  ToneBasis b({1.7});
  HilbertSpace sp({2, 3});
  std::mt19937 rng(9);
  const HarmonicOperator ha = random_series(b, sp, rng, false);
  const HarmonicOperator hb = random_series(b, sp, rng, false);
  const cplx s(0.4, 0.9);
  std::uniform_real_distribution<double> ut(-5.0, 5.0);
  for (int i = 0; i < 10; ++i) {
    const double t = ut(rng);
    const Operator a = evaluate_at_time(ha, t), bb = evaluate_at_time(hb, t);
    const double scale = a.max_abs() * bb.max_abs() * sp.total_dim();
    CHECK((evaluate_at_time(hs_commutator(ha, hb), t) - commutator(a, bb)).max_abs() <= 1e-12 * scale);
    CHECK((evaluate_at_time(ha + s * hb, t) - (a + s * bb)).max_abs() <= 1e-12 * scale);
    CHECK((evaluate_at_time(hs_dagger(ha), t) - dagger(a)).max_abs() <= 1e-12 * a.max_abs());
  }
}

TEST_CASE("time derivative matches a finite difference") {
  ToneBasis b({1.1});
  HilbertSpace sp({3});
  std::mt19937 rng(4);
  const HarmonicOperator h = random_series(b, sp, rng, false);
  const double t = 0.8, dt = 1e-5;
  const Operator fd =
      cplx(1.0 / (2.0 * dt)) * (evaluate_at_time(h, t + dt) - evaluate_at_time(h, t - dt));
  CHECK((evaluate_at_time(hs_time_derivative(h), t) - fd).max_abs() < 1e-8 * h.max_abs());
}

TEST_CASE("rwa_project keeps the exact zero-frequency term") {
  ToneBasis b({2.0});
  HilbertSpace sp({2});
  const Operator x = sigma_x(sp, 0);
  HarmonicOperator odd(b, sp);
  odd.add_term({1}, x);
  odd.add_term({-1}, x);
  CHECK(rwa_project(odd).max_abs() == 0.0);

  // cos^2(w t) = 1/2 + (e^{2iwt} + e^{-2iwt}) / 4
  HarmonicOperator c2(b, sp);
  c2.add_term({0}, cplx(0.5) * x);
  c2.add_term({2}, cplx(0.25) * x);
  c2.add_term({-2}, cplx(0.25) * x);
  CHECK((rwa_project(c2) - cplx(0.5) * x).max_abs() == 0.0);
  CHECK((evaluate_at_time(c2, 0.3) - cplx(std::pow(std::cos(0.6), 2)) * x).max_abs() < 1e-15);
}

TEST_CASE("rwa_project equals the period average by quadrature") {
  const double w = 1.6;
  ToneBasis b({w});
  HilbertSpace sp({2, 2});
  std::mt19937 rng(21);
  const HarmonicOperator h = random_series(b, sp, rng, false);
  const double period = 2.0 * std::numbers::pi / w;
  const int n = 64;  // trapezoid rule is exact for trigonometric polynomials of degree < n
  Operator avg = Operator::zero(sp);
  for (int i = 0; i < n; ++i) avg += cplx(1.0 / n) * evaluate_at_time(h, period * i / n);
  CHECK((avg - rwa_project(h)).max_abs() < 1e-8);
}

TEST_CASE("prune drops negligible terms and keeps keys exact") {
  ToneBasis b({1.0, std::sqrt(2.0)});
  HilbertSpace sp({2});
  HarmonicOperator h(b, sp);
  h.add_term({1, 0}, sigma_x(sp, 0));
  h.add_term({0, 1}, cplx(1e-16) * sigma_x(sp, 0));
  h.add_term({1, -1}, Operator::zero(sp));
  h.prune(kPruneRelTol);
  CHECK(h.terms().size() == 1);
  CHECK(h.has_term({1, 0}));
}

TEST_CASE("hermiticity predicates") {
  ToneBasis b({1.0});
  HilbertSpace sp({2});
  HarmonicOperator h(b, sp);
  h.add_term({1}, sigma_plus(sp, 0));
  CHECK_FALSE(h.is_hermitian());
  h.add_term({-1}, sigma_minus(sp, 0));
  CHECK(h.is_hermitian());
  const HarmonicOperator ah = cplx(0.0, 1.0) * h;
  CHECK(ah.is_anti_hermitian());
}
