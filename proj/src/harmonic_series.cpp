#include "tdsw/harmonic_series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdsw/errors.hpp"

namespace tdsw {

ToneBasis::ToneBasis(std::vector<double> tones) : tones_(std::move(tones)) {
  for (std::size_t i = 0; i < tones_.size(); ++i) {
    if (!(tones_[i] > 0.0) || !std::isfinite(tones_[i]))
      throw InvalidParameter("base tones must be strictly positive and finite");
    for (std::size_t j = 0; j < i; ++j) {
      const double sep = std::abs(tones_[i] - tones_[j]) / std::max(tones_[i], tones_[j]);
      if (sep <= 1e-9) throw InvalidParameter("base tones must be pairwise distinct");
    }
  }
}

ToneKey ToneBasis::unit_key(int tone, int sign) const {
  if (tone < 0 || tone >= size()) throw std::out_of_range("tone index out of range");
  ToneKey k = zero_key();
  k[tone] = sign;
  return k;
}

double ToneBasis::frequency(const ToneKey& k) const {
  if (static_cast<int>(k.size()) != size()) throw DimensionMismatch("tone key length mismatch");
  double w = 0.0;
  for (int i = 0; i < size(); ++i) w += k[i] * tones_[i];
  return w;
}

ToneKey operator+(const ToneKey& a, const ToneKey& b) {
  if (a.size() != b.size()) throw DimensionMismatch("tone key length mismatch");
  ToneKey out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

ToneKey operator-(const ToneKey& a) {
  ToneKey out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

HarmonicOperator::HarmonicOperator(ToneBasis basis, HilbertSpace space)
    : basis_(std::move(basis)), space_(std::move(space)) {}

HarmonicOperator HarmonicOperator::constant(ToneBasis basis, const Operator& a) {
  HarmonicOperator h(std::move(basis), a.space());
  h.add_term(h.basis().zero_key(), a);
  return h;
}

void HarmonicOperator::require_key(const ToneKey& k) const {
  if (static_cast<int>(k.size()) != basis_.size()) throw DimensionMismatch("tone key length mismatch");
}

void HarmonicOperator::add_term(const ToneKey& k, const Operator& a) {
  require_key(k);
  if (a.space() != space_) throw DimensionMismatch("term acts on a different Hilbert space");
  auto it = terms_.find(k);
  if (it == terms_.end())
    terms_.emplace(k, a);
  else
    it->second += a;
}

Operator HarmonicOperator::term(const ToneKey& k) const {
  require_key(k);
  auto it = terms_.find(k);
  return it == terms_.end() ? Operator::zero(space_) : it->second;
}

double HarmonicOperator::max_abs() const {
  double m = 0.0;
  for (const auto& [k, a] : terms_) m = std::max(m, a.max_abs());
  return m;
}

void HarmonicOperator::prune(double rel) {
  const double cut = rel * max_abs();
  for (auto it = terms_.begin(); it != terms_.end();) {
    const double m = it->second.max_abs();
    if (m == 0.0 || m < cut)
      it = terms_.erase(it);
    else
      ++it;
  }
}

bool HarmonicOperator::is_hermitian(double tol) const {
  const double scale = std::max(1.0, max_abs());
  for (const auto& [k, a] : terms_) {
    const Operator partner = term(-k);
    if ((a.matrix() - partner.matrix().adjoint()).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

bool HarmonicOperator::is_anti_hermitian(double tol) const {
  const double scale = std::max(1.0, max_abs());
  for (const auto& [k, a] : terms_) {
    const Operator partner = term(-k);
    if ((a.matrix() + partner.matrix().adjoint()).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

HarmonicOperator& HarmonicOperator::operator+=(const HarmonicOperator& o) {
  require_compatible(*this, o);
  for (const auto& [k, a] : o.terms_) add_term(k, a);
  return *this;
}

HarmonicOperator& HarmonicOperator::operator-=(const HarmonicOperator& o) {
  require_compatible(*this, o);
  for (const auto& [k, a] : o.terms_) add_term(k, -a);
  return *this;
}

HarmonicOperator& HarmonicOperator::operator*=(cplx c) {
  for (auto& [k, a] : terms_) a *= c;
  return *this;
}

void require_compatible(const HarmonicOperator& a, const HarmonicOperator& b) {
  if (a.basis() != b.basis()) throw DimensionMismatch("harmonic operators use different tone bases");
  if (a.space() != b.space()) throw DimensionMismatch("harmonic operators act on different spaces");
}

HarmonicOperator operator+(const HarmonicOperator& a, const HarmonicOperator& b) {
  HarmonicOperator out = a;
  out += b;
  return out;
}

HarmonicOperator operator-(const HarmonicOperator& a, const HarmonicOperator& b) {
  HarmonicOperator out = a;
  out -= b;
  return out;
}

HarmonicOperator operator*(cplx c, const HarmonicOperator& a) {
  HarmonicOperator out = a;
  out *= c;
  return out;
}

HarmonicOperator hs_commutator(const HarmonicOperator& a, const HarmonicOperator& b) {
  require_compatible(a, b);
  HarmonicOperator out(a.basis(), a.space());
  for (const auto& [ka, ma] : a.terms())
    for (const auto& [kb, mb] : b.terms()) out.add_term(ka + kb, commutator(ma, mb));
  out.prune(kPruneRelTol);
  return out;
}

HarmonicOperator hs_dagger(const HarmonicOperator& a) {
  HarmonicOperator out(a.basis(), a.space());
  for (const auto& [k, m] : a.terms()) out.add_term(-k, dagger(m));
  return out;
}

HarmonicOperator hs_time_derivative(const HarmonicOperator& a) {
  HarmonicOperator out(a.basis(), a.space());
  for (const auto& [k, m] : a.terms()) {
    const double w = a.basis().frequency(k);
    if (w != 0.0) out.add_term(k, cplx(0.0, -w) * m);
  }
  return out;
}

HarmonicOperator hs_pinch(const Operator& h0, const HarmonicOperator& a) {
  HarmonicOperator out(a.basis(), a.space());
  for (const auto& [k, m] : a.terms()) {
    Operator p = pinch(h0, m);
    if (p.max_abs() > 0.0) out.add_term(k, p);
  }
  return out;
}

HarmonicOperator hs_off_diag(const Operator& h0, const HarmonicOperator& a) {
  HarmonicOperator out(a.basis(), a.space());
  for (const auto& [k, m] : a.terms()) {
    Operator q = off_diag(h0, m);
    if (q.max_abs() > 0.0) out.add_term(k, q);
  }
  return out;
}

Operator evaluate_at_time(const HarmonicOperator& a, double t) {
  Mat m = Mat::Zero(a.space().total_dim(), a.space().total_dim());
  for (const auto& [k, op] : a.terms()) m += std::polar(1.0, -a.basis().frequency(k) * t) * op.matrix();
  return {a.space(), std::move(m)};
}

Operator rwa_project(const HarmonicOperator& a) { return a.term(a.basis().zero_key()); }

}  // namespace tdsw
