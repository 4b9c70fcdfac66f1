#pragma once

#include <map>
#include <vector>

#include "tdsw/operator_algebra.hpp"

namespace tdsw {

// Integer tone-combination vector k; the term carries exp(-i k.w t).
using ToneKey = std::vector<int>;

class ToneBasis {
 public:
  ToneBasis() = default;
  explicit ToneBasis(std::vector<double> tones);

  const std::vector<double>& tones() const { return tones_; }
  int size() const { return static_cast<int>(tones_.size()); }
  ToneKey zero_key() const { return ToneKey(tones_.size(), 0); }
  ToneKey unit_key(int tone, int sign = 1) const;
  double frequency(const ToneKey& k) const;

  bool operator==(const ToneBasis& o) const { return tones_ == o.tones_; }
  bool operator!=(const ToneBasis& o) const { return !(*this == o); }

 private:
  std::vector<double> tones_;
};

ToneKey operator+(const ToneKey& a, const ToneKey& b);
ToneKey operator-(const ToneKey& a);

// Finite Fourier sum  sum_k A_k exp(-i (k.w) t).
class HarmonicOperator {
 public:
  using TermMap = std::map<ToneKey, Operator>;

  HarmonicOperator() = default;
  HarmonicOperator(ToneBasis basis, HilbertSpace space);
  static HarmonicOperator constant(ToneBasis basis, const Operator& a);

  const ToneBasis& basis() const { return basis_; }
  const HilbertSpace& space() const { return space_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Accumulates into an existing key.
  void add_term(const ToneKey& k, const Operator& a);
  // Term at k, or the zero operator when absent.
  Operator term(const ToneKey& k) const;
  bool has_term(const ToneKey& k) const { return terms_.count(k) != 0; }

  double max_abs() const;
  // Drop terms whose max-abs entry is below rel * (largest term); exact zeros always go.
  void prune(double rel);
  // A_{-k} == A_k^dagger for all k.
  bool is_hermitian(double tol = 1e-12) const;
  bool is_anti_hermitian(double tol = 1e-12) const;

  HarmonicOperator& operator+=(const HarmonicOperator& o);
  HarmonicOperator& operator-=(const HarmonicOperator& o);
  HarmonicOperator& operator*=(cplx c);

 private:
  void require_key(const ToneKey& k) const;

  ToneBasis basis_;
  HilbertSpace space_;
  TermMap terms_;
};

inline constexpr double kPruneRelTol = 1e-14;

void require_compatible(const HarmonicOperator& a, const HarmonicOperator& b);

HarmonicOperator operator+(const HarmonicOperator& a, const HarmonicOperator& b);
HarmonicOperator operator-(const HarmonicOperator& a, const HarmonicOperator& b);
HarmonicOperator operator*(cplx c, const HarmonicOperator& a);

// Term (k1+k2) accumulates [A_k1, B_k2]; pruned with kPruneRelTol.
HarmonicOperator hs_commutator(const HarmonicOperator& a, const HarmonicOperator& b);
HarmonicOperator hs_dagger(const HarmonicOperator& a);
// d/dt: A_k -> -i (k.w) A_k
HarmonicOperator hs_time_derivative(const HarmonicOperator& a);
HarmonicOperator hs_pinch(const Operator& h0, const HarmonicOperator& a);
HarmonicOperator hs_off_diag(const Operator& h0, const HarmonicOperator& a);

Operator evaluate_at_time(const HarmonicOperator& a, double t);
// Exact k=0 term.
Operator rwa_project(const HarmonicOperator& a);

}  // namespace tdsw
