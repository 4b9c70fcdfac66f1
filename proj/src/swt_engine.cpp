#include "tdsw/swt_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tdsw/errors.hpp"

namespace tdsw {

void SystemModel::validate() const {
  if (h0.space() != v.space()) throw DimensionMismatch("H0 and V act on different spaces");
  if (!h0.is_diagonal()) throw InvalidParameter("H0 must be diagonal in the product basis");
  if (!h0.is_hermitian()) throw InvalidParameter("H0 must be Hermitian");
  if (!v.is_hermitian(1e-12)) throw InvalidParameter("V(t) must be Hermitian as a time function");
  if (resonator < 0 || resonator >= h0.space().num_subsystems())
    throw InvalidParameter("resonator subsystem index out of range");
}

double default_resonance_threshold(const Operator& h0) {
  const RVec e = h0.real_diagonal();
  if (e.size() == 0) return 0.0;
  return 1e-6 * (e.maxCoeff() - e.minCoeff());
}

namespace {

std::string key_string(const ToneKey& k) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ")";
  return os.str();
}

using Graded = std::map<int, HarmonicOperator>;

void accumulate(Graded& g, int order, const HarmonicOperator& x, double c, const ToneBasis& basis,
                const HilbertSpace& space) {
  if (x.empty()) return;
  auto it = g.find(order);
  if (it == g.end()) it = g.emplace(order, HarmonicOperator(basis, space)).first;
  it->second += cplx(c) * x;
}

int lowest_order(const Graded& g) {
  for (const auto& [m, x] : g)
    if (!x.empty()) return m;
  return std::numeric_limits<int>::max() / 4;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

HarmonicOperator solve_generator(const Operator& h0, const HarmonicOperator& v_od,
                                 const SolveOptions& opts, ConvergenceDiag* diag, int order) {
  require_same_space(h0, Operator::zero(v_od.space()));
  const RVec e = h0.real_diagonal();
  if (!h0.is_diagonal()) throw InvalidParameter("H0 must be diagonal in the product basis");
  const auto mask = pinch_mask(h0);
  const double threshold =
      opts.resonance_threshold > 0.0 ? opts.resonance_threshold : default_resonance_threshold(h0);
  if (diag) diag->resonance_threshold = threshold;

  HarmonicOperator s(v_od.basis(), v_od.space());
  const double cut = kPruneRelTol * v_od.max_abs();
  const int n = h0.dim();
  for (const auto& [k, a] : v_od.terms()) {
    const double w = v_od.basis().frequency(k);
    Mat m = Mat::Zero(n, n);
    const Mat& v = a.matrix();
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        if (std::abs(v(j, l)) <= cut) continue;
        if (mask(j, l))
          throw InvalidParameter("solve_generator: V_od has an entry inside a degenerate block of H0");
        const double den = (e(l) - e(j)) + w;
        if (diag) diag->min_denominator = std::min(diag->min_denominator, std::abs(den));
        if (std::abs(den) < threshold) {
          if (opts.policy == ResonancePolicy::Throw)
            throw ParametricResonance("parametric resonance between basis states " + std::to_string(j) +
                                          " and " + std::to_string(l) + " at tone key " + key_string(k) +
                                          ", denominator " + std::to_string(den),
                                      j, l, k, den);
          if (diag) diag->resonance_flags.push_back({j, l, k, den, order});
          continue;
        }
        m(j, l) = -v(j, l) / den;
        if (diag) diag->max_generator_element = std::max(diag->max_generator_element, std::abs(m(j, l)));
      }
    }
    s.add_term(k, Operator(v_od.space(), std::move(m)));
  }
  s.prune(0.0);
  if (diag) diag->radius_estimate = diag->max_generator_element;
  return s;
}

SwtResult swt_cascade(const SystemModel& model, const SwtOptions& opts) {
  model.validate();
  if (opts.max_order < 1 || opts.max_order > 4) throw InvalidParameter("max_order must be 1..4");
  if (opts.eliminate_through < 0 || opts.eliminate_through > 6)
    throw InvalidParameter("eliminate_through must be 0..6");

  const Operator& h0 = model.h0;
  const ToneBasis& basis = model.basis();
  const HilbertSpace& space = model.space();

  if (hs_pinch(h0, model.v).max_abs() > 0.0)
    throw InvalidParameter("interaction has a diagonal first-order part; the cascade assumes V_D^(1) = 0");

  SwtResult r;
  r.h0 = h0;
  r.basis = basis;
  r.max_order = opts.max_order;
  r.diagnostics.degenerate_pairs = degenerate_pairs(h0);
  r.diagnostics.resonance_threshold = opts.solve.resonance_threshold > 0.0
                                          ? opts.solve.resonance_threshold
                                          : default_resonance_threshold(h0);
  if (!r.diagnostics.degenerate_pairs.empty())
    r.diagnostics.warnings.push_back("H0 has " + std::to_string(r.diagnostics.degenerate_pairs.size()) +
                                     " degenerate pair(s); pinch keeps equal-energy blocks");

  const int keep = std::max(opts.max_order, opts.eliminate_through);
  Graded current;
  current.emplace(1, model.v);

  for (int M = 1; M <= keep; ++M) {
    const bool needed = M + lowest_order(current) <= opts.max_order || M <= opts.eliminate_through;
    if (!needed) break;

    HarmonicOperator vod(basis, space);
    if (auto it = current.find(M); it != current.end()) vod = hs_off_diag(h0, it->second);
    HarmonicOperator s = solve_generator(h0, vod, opts.solve, &r.diagnostics, M);

    // W = V^(M) - V_od,M
    Graded w = current;
    if (auto it = w.find(M); it != w.end()) it->second = hs_pinch(h0, it->second);

    // H^(M+1) - H0 = W + sum_n 1/n! ad^n W + sum_n n/(n+1)! ad^n V_od
    Graded next = w;
    if (!s.empty()) {
      for (const auto& [m, x] : w) {
        HarmonicOperator y = x;
        for (int n = 1; m + n * M <= keep; ++n) {
          y = hs_commutator(s, y);
          if (y.empty()) break;
          accumulate(next, m + n * M, y, 1.0 / factorial(n), basis, space);
        }
      }
      HarmonicOperator y = vod;
      for (int n = 1; M + n * M <= keep; ++n) {
        y = hs_commutator(s, y);
        if (y.empty()) break;
        accumulate(next, M + n * M, y, n / factorial(n + 1), basis, space);
      }
    }
    for (auto& [m, x] : next) x.prune(0.0);
    current = std::move(next);
    r.generators.push_back(std::move(s));
  }

  for (int m = 1; m <= keep; ++m) {
    auto it = current.find(m);
    HarmonicOperator x = it == current.end() ? HarmonicOperator(basis, space) : it->second;
    if (m <= opts.max_order) r.v_diag.emplace(m, hs_pinch(h0, x));
    r.v_offdiag.emplace(m, hs_off_diag(h0, x));
  }

  if (opts.linewidth) {
    const double lw = *opts.linewidth;
    for (const auto& [m, x] : r.v_diag)
      for (const auto& [k, a] : x.terms()) {
        const double w = basis.frequency(k);
        if (w != 0.0 && std::abs(w) < 10.0 * lw) r.diagnostics.slow_diagonal_flags.push_back({m, k, w});
      }
  }
  return r;
}

namespace {
void check_order(const SwtResult& r, int order) {
  if (order < 0 || order > r.max_order)
    throw std::out_of_range("effective Hamiltonian order " + std::to_string(order) +
                            " outside computed range 0.." + std::to_string(r.max_order));
}
}  // namespace

Operator effective_hamiltonian_rwa(const SwtResult& r, int order) {
  check_order(r, order);
  Operator h = r.h0;
  for (int m = 1; m <= order; ++m)
    if (auto it = r.v_diag.find(m); it != r.v_diag.end()) h += rwa_project(it->second);
  return h;
}

HarmonicOperator effective_hamiltonian_full(const SwtResult& r, int order) {
  check_order(r, order);
  HarmonicOperator h = HarmonicOperator::constant(r.basis, r.h0);
  for (int m = 1; m <= order; ++m)
    if (auto it = r.v_diag.find(m); it != r.v_diag.end()) h += it->second;
  return h;
}

TransitionSpec qubit_transition(int resonator_n) {
  TransitionSpec t;
  t.plus_level = 0;
  t.minus_level = 1;
  t.resonator_n = resonator_n;
  return t;
}

TransitionSpec kerr_transition(int n_b, int resonator_n) {
  if (n_b < 1) throw InvalidParameter("Kerr transition level must be >= 1");
  TransitionSpec t;
  t.plus_level = n_b;
  t.minus_level = n_b - 1;
  t.resonator_n = resonator_n;
  return t;
}

int level_index(const HilbertSpace& space, const TransitionSpec& t, int level, int resonator_n) {
  std::vector<int> d(space.num_subsystems(), 0);
  d.at(t.nonlinear_subsystem) = level;
  d.at(t.resonator_subsystem) = resonator_n;
  return space.index(d);
}

double transition_shift(const HilbertSpace& space, const RVec& energies, const TransitionSpec& t) {
  if (energies.size() != space.total_dim()) throw DimensionMismatch("energy vector length mismatch");
  auto f = [&](int level) {
    return energies(level_index(space, t, level, t.resonator_n + 1)) -
           energies(level_index(space, t, level, t.resonator_n));
  };
  return f(t.plus_level) - f(t.minus_level);
}

}  // namespace tdsw
