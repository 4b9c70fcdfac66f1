#include "tdsw/exact_sim.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "tdsw/errors.hpp"

namespace tdsw {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);
// Commutator-free fourth-order Magnus nodes and weights.
const double kC1 = 0.5 - kSqrt3 / 6.0;
const double kC2 = 0.5 + kSqrt3 / 6.0;
const double kA1 = 0.25 + kSqrt3 / 6.0;
const double kA2 = 0.25 - kSqrt3 / 6.0;

double wrap(double x, double w) {
  // into (-w/2, w/2]
  double y = x - w * std::round(x / w);
  if (y <= -0.5 * w) y += w;
  if (y > 0.5 * w) y -= w;
  return y;
}

Mat expm_hermitian(const Mat& h, double tau) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const RVec& ev = es.eigenvalues();
  Vec ph(ev.size());
  for (int i = 0; i < ev.size(); ++i) ph(i) = std::polar(1.0, -tau * ev(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

double single_tone(const SystemModel& model) {
  if (model.basis().size() != 1)
    throw InvalidParameter("Floquet propagation needs a single-tone model");
  return model.basis().tones()[0];
}

}  // namespace

// ---------------------------------------------------------------- Floquet

LabeledLevel FloquetResult::label(int bare_index, const LabelOptions& opts) const {
  if (bare_index < 0 || bare_index >= overlaps.rows()) throw std::out_of_range("bare index out of range");
  LabeledLevel out;
  out.bare_index = bare_index;
  Eigen::Index best = 0;
  out.max_overlap = overlaps.row(bare_index).maxCoeff(&best);
  out.floquet_index = static_cast<int>(best);
  const double e0 = quasi_energies(best);
  double wsum = 0.0, acc = 0.0;
  for (int j = 0; j < overlaps.cols(); ++j) {
    const double w = overlaps(bare_index, j);
    if (w < opts.min_overlap) continue;
    const double d = wrap(quasi_energies(j) - e0, omega);
    if (std::abs(d) > opts.cluster_window) continue;
    wsum += w;
    acc += w * d;
    ++out.cluster_size;
  }
  out.cluster_weight = wsum;
  if (wsum < opts.min_weight)
    throw LabelingError("bare state " + std::to_string(bare_index) + " has no Floquet cluster of weight >= " +
                        std::to_string(opts.min_weight) + " (max overlap " + std::to_string(out.max_overlap) +
                        ", cluster weight " + std::to_string(wsum) + ")");
  out.quasi_energy = e0 + acc / wsum;
  return out;
}

int recommended_floquet_steps(const SystemModel& model, double theta, int min_steps) {
  const double w = single_tone(model);
  const double period = 2.0 * kPi / w;
  const double need = std::ceil(period * spectral_hamiltonian(model).max_frequency() / theta);
  return std::max(min_steps, static_cast<int>(std::min(need, 1e8)));
}

FloquetResult propagate_period(const SystemModel& model, const FloquetOptions& opts) {
  model.validate();
  const double w = single_tone(model);
  if (opts.steps < 1000) throw InvalidParameter("propagate_period needs steps >= 1000");
  const SpectralHamiltonian h = spectral_hamiltonian(model);
  const int n = model.space().total_dim();
  const double period = 2.0 * kPi / w;
  const double dt = period / opts.steps;

  Mat u = Mat::Identity(n, n);
  for (int s = 0; s < opts.steps; ++s) {
    const double t = s * dt;
    const Mat h1 = h.at(t + kC1 * dt);
    const Mat h2 = h.at(t + kC2 * dt);
    const Mat ha = kA1 * h1 + kA2 * h2;
    const Mat hb = kA2 * h1 + kA1 * h2;
    u = expm_hermitian(hb, dt) * (expm_hermitian(ha, dt) * u);
  }

  FloquetResult fr;
  fr.period = period;
  fr.omega = w;
  fr.steps = opts.steps;
  fr.space = model.space();
  fr.monodromy = u;
  fr.unitarity_error = (u.adjoint() * u - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (fr.unitarity_error > opts.unitarity_tol)
    throw ConvergenceError("monodromy unitarity error " + std::to_string(fr.unitarity_error));

  // Schur vectors of a normal matrix are orthonormal eigenvectors.
  Eigen::ComplexSchur<Mat> schur(u);
  fr.modes = schur.matrixU();
  fr.quasi_energies.resize(n);
  for (int j = 0; j < n; ++j) fr.quasi_energies(j) = wrap(-std::arg(schur.matrixT()(j, j)) / period, w);
  fr.overlaps = fr.modes.cwiseAbs2();
  fr.state_labels.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    fr.overlaps.row(i).maxCoeff(&j);
    fr.state_labels[i] = static_cast<int>(j);
  }
  return fr;
}

DressedShift dressed_shift(const FloquetResult& fr, const TransitionSpec& t, const LabelOptions& opts,
                           double branch_tol) {
  auto e = [&](int level, int n) { return fr.label(level_index(fr.space, t, level, n), opts).quasi_energy; };
  const int n = t.resonator_n;
  const double x = (e(t.plus_level, n + 1) - e(t.plus_level, n)) - (e(t.minus_level, n + 1) - e(t.minus_level, n));
  DressedShift out;
  out.value = wrap(x, fr.omega);
  if (std::abs(std::abs(out.value) - 0.5 * fr.omega) < 2.0 * branch_tol * fr.omega) {
    out.flagged = true;
    out.reason = "branch_ambiguous";
  }
  return out;
}

// ---------------------------------------------------------------- Lindblad

Mat SpectralHamiltonian::at(double t) const {
  Mat m = Mat::Zero(dim(), dim());
  for (const auto& [nu, a] : terms) {
    if (nu == 0.0)
      m += a;
    else
      m += std::polar(1.0, -nu * t) * a;
  }
  return m;
}

double SpectralHamiltonian::max_frequency() const {
  double spread = 0.0, nu_max = 0.0, coupling = 0.0;
  for (const auto& [nu, a] : terms) {
    if (nu == 0.0) {
      const RVec d = a.diagonal().real();
      spread += d.maxCoeff() - d.minCoeff();
      Mat off = a;
      off.diagonal().setZero();
      coupling += 2.0 * off.norm();
    } else {
      nu_max = std::max(nu_max, std::abs(nu));
      coupling += 2.0 * a.norm();
    }
  }
  return spread + coupling + nu_max;
}

SpectralHamiltonian spectral_hamiltonian(const SystemModel& model) {
  SpectralHamiltonian h;
  Mat stat = model.h0.matrix();
  for (const auto& [k, a] : model.v.terms()) {
    const double nu = model.basis().frequency(k);
    if (nu == 0.0)
      stat += a.matrix();
    else
      h.terms.emplace_back(nu, a.matrix());
  }
  h.terms.insert(h.terms.begin(), {0.0, stat});
  return h;
}

namespace {

// d rho/dt = K rho + rho K^dagger + sum_c r c rho c^dagger, K = -iH - 1/2 sum r c^dagger c.
class LindbladRhs {
 public:
  LindbladRhs(SpectralHamiltonian h, const std::vector<Collapse>& collapse) : h_(std::move(h)) {
    const int n = h_.dim();
    damp_ = Mat::Zero(n, n);
    for (const auto& c : collapse) {
      if (!(c.rate >= 0.0)) throw InvalidParameter("collapse rates must be >= 0");
      if (c.op.dim() != n) throw DimensionMismatch("collapse operator dimension mismatch");
      if (c.rate == 0.0) continue;
      jumps_.push_back(std::sqrt(c.rate) * c.op.matrix());
      damp_ += 0.5 * c.rate * c.op.matrix().adjoint() * c.op.matrix();
    }
    for (const auto& j : jumps_) jumps_dag_.push_back(j.adjoint());
    // K(t) = K0 + sum_j exp(-i nu_j t) K_j with K_j = -i M_j.
    k0_ = -damp_;
    for (const auto& [nu, m] : h_.terms) {
      if (nu == 0.0) {
        k0_ += cplx(0.0, -1.0) * m;
      } else {
        nus_.push_back(nu);
        kj_.push_back(cplx(0.0, -1.0) * m);
      }
    }
    k_.resize(n, n);
    kdag_.resize(n, n);
    tmp_.resize(n, n);
  }

  int dim() const { return h_.dim(); }
  const SpectralHamiltonian& hamiltonian() const { return h_; }

  void set_time(double t) {
    k_ = k0_;
    for (std::size_t j = 0; j < kj_.size(); ++j) k_ += std::polar(1.0, -nus_[j] * t) * kj_[j];
    kdag_ = k_.adjoint();
  }

  void apply(const Mat& rho, Mat& out) {
    // Coefficient-based products: the operands are small and the blocked kernel overhead dominates.
    out.noalias() = k_.lazyProduct(rho);
    out.noalias() += rho.lazyProduct(kdag_);
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      tmp_.noalias() = jumps_[i].lazyProduct(rho);
      out.noalias() += tmp_.lazyProduct(jumps_dag_[i]);
    }
  }

 private:
  SpectralHamiltonian h_;
  std::vector<Mat> jumps_, jumps_dag_, kj_;
  std::vector<double> nus_;
  Mat damp_, k0_, k_, kdag_, tmp_;
};

class Rk4 {
 public:
  explicit Rk4(LindbladRhs& rhs) : rhs_(rhs) {
    const int n = rhs.dim();
    for (Mat* m : {&k1_, &k2_, &k3_, &k4_, &y_}) m->resize(n, n);
  }

  void step(Mat& rho, double t, double h) {
    rhs_.set_time(t);
    rhs_.apply(rho, k1_);
    rhs_.set_time(t + 0.5 * h);
    y_ = rho + (0.5 * h) * k1_;
    rhs_.apply(y_, k2_);
    y_ = rho + (0.5 * h) * k2_;
    rhs_.apply(y_, k3_);
    rhs_.set_time(t + h);
    y_ = rho + h * k3_;
    rhs_.apply(y_, k4_);
    rho += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  LindbladRhs& rhs_;
  Mat k1_, k2_, k3_, k4_, y_;
};

Trajectory run_grid(LindbladRhs& rhs, const Mat& rho0, const std::vector<double>& t_grid, double h_max) {
  Trajectory tr;
  tr.times = t_grid;
  tr.step = h_max;
  Rk4 rk(rhs);
  Mat rho = rho0;
  const cplx tr0 = rho0.trace();
  tr.states.push_back(rho);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double span = t_grid[i] - t_grid[i - 1];
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / h_max - 1e-12)));
    const double h = span / nsub;
    for (int s = 0; s < nsub; ++s) rk.step(rho, t_grid[i - 1] + s * h, h);
    tr.max_trace_drift = std::max(tr.max_trace_drift, std::abs(rho.trace() - tr0));
    tr.max_hermiticity_error = std::max(tr.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    tr.states.push_back(rho);
  }
  return tr;
}

}  // namespace

Trajectory lindblad_evolve(const SpectralHamiltonian& h, const std::vector<Collapse>& collapse, const Mat& rho0,
                           const std::vector<double>& t_grid, const LindbladOptions& opts) {
  if (t_grid.empty()) throw InvalidParameter("time grid is empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidParameter("time grid must be strictly increasing");
  if (rho0.rows() != h.dim() || rho0.cols() != h.dim()) throw DimensionMismatch("rho0 dimension mismatch");
  LindbladRhs rhs(h, collapse);
  const double h_max = opts.dt > 0.0 ? opts.dt : opts.theta / std::max(h.max_frequency(), 1e-12);
  Trajectory tr = run_grid(rhs, rho0, t_grid, h_max);
  if (tr.max_trace_drift > opts.trace_tol)
    throw ConvergenceError("Lindblad trace drift " + std::to_string(tr.max_trace_drift) + "; step too large");
  if (opts.halving_check) {
    Trajectory fine = run_grid(rhs, rho0, t_grid, 0.5 * h_max);
    for (std::size_t i = 0; i < tr.states.size(); ++i)
      tr.halving_error = std::max(tr.halving_error, (tr.states[i] - fine.states[i]).cwiseAbs().maxCoeff());
    if (tr.halving_error > opts.halving_tol)
      throw ConvergenceError("Lindblad step-halving change " + std::to_string(tr.halving_error) +
                             " exceeds tolerance");
  }
  return tr;
}

Trajectory lindblad_evolve(const SystemModel& model, const std::vector<Collapse>& collapse, const Mat& rho0,
                           const std::vector<double>& t_grid, const LindbladOptions& opts) {
  model.validate();
  return lindblad_evolve(spectral_hamiltonian(model), collapse, rho0, t_grid, opts);
}

Mat vec(const Mat& rho) { return Eigen::Map<const Mat>(rho.data(), rho.size(), 1); }

Mat unvec(const Mat& v, int dim) { return Eigen::Map<const Mat>(v.data(), dim, dim); }

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// vec(-i[M, rho]) = -i (I (x) M - M^T (x) I) vec(rho)
Mat commutator_super(const Mat& m) {
  const Mat id = Mat::Identity(m.rows(), m.cols());
  return cplx(0.0, -1.0) * (kron(id, m) - kron(m.transpose(), id));
}

}  // namespace

Mat lindblad_period_map(const SystemModel& model, const std::vector<Collapse>& collapse, int steps) {
  model.validate();
  const double w = single_tone(model);
  if (steps < 1) throw InvalidParameter("steps must be >= 1");
  const SpectralHamiltonian h = spectral_hamiltonian(model);
  const int n = h.dim();
  const Mat id = Mat::Identity(n, n);

  std::vector<std::pair<double, Mat>> supers;
  for (const auto& [nu, m] : h.terms) supers.emplace_back(nu, commutator_super(m));
  for (const auto& c : collapse) {
    if (!(c.rate >= 0.0)) throw InvalidParameter("collapse rates must be >= 0");
    const Mat& a = c.op.matrix();
    const Mat ad = a.adjoint() * a;
    supers.front().second += c.rate * (kron(a.conjugate(), a) - 0.5 * kron(id, ad) - 0.5 * kron(ad.transpose(), id));
  }
  auto at = [&](double t) {
    Mat l = supers.front().second;
    for (std::size_t i = 1; i < supers.size(); ++i) l += std::polar(1.0, -supers[i].first * t) * supers[i].second;
    return l;
  };

  const double period = 2.0 * kPi / w;
  const double dt = period / steps;
  Mat phi = Mat::Identity(n * n, n * n);
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    const Mat l1 = at(t + kC1 * dt);
    const Mat l2 = at(t + kC2 * dt);
    const Mat ea = (dt * (kA1 * l1 + kA2 * l2)).exp();
    const Mat eb = (dt * (kA2 * l1 + kA1 * l2)).exp();
    phi = eb * (ea * phi);
  }
  return phi;
}

// ------------------------------------------------------------ Spectrum probe

namespace {

double resonator_frequency(const SystemModel& model) {
  const HilbertSpace& sp = model.space();
  std::vector<int> d0(sp.num_subsystems(), 0), d1(sp.num_subsystems(), 0);
  d1[model.resonator] = 1;
  const RVec e = model.h0.real_diagonal();
  return e(sp.index(d1)) - e(sp.index(d0));
}

}  // namespace

double probe_response(const SystemModel& model, double kappa, int prepared_level, double delta,
                      const SpectrumOptions& opts) {
  model.validate();
  if (!(kappa > 0.0)) throw InvalidParameter("kappa must be positive");
  const HilbertSpace& sp = model.space();
  const int nonlinear = model.resonator == 0 ? 1 : 0;
  if (prepared_level < 0 || prepared_level >= sp.dims()[nonlinear])
    throw InvalidParameter("prepared level outside the truncation");

  const Operator a = build_ladder(sp, model.resonator);
  const double eps = opts.probe_fraction * kappa;
  const double w_pr = resonator_frequency(model) + delta;

  SpectralHamiltonian h = spectral_hamiltonian(model);
  h.terms.emplace_back(-w_pr, eps * a.matrix());
  h.terms.emplace_back(w_pr, eps * a.matrix().adjoint());
  LindbladRhs rhs(h, {{a, kappa}});
  Rk4 rk(rhs);

  std::vector<int> d(sp.num_subsystems(), 0);
  d[nonlinear] = prepared_level;
  const int i0 = sp.index(d);
  Mat rho = Mat::Zero(sp.total_dim(), sp.total_dim());
  rho(i0, i0) = 1.0;

  const double step = opts.theta / h.max_frequency();
  double slowest_tone = std::numeric_limits<double>::infinity();
  for (double w : model.basis().tones()) slowest_tone = std::min(slowest_tone, w);
  double window = opts.window;
  if (std::isfinite(slowest_tone)) window = std::max(window, 20.0 * 2.0 * kPi / slowest_tone);
  const int win_steps = std::max(1, static_cast<int>(std::ceil(window / step)));
  const double h_step = window / win_steps;
  const double settle = opts.settle_efolds * 2.0 / kappa;
  const int settle_windows = static_cast<int>(std::ceil(settle / window));

  const Mat& am = a.matrix();
  auto demod = [&](double t) { return (am.cwiseProduct(rho.transpose())).sum() * std::polar(1.0, w_pr * t); };

  double t = 0.0;
  for (int wdx = 0; wdx < settle_windows; ++wdx)
    for (int s = 0; s < win_steps; ++s, t += h_step) rk.step(rho, t, h_step);

  cplx prev = 0.0;
  for (int wdx = 0; wdx < opts.max_windows; ++wdx) {
    // Trapezoid average of <a> exp(i w_pr t) over one window.
    cplx acc = 0.5 * demod(t);
    for (int s = 0; s < win_steps; ++s) {
      rk.step(rho, t, h_step);
      t += h_step;
      acc += (s + 1 == win_steps ? 0.5 : 1.0) * demod(t);
    }
    const cplx avg = acc / static_cast<double>(win_steps);
    if (std::abs(rho.trace() - 1.0) > 1e-6)
      throw ConvergenceError("spectrum probe lost trace; integration step too large");
    if (wdx > 0 && std::abs(avg - prev) <= opts.convergence_tol * std::abs(avg)) return std::norm(avg);
    prev = avg;
  }
  throw ConvergenceError("spectrum probe amplitude did not settle within " + std::to_string(opts.max_windows) +
                         " windows");
}

SpectrumTrace spectrum_probe(const SystemModel& model, double kappa, int prepared_level,
                             const std::vector<double>& delta_grid, const SpectrumOptions& opts) {
  for (std::size_t i = 1; i < delta_grid.size(); ++i)
    if (!(delta_grid[i] > delta_grid[i - 1])) throw InvalidParameter("detuning grid must be strictly increasing");
  SpectrumTrace tr;
  tr.prepared_level = prepared_level;
  tr.conditioning = "level " + std::to_string(prepared_level);
  tr.delta = delta_grid;
  for (double d : delta_grid) tr.response.push_back(probe_response(model, kappa, prepared_level, d, opts));
  return tr;
}

double peak_position(const SpectrumTrace& trace, double floor) {
  const int n = static_cast<int>(trace.delta.size());
  if (n < 3) throw InvalidParameter("peak estimate needs at least three detunings");
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (trace.response[i] > trace.response[imax]) imax = i;
  std::vector<int> use;
  for (int i = 0; i < n; ++i)
    if (trace.response[i] >= floor * trace.response[imax] && trace.response[i] > 0.0) use.push_back(i);
  if (use.size() < 3) {
    use.clear();
    const int c = std::clamp(imax, 1, n - 2);
    use = {c - 1, c, c + 1};
  }
  Eigen::MatrixXd a(use.size(), 3);
  Eigen::VectorXd b(use.size());
  for (std::size_t r = 0; r < use.size(); ++r) {
    const double x = trace.delta[use[r]];
    a(r, 0) = x * x;
    a(r, 1) = x;
    a(r, 2) = 1.0;
    b(r) = 1.0 / trace.response[use[r]];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  if (!(c(0) > 0.0)) return trace.delta[imax];
  return -c(1) / (2.0 * c(0));
}

// ------------------------------------------------------------ Rate fitting

namespace {

struct LinearFit {
  double a = 0.0, c = 0.0, ssr = 0.0;
};

LinearFit fit_fixed_gamma(const std::vector<double>& t, const std::vector<double>& y, double gamma) {
  const std::size_t n = t.size();
  double s11 = 0, s12 = 0, s22 = static_cast<double>(n), b1 = 0, b2 = 0;
  const double t0 = t.front();
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = std::exp(-gamma * (t[i] - t0));
    s11 += e[i] * e[i];
    s12 += e[i];
    b1 += e[i] * y[i];
    b2 += y[i];
  }
  const double det = s11 * s22 - s12 * s12;
  LinearFit f;
  if (std::abs(det) < 1e-300) {
    f.c = b2 / s22;
  } else {
    f.a = (b1 * s22 - s12 * b2) / det;
    f.c = (s11 * b2 - s12 * b1) / det;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.a * e[i] - f.c;
    f.ssr += r * r;
  }
  // Amplitude referred to t = 0.
  f.a *= std::exp(gamma * t0);
  return f;
}

}  // namespace

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw DimensionMismatch("time and value arrays differ in length");
  if (t.size() < 4) throw InvalidParameter("rate fit needs at least four samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw InvalidParameter("sample times must be strictly increasing");
  const double span = t.back() - t.front();

  auto cost = [&](double u) { return fit_fixed_gamma(t, y, std::exp(u)).ssr; };
  const double ulo = std::log(1e-3 / span), uhi = std::log(1e3 / span);
  const int grid = 400;
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double c = cost(ulo + (uhi - ulo) * i / grid);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  const double a = ulo + (uhi - ulo) * std::max(0, best - 1) / grid;
  const double b = ulo + (uhi - ulo) * std::min(grid, best + 1) / grid;
  const auto res = boost::math::tools::brent_find_minima(cost, a, b, 50);

  RateFit out;
  out.gamma = std::exp(res.first);
  const LinearFit f = fit_fixed_gamma(t, y, out.gamma);
  out.amplitude = f.a;
  out.offset = f.c;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sst = 0.0;
  for (double v : y) sst += (v - mean) * (v - mean);
  out.r_squared = sst > 0.0 ? 1.0 - f.ssr / sst : 0.0;
  out.rms_residual = std::sqrt(f.ssr / static_cast<double>(y.size()));
  if (out.gamma * span < std::log(2.0)) {
    out.flagged = true;
    out.reason = "short_span";
  } else if (out.r_squared < 0.99) {
    out.flagged = true;
    out.reason = "poor_fit";
  }
  return out;
}

Mat steady_state(const Mat& period_map, int dim) {
  Eigen::ComplexEigenSolver<Mat> es(period_map);
  // Eigenvectors of a trace-preserving map with eigenvalue != 1 are traceless;
  // skipping them resolves near-degenerate unit eigenvalues of coherences.
  Eigen::Index best = -1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    const Mat r = unvec(es.eigenvectors().col(j), dim);
    if (std::abs(r.trace()) < 1e-3 * r.norm()) continue;
    const double gap = std::abs(es.eigenvalues()(j) - cplx(1.0));
    if (gap < best_gap) {
      best_gap = gap;
      best = j;
    }
  }
  if (best < 0) throw ConvergenceError("period map has no trace-carrying eigenvector");
  Mat rho = unvec(es.eigenvectors().col(best), dim);
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

StroboscopicRun stroboscopic_population(const Mat& period_map, double period, const Mat& rho0,
                                        const Operator& projector, int samples, double min_efolds) {
  const int n = static_cast<int>(rho0.rows());
  if (period_map.rows() != n * n) throw DimensionMismatch("period map does not match rho0");
  if (samples < 4) throw InvalidParameter("need at least four samples");
  const Mat pv = vec(projector.matrix().transpose());  // tr(P rho) = sum P_ij rho_ji
  auto population = [&](const Mat& v) { return (pv.transpose() * v)(0, 0).real(); };

  const double y0 = population(vec(rho0));
  const double y_inf = population(vec(steady_state(period_map, n)));
  const double target = (1.0 - std::exp(-min_efolds)) * std::abs(y0 - y_inf);

  Mat stride_map = period_map;
  double stride = 1.0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    StroboscopicRun run;
    Mat v = vec(rho0);
    for (int j = 0; j <= samples; ++j) {
      run.times.push_back(j * stride * period);
      run.population.push_back(population(v));
      v = stride_map * v;
    }
    run.steady_population = y_inf;
    if (std::abs(run.population.back() - y0) >= target) return run;
    stride_map = stride_map * stride_map;
    stride *= 2.0;
  }
  throw ConvergenceError("population did not relax within 2^64 pump periods");
}

RelaxationRun relaxation_rate(const SystemModel& model, const std::vector<Collapse>& collapse, int bare_index,
                              const Operator& projector, int map_steps, int samples) {
  const FloquetResult fr = propagate_period(model, {std::max(1000, map_steps)});
  const LabeledLevel lv = fr.label(bare_index);
  const Vec mode = fr.modes.col(lv.floquet_index);
  RelaxationRun out;
  const Mat map = lindblad_period_map(model, collapse, map_steps);
  out.run = stroboscopic_population(map, fr.period, mode * mode.adjoint(), projector, samples);
  out.fit = fit_rate(out.run.times, out.run.population);
  return out;
}

}  // namespace tdsw
