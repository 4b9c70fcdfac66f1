#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tdsw/swt_engine.hpp"

namespace tdsw {

// ---------------------------------------------------------------- Floquet

struct LabelOptions {
  // Floquet states within this quasi-energy distance of the best-overlap state
  // and with overlap >= min_overlap form the hybridization cluster of a bare state.
  double cluster_window = 0.002 * 6.283185307179586;  // 2 MHz in rad/ns
  double min_overlap = 0.02;
  double min_weight = 0.6;
};

struct LabeledLevel {
  int bare_index = 0;
  int floquet_index = 0;    // best-overlap Floquet state
  double quasi_energy = 0.0;  // overlap-weighted over the cluster, unfolded near floquet_index
  double max_overlap = 0.0;
  double cluster_weight = 0.0;
  int cluster_size = 0;
};

class FloquetResult {
 public:
  double period = 0.0;
  double omega = 0.0;
  int steps = 0;
  HilbertSpace space;
  Mat monodromy;
  RVec quasi_energies;  // in (-w/2, w/2]
  Mat modes;            // columns: orthonormal Floquet modes at t = 0
  Eigen::MatrixXd overlaps;  // |<bare i|mode j>|^2
  std::vector<int> state_labels;  // bare i -> argmax_j overlap
  double unitarity_error = 0.0;

  LabeledLevel label(int bare_index, const LabelOptions& opts = {}) const;
};

struct FloquetOptions {
  int steps = 1000;
  double unitarity_tol = 1e-9;
};

// Smallest step count >= min_steps with (period / steps) * spectral radius <= theta.
int recommended_floquet_steps(const SystemModel& model, double theta = 0.1, int min_steps = 1000);

// One-period propagator by a fourth-order commutator-free Magnus scheme.
FloquetResult propagate_period(const SystemModel& model, const FloquetOptions& opts = {});

struct DressedShift {
  double value = 0.0;
  bool flagged = false;
  std::string reason;  // empty when not flagged
};

// chi = f(plus) - f(minus) from labeled quasi-energies, reduced mod w to the
// branch with minimal |chi|.
DressedShift dressed_shift(const FloquetResult& fr, const TransitionSpec& t, const LabelOptions& opts = {},
                           double branch_tol = 1e-9);

// ---------------------------------------------------------------- Lindblad

// H(t) = sum_j M_j exp(-i nu_j t)
struct SpectralHamiltonian {
  std::vector<std::pair<double, Mat>> terms;
  Mat at(double t) const;
  double max_frequency() const;
  int dim() const { return terms.empty() ? 0 : static_cast<int>(terms.front().second.rows()); }
};

SpectralHamiltonian spectral_hamiltonian(const SystemModel& model);

struct Collapse {
  Operator op;
  double rate = 0.0;
};

struct LindbladOptions {
  // Step chosen as theta / (largest spectral frequency), trimmed to hit the grid.
  double theta = 0.1;
  // Explicit step (overrides theta when > 0).
  double dt = 0.0;
  bool halving_check = true;
  double halving_tol = 1e-6;
  double trace_tol = 1e-6;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Mat> states;
  double max_trace_drift = 0.0;
  double max_hermiticity_error = 0.0;
  double halving_error = 0.0;  // max |rho_h - rho_{h/2}| at grid times (0 when unchecked)
  double step = 0.0;
};

Trajectory lindblad_evolve(const SpectralHamiltonian& h, const std::vector<Collapse>& collapse, const Mat& rho0,
                           const std::vector<double>& t_grid, const LindbladOptions& opts = {});
Trajectory lindblad_evolve(const SystemModel& model, const std::vector<Collapse>& collapse, const Mat& rho0,
                           const std::vector<double>& t_grid, const LindbladOptions& opts = {});

// Superoperator of one pump period acting on column-stacked vec(rho).
Mat lindblad_period_map(const SystemModel& model, const std::vector<Collapse>& collapse, int steps);

Mat vec(const Mat& rho);
Mat unvec(const Mat& v, int dim);

// ------------------------------------------------------------ Spectrum probe

struct SpectrumOptions {
  double probe_fraction = 1.0 / 20.0;  // probe amplitude / kappa
  double settle_efolds = 8.0;          // in units of 2/kappa
  double window = 10.0;                // averaging window (ns); at least 20 pump periods is enforced
  double convergence_tol = 2e-3;       // relative change between consecutive windows
  int max_windows = 40;
  double theta = 0.3;  // step error stays well below convergence_tol
};

struct SpectrumTrace {
  std::vector<double> delta;     // rad/ns, relative to w_a
  std::vector<double> response;  // |<a>|^2
  int prepared_level = 0;
  std::string conditioning;
};

// Prepared state |level, 0>; damping kappa D[a] on the resonator.
SpectrumTrace spectrum_probe(const SystemModel& model, double kappa, int prepared_level,
                             const std::vector<double>& delta_grid, const SpectrumOptions& opts = {});
// Single detuning, exposed for parallel sweeps.
double probe_response(const SystemModel& model, double kappa, int prepared_level, double delta,
                      const SpectrumOptions& opts = {});

// Lorentzian peak estimate: quadratic fit of 1/S over points with S >= floor * max S.
double peak_position(const SpectrumTrace& trace, double floor = 0.2);

// ------------------------------------------------------------ Rate fitting

struct RateFit {
  double gamma = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
  bool flagged = false;
  std::string reason;
};

// Least-squares fit of A exp(-gamma t) + C.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y);

// Stationary state of a period map (eigenvalue closest to 1, unit trace).
Mat steady_state(const Mat& period_map, int dim);

// Population trajectory at stroboscopic times from the period map. The sample
// stride doubles until the population has covered (1 - e^-min_efolds) of its
// distance to the stationary value.
struct StroboscopicRun {
  std::vector<double> times;
  std::vector<double> population;
  double steady_population = 0.0;
};
StroboscopicRun stroboscopic_population(const Mat& period_map, double period, const Mat& rho0,
                                        const Operator& projector, int samples = 80, double min_efolds = 2.0);

// Start in the Floquet mode of a bare state (no dressing transient), evolve
// with the period map and fit A exp(-gamma t) + C to <projector>.
struct RelaxationRun {
  StroboscopicRun run;
  RateFit fit;
};
RelaxationRun relaxation_rate(const SystemModel& model, const std::vector<Collapse>& collapse, int bare_index,
                              const Operator& projector, int map_steps = 400, int samples = 80);

}  // namespace tdsw
