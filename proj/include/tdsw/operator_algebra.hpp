#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace tdsw {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Ordered tensor product of truncated subsystems. Convention: the qubit or
// Kerr mode is subsystem 0, the linear resonator is subsystem 1. Basis index
// is row-major in the subsystem digits (last subsystem varies fastest).
class HilbertSpace {
 public:
  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int total_dim() const { return total_; }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }

  std::vector<int> digits(int index) const;
  int index(const std::vector<int>& digits) const;

  bool operator==(const HilbertSpace& o) const { return dims_ == o.dims_; }
  bool operator!=(const HilbertSpace& o) const { return !(*this == o); }

 private:
  std::vector<int> dims_;
  int total_ = 0;
};

class Operator {
 public:
  Operator() = default;
  Operator(HilbertSpace space, Mat matrix);

  static Operator zero(const HilbertSpace& space);
  static Operator identity(const HilbertSpace& space);
  static Operator diagonal(const HilbertSpace& space, const RVec& entries);

  const HilbertSpace& space() const { return space_; }
  const Mat& matrix() const { return m_; }
  int dim() const { return space_.total_dim(); }

  double max_abs() const;
  bool is_hermitian(double tol = 1e-12) const;
  bool is_anti_hermitian(double tol = 1e-12) const;
  bool is_diagonal(double tol = 0.0) const;
  RVec real_diagonal() const;

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(cplx c);

 private:
  HilbertSpace space_;
  Mat m_;
};

void require_same_space(const Operator& a, const Operator& b);

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator-(const Operator& a);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(cplx c, const Operator& a);
Operator operator*(const Operator& a, cplx c);

Operator dagger(const Operator& a);
Operator commutator(const Operator& a, const Operator& b);
// ad_S^n(A) = [S,[S,...[S,A]]]
Operator nested_commutator(const Operator& s, const Operator& a, int n);

// Embed a local subsystem matrix by tensoring identities on the other factors.
Operator embed(const HilbertSpace& space, int subsystem, const Mat& local);

Operator build_ladder(const HilbertSpace& space, int subsystem);
Operator build_number(const HilbertSpace& space, int subsystem);

// Two-level helpers on a dim-2 subsystem; index 0 carries sigma_z = +1.
Operator sigma_z(const HilbertSpace& space, int subsystem);
Operator sigma_x(const HilbertSpace& space, int subsystem);
Operator sigma_minus(const HilbertSpace& space, int subsystem);
Operator sigma_plus(const HilbertSpace& space, int subsystem);

// Relative tolerance used to decide that two H0 eigenvalues coincide.
inline constexpr double kDegeneracyRelTol = 1e-9;

// Pairs (j<l) of basis states with equal H0 eigenvalue. H0 must be diagonal.
std::vector<std::pair<int, int>> degenerate_pairs(const Operator& h0);

// Keep entries of A inside equal-eigenvalue blocks of diagonal H0.
Operator pinch(const Operator& h0, const Operator& a);
Operator off_diag(const Operator& h0, const Operator& a);

// Boolean mask of the pinch: mask(j,l) = true iff E_j == E_l within tolerance.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pinch_mask(const Operator& h0);

}  // namespace tdsw
