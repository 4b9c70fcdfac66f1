#include "tdsw/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdsw/errors.hpp"

namespace tdsw {

HilbertSpace::HilbertSpace(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidParameter("HilbertSpace needs at least one subsystem");
  total_ = 1;
  for (int d : dims_) {
    if (d < 2) throw InvalidParameter("subsystem dimension must be >= 2, got " + std::to_string(d));
    total_ *= d;
  }
}

std::vector<int> HilbertSpace::digits(int index) const {
  if (index < 0 || index >= total_) throw std::out_of_range("basis index out of range");
  std::vector<int> out(dims_.size());
  for (int s = num_subsystems() - 1; s >= 0; --s) {
    out[s] = index % dims_[s];
    index /= dims_[s];
  }
  return out;
}

int HilbertSpace::index(const std::vector<int>& d) const {
  if (d.size() != dims_.size()) throw DimensionMismatch("digit vector has wrong length");
  int idx = 0;
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    if (d[s] < 0 || d[s] >= dims_[s]) throw std::out_of_range("subsystem level out of range");
    idx = idx * dims_[s] + d[s];
  }
  return idx;
}

Operator::Operator(HilbertSpace space, Mat matrix) : space_(std::move(space)), m_(std::move(matrix)) {
  if (m_.rows() != space_.total_dim() || m_.cols() != space_.total_dim())
    throw DimensionMismatch("matrix is " + std::to_string(m_.rows()) + "x" +
                            std::to_string(m_.cols()) + ", space dimension " +
                            std::to_string(space_.total_dim()));
}

Operator Operator::zero(const HilbertSpace& space) {
  return {space, Mat::Zero(space.total_dim(), space.total_dim())};
}

Operator Operator::identity(const HilbertSpace& space) {
  return {space, Mat::Identity(space.total_dim(), space.total_dim())};
}

Operator Operator::diagonal(const HilbertSpace& space, const RVec& entries) {
  if (entries.size() != space.total_dim()) throw DimensionMismatch("diagonal length mismatch");
  Mat m = Mat::Zero(space.total_dim(), space.total_dim());
  m.diagonal() = entries.cast<cplx>();
  return {space, std::move(m)};
}

double Operator::max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

bool Operator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, max_abs());
}

bool Operator::is_anti_hermitian(double tol) const {
  return (m_ + m_.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, max_abs());
}

bool Operator::is_diagonal(double tol) const {
  for (int j = 0; j < m_.rows(); ++j)
    for (int l = 0; l < m_.cols(); ++l)
      if (j != l && std::abs(m_(j, l)) > tol) return false;
  return true;
}

RVec Operator::real_diagonal() const { return m_.diagonal().real(); }

Operator& Operator::operator+=(const Operator& o) {
  require_same_space(*this, o);
  m_ += o.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& o) {
  require_same_space(*this, o);
  m_ -= o.m_;
  return *this;
}

Operator& Operator::operator*=(cplx c) {
  m_ *= c;
  return *this;
}

void require_same_space(const Operator& a, const Operator& b) {
  if (a.space() != b.space()) throw DimensionMismatch("operators act on different Hilbert spaces");
}

Operator operator+(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  return {a.space(), a.matrix() + b.matrix()};
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  return {a.space(), a.matrix() - b.matrix()};
}

Operator operator-(const Operator& a) { return {a.space(), -a.matrix()}; }

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  return {a.space(), a.matrix() * b.matrix()};
}

Operator operator*(cplx c, const Operator& a) { return {a.space(), c * a.matrix()}; }
Operator operator*(const Operator& a, cplx c) { return {a.space(), c * a.matrix()}; }

Operator dagger(const Operator& a) { return {a.space(), a.matrix().adjoint()}; }

Operator commutator(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  return {a.space(), a.matrix() * b.matrix() - b.matrix() * a.matrix()};
}

Operator nested_commutator(const Operator& s, const Operator& a, int n) {
  if (n < 0) throw InvalidParameter("nested commutator depth must be >= 0");
  Operator out = a;
  for (int i = 0; i < n; ++i) out = commutator(s, out);
  return out;
}

Operator embed(const HilbertSpace& space, int subsystem, const Mat& local) {
  if (subsystem < 0 || subsystem >= space.num_subsystems())
    throw std::out_of_range("subsystem index " + std::to_string(subsystem) + " out of range");
  const int d = space.dims()[subsystem];
  if (local.rows() != d || local.cols() != d) throw DimensionMismatch("local operator has wrong size");
  int left = 1, right = 1;
  for (int s = 0; s < subsystem; ++s) left *= space.dims()[s];
  for (int s = subsystem + 1; s < space.num_subsystems(); ++s) right *= space.dims()[s];
  const int n = space.total_dim();
  Mat m = Mat::Zero(n, n);
  for (int l = 0; l < left; ++l)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        if (local(a, b) == cplx(0.0)) continue;
        for (int r = 0; r < right; ++r) m((l * d + a) * right + r, (l * d + b) * right + r) = local(a, b);
      }
  return {space, std::move(m)};
}

Operator build_ladder(const HilbertSpace& space, int subsystem) {
  if (subsystem < 0 || subsystem >= space.num_subsystems())
    throw std::out_of_range("subsystem index " + std::to_string(subsystem) + " out of range");
  const int d = space.dims()[subsystem];
  Mat a = Mat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return embed(space, subsystem, a);
}

Operator build_number(const HilbertSpace& space, int subsystem) {
  Operator a = build_ladder(space, subsystem);
  return dagger(a) * a;
}

namespace {
void require_qubit(const HilbertSpace& space, int subsystem) {
  if (subsystem < 0 || subsystem >= space.num_subsystems())
    throw std::out_of_range("subsystem index out of range");
  if (space.dims()[subsystem] != 2) throw DimensionMismatch("Pauli operator needs a dim-2 subsystem");
}
}  // namespace

Operator sigma_z(const HilbertSpace& space, int subsystem) {
  require_qubit(space, subsystem);
  Mat z = Mat::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return embed(space, subsystem, z);
}

Operator sigma_minus(const HilbertSpace& space, int subsystem) {
  require_qubit(space, subsystem);
  return build_ladder(space, subsystem);
}

Operator sigma_plus(const HilbertSpace& space, int subsystem) {
  return dagger(sigma_minus(space, subsystem));
}

Operator sigma_x(const HilbertSpace& space, int subsystem) {
  return sigma_minus(space, subsystem) + sigma_plus(space, subsystem);
}

namespace {
RVec diagonal_energies(const Operator& h0) {
  if (!h0.is_diagonal()) throw InvalidParameter("H0 must be diagonal in the product basis");
  return h0.real_diagonal();
}

double degeneracy_scale(const RVec& e) {
  return e.size() == 0 ? 0.0 : e.cwiseAbs().maxCoeff();
}
}  // namespace

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pinch_mask(const Operator& h0) {
  const RVec e = diagonal_energies(h0);
  const double tol = kDegeneracyRelTol * degeneracy_scale(e);
  const int n = static_cast<int>(e.size());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) mask(j, l) = std::abs(e(j) - e(l)) <= tol;
  return mask;
}

std::vector<std::pair<int, int>> degenerate_pairs(const Operator& h0) {
  const auto mask = pinch_mask(h0);
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j < mask.rows(); ++j)
    for (int l = j + 1; l < mask.cols(); ++l)
      if (mask(j, l)) out.emplace_back(j, l);
  return out;
}

Operator pinch(const Operator& h0, const Operator& a) {
  require_same_space(h0, a);
  const auto mask = pinch_mask(h0);
  Mat m = Mat::Zero(a.dim(), a.dim());
  for (int j = 0; j < a.dim(); ++j)
    for (int l = 0; l < a.dim(); ++l)
      if (mask(j, l)) m(j, l) = a.matrix()(j, l);
  return {a.space(), std::move(m)};
}

Operator off_diag(const Operator& h0, const Operator& a) {
  require_same_space(h0, a);
  const auto mask = pinch_mask(h0);
  Mat m = a.matrix();
  for (int j = 0; j < a.dim(); ++j)
    for (int l = 0; l < a.dim(); ++l)
      if (mask(j, l)) m(j, l) = 0.0;
  return {a.space(), std::move(m)};
}

}  // namespace tdsw
