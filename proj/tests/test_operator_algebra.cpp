#include <doctest.h>

#include <cmath>
#include <random>

#include "tdsw/errors.hpp"
#include "tdsw/operator_algebra.hpp"

using namespace tdsw;

namespace {

Operator random_operator(const HilbertSpace& sp, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Mat m(sp.total_dim(), sp.total_dim());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return Operator(sp, m);
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("HilbertSpace validates dimensions and maps digits row-major") {
  CHECK_THROWS_AS(HilbertSpace(std::vector<int>{}), InvalidParameter);
  CHECK_THROWS_AS(HilbertSpace({2, 1}), InvalidParameter);
  HilbertSpace sp({2, 4});
  CHECK(sp.total_dim() == 8);
  CHECK(sp.index({1, 2}) == 6);
  CHECK(sp.digits(6) == std::vector<int>{1, 2});
  CHECK_THROWS_AS(sp.index({2, 0}), std::out_of_range);
  CHECK_THROWS_AS(sp.index({0}), DimensionMismatch);
}

TEST_CASE("Operator rejects a matrix of the wrong size") {
  CHECK_THROWS_AS(Operator(HilbertSpace({3}), Mat::Zero(2, 2)), DimensionMismatch);
}

TEST_CASE("commutator of an operator with itself vanishes and dagger is an involution") {
  std::mt19937 rng(1);
  HilbertSpace sp({2, 5});
  const Operator a = random_operator(sp, rng);
  CHECK(commutator(a, a).max_abs() == 0.0);
  CHECK((dagger(dagger(a)) - a).max_abs() == 0.0);
}

TEST_CASE("truncated [a, a^dagger] = diag(1,1,1,1,-4) on N_a = 5") {
  HilbertSpace sp({5});
  const Operator a = build_ladder(sp, 0);
  RVec expect(5);
  expect << 1, 1, 1, 1, -4;
  const Operator c = commutator(a, dagger(a));
  CHECK(max_abs(c.matrix() - expect.cast<cplx>().asDiagonal().toDenseMatrix()) < 1e-14);
}

TEST_CASE("ladder on a lone dim-3 subsystem") {
  const Operator a = build_ladder(HilbertSpace({3}), 0);
  Mat expect = Mat::Zero(3, 3);
  expect(0, 1) = 1.0;
  expect(1, 2) = std::sqrt(2.0);
  CHECK(max_abs(a.matrix() - expect) < 1e-15);
}

TEST_CASE("ladder on a dim-2 subsystem equals sigma minus") {
  HilbertSpace sp({2});
  const Operator a = build_ladder(sp, 0);
  CHECK((a - sigma_minus(sp, 0)).max_abs() == 0.0);
  CHECK(a.matrix()(0, 1) == cplx(1.0));
  // Index 0 carries sigma_z = +1.
  CHECK(sigma_z(sp, 0).matrix()(0, 0) == cplx(1.0));
  CHECK((sigma_x(sp, 0) - sigma_plus(sp, 0) - sigma_minus(sp, 0)).max_abs() == 0.0);
}

TEST_CASE("embedded operators on different subsystems commute") {
  HilbertSpace sp({2, 4});
  CHECK(commutator(build_ladder(sp, 1), sigma_z(sp, 0)).max_abs() == 0.0);
  CHECK(commutator(build_ladder(sp, 1), build_ladder(sp, 0)).max_abs() == 0.0);
  CHECK_THROWS_AS(build_ladder(sp, 2), std::out_of_range);
  CHECK_THROWS_AS(sigma_z(sp, 1), DimensionMismatch);
}

TEST_CASE("operations across different spaces throw") {
  const Operator a = Operator::identity(HilbertSpace({2, 3}));
  const Operator b = Operator::identity(HilbertSpace({3, 2}));
  CHECK_THROWS_AS(a + b, DimensionMismatch);
  CHECK_THROWS_AS(commutator(a, b), DimensionMismatch);
}

TEST_CASE("commutator bilinearity and Jacobi identity on random 16x16 operators") {
  std::mt19937 rng(7);
  HilbertSpace sp({4, 4});
  for (int trial = 0; trial < 5; ++trial) {
    const Operator a = random_operator(sp, rng), b = random_operator(sp, rng), c = random_operator(sp, rng);
    const cplx s(0.3, -1.7);
    const Operator lhs = commutator(a + s * b, c);
    const Operator rhs = commutator(a, c) + s * commutator(b, c);
    // Entry scale of a product of operators on a 16-dim space.
    CHECK((lhs - rhs).max_abs() <= 1e-12 * 16.0 * (a.max_abs() + std::abs(s) * b.max_abs()) * c.max_abs());
    const double unit = a.max_abs() * b.max_abs() * c.max_abs();
    const Operator jac =
        commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
    CHECK(jac.max_abs() <= 1e-12 * 256.0 * unit);
  }
}

TEST_CASE("nested commutator matches repeated commutators") {
  std::mt19937 rng(3);
  HilbertSpace sp({2, 3});
  const Operator s = random_operator(sp, rng), a = random_operator(sp, rng);
  CHECK((nested_commutator(s, a, 0) - a).max_abs() == 0.0);
  CHECK((nested_commutator(s, a, 2) - commutator(s, commutator(s, a))).max_abs() < 1e-12);
  CHECK_THROWS_AS(nested_commutator(s, a, -1), InvalidParameter);
}

TEST_CASE("pinch and off_diag on a qubit-resonator space") {
  HilbertSpace sp({2, 4});
  const Operator a = build_ladder(sp, 1);
  const Operator n = build_number(sp, 1);
  const Operator h0 = cplx(-0.5 * 5.0) * sigma_z(sp, 0) + cplx(3.0) * n;

  SUBCASE("diagonal operator is kept whole") {
    const Operator d = sigma_z(sp, 0) * n;
    CHECK((pinch(h0, d) - d).max_abs() == 0.0);
    CHECK(off_diag(h0, d).max_abs() == 0.0);
  }
  SUBCASE("sigma+ a has no diagonal part") { CHECK(pinch(h0, sigma_plus(sp, 0) * a).max_abs() == 0.0); }
  SUBCASE("sigma_z n + sigma+ a^dagger pinches to sigma_z n") {
    const Operator d = sigma_z(sp, 0) * n;
    const Operator x = d + sigma_plus(sp, 0) * dagger(a);
    CHECK((pinch(h0, x) - d).max_abs() == 0.0);
  }
  SUBCASE("projector identities and commutation with H0") {
    std::mt19937 rng(11);
    const Operator x = random_operator(sp, rng);
    const Operator p = pinch(h0, x), q = off_diag(h0, x);
    CHECK((p + q - x).max_abs() == 0.0);
    CHECK((pinch(h0, p) - p).max_abs() == 0.0);
    CHECK((off_diag(h0, q) - q).max_abs() == 0.0);
    CHECK(pinch(h0, q).max_abs() == 0.0);
    CHECK(commutator(p, h0).max_abs() < 1e-12);
  }
  SUBCASE("non-diagonal H0 is rejected") { CHECK_THROWS_AS(pinch(sigma_x(sp, 0), n), InvalidParameter); }
}

TEST_CASE("degenerate H0 keeps equal-energy blocks") {
  HilbertSpace sp({3});
  RVec e(3);
  e << 1.0, 1.0 + 1e-12, 2.0;
  const Operator h0 = Operator::diagonal(sp, e);
  CHECK(degenerate_pairs(h0).size() == 1);
  Mat m = Mat::Ones(3, 3);
  const Operator p = pinch(h0, Operator(sp, m));
  CHECK(p.matrix()(0, 1) == cplx(1.0));
  CHECK(p.matrix()(0, 2) == cplx(0.0));
  CHECK((p + off_diag(h0, Operator(sp, m))).matrix() == m);
}
