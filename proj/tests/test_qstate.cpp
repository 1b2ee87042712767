#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "entfate/errors.hpp"
#include "entfate/qstate.hpp"
#include "test_util.hpp"

using namespace entfate;
using testutil::max_abs;

namespace {

CVector bell() {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

CMatrix ket0() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("basis convention: site 1 is the most significant bit") {
  const BasisConvention c(3);
  const std::vector<int> bits{0, 0, 1};
  CHECK(c.index_of(bits) == 1);
  CHECK(c.index_of(std::vector<int>{1, 0, 0}) == 4);
  CHECK(c.bit(4, 1) == 1);
  CHECK(c.bit(4, 3) == 0);
  for (std::size_t b = 0; b < c.dim(); ++b) CHECK(c.index_of(c.configuration(b)) == b);
  CHECK(BasisConvention::id == "site1-msb/bit0-up");
}

TEST_CASE("subsystem spec rejects duplicates and out-of-range labels") {
  CHECK_THROWS_AS(SubsystemSpec({1, 1}), DomainError);
  CHECK_THROWS_AS(SubsystemSpec({0}), DomainError);
  CHECK_THROWS_AS(SubsystemSpec({5}).check_range(4), DomainError);
  CHECK_NOTHROW(SubsystemSpec({4, 2}).check_range(4));
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(PureState(CVector::Ones(4)), DomainError);
  CHECK_THROWS_AS(PureState(CVector::Ones(3) / std::sqrt(3.0)), DomainError);
  CMatrix nonherm = CMatrix::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{nonherm}, DomainError);
  CHECK_THROWS_AS(DensityMatrix(CMatrix::Identity(2, 2)), DomainError);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, DomainError);
  CHECK(DensityMatrix::maximally_mixed(3).sites() == std::vector<int>{1, 2, 3});
}

TEST_CASE("partial trace examples") {
  const PureState b(bell());
  const DensityMatrix r1 = partial_trace(b, SubsystemSpec{1}, BasisConvention(2));
  CHECK(max_abs(r1.matrix() - CMatrix::Identity(2, 2) / 2.0) < 1e-15);

  std::mt19937_64 rng(1);
  const DensityMatrix a = testutil::random_density(1, rng), c = testutil::random_density(1, rng);
  const DensityMatrix prod(kron({a.matrix(), c.matrix()}));
  CHECK(max_abs(partial_trace(prod, SubsystemSpec{1}).matrix() - a.matrix()) < 1e-14);
  CHECK(max_abs(partial_trace(prod, SubsystemSpec{2}).matrix() - c.matrix()) < 1e-14);
  // factor order follows `keep`
  CHECK(max_abs(partial_trace(prod, SubsystemSpec{2, 1}).matrix() - kron({c.matrix(), a.matrix()})) <
        1e-14);

  CHECK_THROWS_AS(partial_trace(b, SubsystemSpec{}, BasisConvention(2)), DomainError);
  CHECK_THROWS_AS(partial_trace(b, SubsystemSpec{3}, BasisConvention(2)), DomainError);
}

TEST_CASE("partial trace matches an index-loop oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState psi = testutil::random_pure(5, rng);
    const CMatrix full = testutil::projector(psi.amplitudes());
    const SubsystemSpec keep{4, 1, 3};
    const auto r = partial_trace(psi, keep, BasisConvention(5));
    CHECK(max_abs(r.matrix() - testutil::brute_partial_trace(full, 5, {3, 0, 2})) < 1e-14);
    const auto rd = partial_trace(DensityMatrix(full), keep);
    CHECK(max_abs(rd.matrix() - r.matrix()) < 1e-14);
  }
}

TEST_CASE("partial trace chain consistency, trace and hermiticity") {
  std::mt19937_64 rng(3);
  double worst = 0.0, worst_trace = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PureState psi = testutil::random_pure(4, rng);
    const BasisConvention conv(4);
    const auto two = partial_trace(psi, SubsystemSpec{2, 4}, conv);
    const auto one_chain = partial_trace(two, SubsystemSpec{2});
    const auto one = partial_trace(psi, SubsystemSpec{2}, conv);
    worst = std::max(worst, max_abs(one_chain.matrix() - one.matrix()));
    worst_trace = std::max(worst_trace, std::abs(two.matrix().trace().real() - 1.0));
    CHECK(max_hermitian_deviation(two.matrix()) == 0.0);
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_trace <= 1e-13);
}

TEST_CASE("partial transpose") {
  const DensityMatrix b = DensityMatrix::from_pure(PureState(bell()));
  const CMatrix pt = partial_transpose(b, SubsystemSpec{1});
  const auto eig = eigh(pt).eigenvalues;
  CHECK(eig(0) == doctest::Approx(-0.5).epsilon(1e-14));
  for (int i = 1; i < 4; ++i) CHECK(eig(i) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(trace_norm(pt) == doctest::Approx(2.0).epsilon(1e-14));

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    // heavy identity admixture keeps the transpose PSD so it can be wrapped again
    const DensityMatrix r(0.1 * testutil::random_density(3, rng).matrix() +
                          0.9 * DensityMatrix::maximally_mixed(3).matrix());
    const CMatrix once = partial_transpose(r, SubsystemSpec{2});
    CHECK(max_abs(partial_transpose(DensityMatrix(once), SubsystemSpec{2}) - r.matrix()) < 1e-15);
    CHECK(std::abs(once.trace() - r.matrix().trace()) < 1e-15);
    CHECK(max_hermitian_deviation(once) < 1e-15);
  }
  const DensityMatrix a = testutil::random_density(1, rng), c = testutil::random_density(1, rng);
  const DensityMatrix prod(kron({a.matrix(), c.matrix()}));
  const CMatrix expected = kron({CMatrix(a.matrix().transpose()), c.matrix()});
  CHECK(max_abs(partial_transpose(prod, SubsystemSpec{1}) - expected) < 1e-15);
  CHECK(eigh(expected).eigenvalues.minCoeff() >= 0.0);
  CHECK_THROWS_AS(partial_transpose(prod, SubsystemSpec{3}), DomainError);
}

TEST_CASE("trace norm of either transpose side agrees") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix r = testutil::random_density(2, rng);
    CHECK(trace_norm(partial_transpose(r, SubsystemSpec{1})) ==
          doctest::Approx(trace_norm(partial_transpose(r, SubsystemSpec{2}))).epsilon(1e-12));
  }
}

TEST_CASE("frobenius distance examples and triangle inequality") {
  const DensityMatrix half = DensityMatrix::maximally_mixed(1);
  const DensityMatrix up(ket0());
  CHECK(frobenius_distance(half, half) == 0.0);
  CHECK(frobenius_distance(half, up) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  const DensityMatrix b = DensityMatrix::from_pure(PureState(bell()));
  const CMatrix werner = b.matrix() / 3.0 + (2.0 / 3.0) * CMatrix::Identity(4, 4) / 4.0;
  CHECK(frobenius_distance(b, DensityMatrix(werner)) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = testutil::random_density(2, rng), y = testutil::random_density(2, rng),
               z = testutil::random_density(2, rng);
    CHECK(frobenius_distance(x, z) <= frobenius_distance(x, y) + frobenius_distance(y, z) + 1e-12);
    CHECK(frobenius_distance(x, y) == frobenius_distance(y, x));
  }
  CHECK_THROWS_AS(frobenius_distance(half, b), DomainError);
}

TEST_CASE("trace norm examples") {
  std::mt19937_64 rng(7);
  CHECK(trace_norm(testutil::random_density(3, rng).matrix()) == doctest::Approx(1.0).epsilon(1e-13));
  CMatrix d = CMatrix::Zero(4, 4);
  d.diagonal() << 0.5, 0.5, 0.5, -0.5;
  CHECK(trace_norm(d) == doctest::Approx(2.0));
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(trace_norm(bad), DomainError);
}

TEST_CASE("eigh examples") {
  const auto z = eigh(pauli(3));
  CHECK(z.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(z.eigenvalues(1) == doctest::Approx(1.0));
  const auto x = eigh(pauli(1));
  CHECK(x.eigenvalues(0) == doctest::Approx(-1.0));
  const double s = 1.0 / std::sqrt(2.0);
  // |0> - |1>, up to phase
  CHECK(std::abs(std::abs(x.eigenvectors(0, 0)) - s) < 1e-15);
  CHECK(std::abs(x.eigenvectors(0, 0) + x.eigenvectors(1, 0)) < 1e-15);
  CHECK(std::abs(x.eigenvectors(0, 1) - x.eigenvectors(1, 1)) < 1e-15);
}

TEST_CASE("eigh reconstruction and orthonormality, real and complex") {
  std::mt19937_64 rng(8);
  for (int dim : {5, 64, 300}) {
    RMatrix a = RMatrix::Zero(dim, dim);
    std::normal_distribution<double> g;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    for (const auto& e : {eigh(a), eigh_reference(a)}) {
      const RMatrix& v = e.eigenvectors;
      CHECK((v * e.eigenvalues.asDiagonal() * v.transpose() - a).norm() <= 1e-9 * dim);
      CHECK((v.transpose() * v - RMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() <= 1e-12);
      for (int k = 1; k < dim; ++k) CHECK(e.eigenvalues(k) >= e.eigenvalues(k - 1));
    }
    CHECK((eigh(a).eigenvalues - eigh_reference(a).eigenvalues).cwiseAbs().maxCoeff() < 1e-10);

    const CMatrix h = [&] {
      const CMatrix m = testutil::ginibre(dim, rng);
      return CMatrix(0.5 * (m + m.adjoint()));
    }();
    const auto e = eigh(h);
    const CMatrix& v = e.eigenvectors;
    CHECK((v * e.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint() - h).norm() <= 1e-9 * dim);
    CHECK(max_abs(v.adjoint() * v - CMatrix::Identity(dim, dim)) <= 1e-12);
  }
  RMatrix asym = RMatrix::Identity(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(eigh(asym), DomainError);
}

TEST_CASE("kron examples") {
  CHECK(max_abs(kron({pauli(0), pauli(0)}) - CMatrix::Identity(4, 4)) == 0.0);
  const CMatrix zi = kron({pauli(3), pauli(0)});
  CMatrix expected = CMatrix::Zero(4, 4);
  expected.diagonal() << 1, 1, -1, -1;
  CHECK(max_abs(zi - expected) == 0.0);
  CVector ket00 = CVector::Zero(4);
  ket00(0) = 1.0;
  const CVector out = kron({pauli(1), pauli(1)}) * ket00;
  CHECK(std::abs(out(3) - 1.0) == 0.0);
  CHECK_THROWS_AS(kron(std::span<const CMatrix>{}), DomainError);

  std::mt19937_64 rng(9);
  const CMatrix a = testutil::ginibre(2, rng), b = testutil::ginibre(2, rng), c = testutil::ginibre(2, rng);
  CHECK(max_abs(kron({kron({a, b}), c}) - kron({a, kron({b, c})})) < 1e-14);
}

TEST_CASE("permute_qubits reorders tensor factors") {
  std::mt19937_64 rng(10);
  const CMatrix a = testutil::ginibre(2, rng), b = testutil::ginibre(2, rng), c = testutil::ginibre(2, rng);
  const std::vector<int> perm{2, 0, 1};
  CHECK(max_abs(permute_qubits(kron({a, b, c}), perm) - kron({c, a, b})) < 1e-14);
  CHECK_THROWS_AS(permute_qubits(kron({a, b}), std::vector<int>{0, 0}), DomainError);
}
