#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "entfate/errors.hpp"
#include "entfate/measures.hpp"
#include "test_util.hpp"

using namespace entfate;

namespace {

CVector bell() {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::numbers::sqrt2;
  return v;
}

CVector w_state() {
  CVector v = CVector::Zero(8);
  v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
  return v;
}

CVector ghz() {
  CVector v = CVector::Zero(8);
  v(0) = v(7) = 1.0 / std::numbers::sqrt2;
  return v;
}

DensityMatrix pure(const CVector& v) { return DensityMatrix(testutil::projector(v)); }

// Bipartite product across one of the three cuts of a three-qubit system.
CMatrix random_bipartite_product(int cut, std::mt19937_64& rng) {
  const CMatrix single = testutil::random_density(1, rng).matrix();
  const CMatrix pair = testutil::random_density(2, rng).matrix();
  const CMatrix x = kron({single, pair});  // factor order (single, pair0, pair1)
  if (cut == 0) return x;
  const std::vector<int> perm = cut == 1 ? std::vector<int>{1, 0, 2} : std::vector<int>{1, 2, 0};
  return permute_qubits(x, perm);
}

double min_pt_eigenvalue(const DensityMatrix& rho) {
  return eigh(partial_transpose(rho, SubsystemSpec{1})).eigenvalues(0);
}

}  // namespace

TEST_CASE("log negativity examples") {
  CHECK(log_negativity(pure(bell()), SubsystemSpec{1}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(log_negativity(pure(bell()), SubsystemSpec{2}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(log_negativity(DensityMatrix::maximally_mixed(2), SubsystemSpec{1}) == 0.0);
  CHECK_THROWS_AS(log_negativity(pure(bell()), SubsystemSpec{}), DomainError);
  CHECK_THROWS_AS(log_negativity(pure(bell()), SubsystemSpec{1, 2}), DomainError);
}

TEST_CASE("log negativity vanishes exactly on products") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix a = testutil::random_density(1, rng).matrix();
    const CMatrix b = testutil::random_density(1, rng).matrix();
    CHECK(log_negativity(DensityMatrix(kron({a, b})), SubsystemSpec{1}) == 0.0);
  }
}

TEST_CASE("log negativity is invariant under local unitaries") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix rho = trial % 2 ? testutil::random_density(2, rng).matrix()
                                  : testutil::projector(testutil::random_vector(2, rng));
    const CMatrix u = kron({testutil::random_unitary(2, rng), testutil::random_unitary(2, rng)});
    const CMatrix moved = u * rho * u.adjoint();
    const double a = log_negativity(DensityMatrix(rho), SubsystemSpec{1});
    const double b = log_negativity(DensityMatrix(0.5 * (moved + moved.adjoint())), SubsystemSpec{1});
    CHECK(std::abs(a - b) <= 1e-10);
  }
}

TEST_CASE("three-party functional examples") {
  CHECK(gme_W_raw(pure(w_state())) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(gme_W_raw(DensityMatrix::maximally_mixed(3)) == doctest::Approx(-9.0 / 16.0).epsilon(1e-14));
  CHECK(std::abs(gme_W_raw(pure(ghz()))) < 1e-15);
  CHECK_THROWS_AS(gme_W_raw(CMatrix::Identity(4, 4)), DomainError);
}

TEST_CASE("local unitary triples are unitary") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(-4.0, 4.0);
  LocalUnitaryTriple t;
  for (auto& site : t.angles) {
    for (double& a : site) a = angle(rng);
  }
  for (int s = 0; s < 3; ++s) {
    const CMatrix u = t.unitary(s);
    CHECK(testutil::max_abs(u * u.adjoint() - CMatrix::Identity(2, 2)) < 1e-12);
  }
  const CMatrix full = t.full();
  CHECK(testutil::max_abs(full - kron({t.unitary(0), t.unitary(1), t.unitary(2)})) < 1e-15);
  CHECK(testutil::max_abs(LocalUnitaryTriple{}.full() - CMatrix::Identity(8, 8)) < 1e-15);
  CHECK_THROWS_AS(t.unitary(3), DomainError);
}

TEST_CASE("optimized witness") {
  OptimizerConfig cfg = default_w_config();
  cfg.restarts = 10;
  const GmeWResult w = gme_W(pure(w_state()), cfg);
  CHECK(w.value >= 0.5 - 1e-6);
  CHECK(gme_W(DensityMatrix::maximally_mixed(3), cfg).value == 0.0);

  // GHZ is genuinely entangled; a local basis change exposes it.
  CHECK(gme_W(pure(ghz()), cfg).value > 0.0);

  // the reported rotation reproduces the raw value
  const CMatrix u = w.rotation.full();
  CHECK(gme_W_raw(CMatrix(u * pure(w_state()).matrix() * u.adjoint())) == doctest::Approx(w.raw).epsilon(1e-12));

  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = testutil::random_density(3, rng);
    CHECK(gme_W(rho, cfg).value >= std::max(0.0, gme_W_raw(rho)));
  }
  CHECK_THROWS_AS(gme_W(DensityMatrix::maximally_mixed(2), cfg), DomainError);
}

TEST_CASE("witness is never positive on biseparable states") {
  std::mt19937_64 rng(25);
  OptimizerConfig cfg = default_w_config();
  cfg.restarts = 8;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    CMatrix mix = CMatrix::Zero(8, 8);
    double total = 0.0;
    const int terms = 1 + trial % 4;
    for (int k = 0; k < terms; ++k) {
      const double w = u(rng);
      mix += w * random_bipartite_product(k % 3, rng);
      total += w;
    }
    mix /= total;
    CHECK(gme_W(DensityMatrix(0.5 * (mix + mix.adjoint())), cfg).value == 0.0);
  }
}

TEST_CASE("separable ball examples") {
  CHECK(separable_ball(DensityMatrix::maximally_mixed(2)).radius == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(separable_ball(DensityMatrix::maximally_mixed(3)).radius ==
        doctest::Approx(std::pow(2.0, -0.5) / 8.0).epsilon(1e-14));
  CHECK_THROWS_AS(separable_ball(pure(CVector::Unit(4, 0))), DomainError);

  const SeparableBall ball = separable_ball(DensityMatrix::maximally_mixed(2));
  CHECK(in_separable_ball(ball, ball.center));
  CHECK(frobenius_distance(pure(bell()), ball.center) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK_FALSE(in_separable_ball(ball, pure(bell())));
  CHECK_THROWS_AS(in_separable_ball(ball, DensityMatrix::maximally_mixed(3)), DomainError);
}

TEST_CASE("states inside the two-qubit ball are PPT") {
  std::mt19937_64 rng(26);
  const SeparableBall ball = separable_ball(DensityMatrix::maximally_mixed(2));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int inside = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const CMatrix g = testutil::ginibre(4, rng);
    CMatrix x = g + g.adjoint();
    x -= (x.trace() / 4.0) * CMatrix::Identity(4, 4);
    x *= ball.radius * std::sqrt(u(rng)) / x.norm();
    const DensityMatrix rho(ball.center.matrix() + x);
    if (!in_separable_ball(ball, rho)) continue;
    ++inside;
    CHECK(min_pt_eigenvalue(rho) >= -1e-12);
  }
  CHECK(inside == 500);
}

TEST_CASE("temperature threshold on a synthetic curve") {
  const SeparableBall ball = separable_ball(DensityMatrix::maximally_mixed(2));
  const CMatrix b = testutil::projector(bell());
  const CMatrix id = CMatrix::Identity(4, 4) / 4.0;
  auto state_at = [&](double t) {
    const double p = 1.0 / (1.0 + t);
    return DensityMatrix(p * b + (1.0 - p) * id);
  };
  // distance p sqrt(3)/2 equals 1/4 at p = 1/(2 sqrt 3)
  const double exact = 2.0 * std::sqrt(3.0) - 1.0;
  const ThresholdResult r = temperature_threshold(state_at, ball, 0.1, 100.0);
  CHECK(r.temperature >= exact);
  CHECK(r.temperature - exact <= kThresholdPrecision);
  CHECK(r.g_at_threshold <= 0.0);
  CHECK(r.scan.size() == kThresholdScanPoints);
  CHECK(in_separable_ball(ball, state_at(r.temperature + 0.01)));
  CHECK_FALSE(in_separable_ball(ball, state_at(exact - 0.01)));

  CHECK_THROWS_AS(temperature_threshold(state_at, ball, 0.1, 1.0), RangeError);
  CHECK_THROWS_AS(temperature_threshold(state_at, ball, 5.0, 100.0), RangeError);
  CHECK_THROWS_AS(temperature_threshold(state_at, ball, 0.0, 1.0), DomainError);
  auto wobbly = [&](double t) {
    const double p = 0.5 + 0.5 * std::sin(t);
    return DensityMatrix(p * b + (1.0 - p) * id);
  };
  CHECK_THROWS_AS(temperature_threshold(wobbly, ball, 0.1, 100.0), PreconditionError);

  // ball centered at the endpoint state
  const SeparableBall end = separable_ball(state_at(1e6));
  CHECK(temperature_threshold(state_at, end, 0.1, 1e6).temperature <= 1e6);
}

TEST_CASE("zero crossing") {
  using K = ZeroCrossing::Kind;
  CHECK(zero_crossing({{0, 0}, {1, 0}, {2, 0}}).kind == K::none);
  CHECK(zero_crossing({}).kind == K::none);
  CHECK(zero_crossing({{0, 1}, {1, 1}}).kind == K::beyond_range);

  ZeroCrossing z = zero_crossing({{0, 3}, {1, 2}, {2, 1}, {3, 0}, {4, 0}});
  CHECK(z.found());
  CHECK(z.s == doctest::Approx(3.0));
  z = zero_crossing({{0, 3}, {1, 2}, {2, 1.5}, {3, 0}, {4, 0}});
  CHECK(z.s == doctest::Approx(3.0));  // clamped to the next grid point
  z = zero_crossing({{0, 4}, {1, 3}, {2, 1}, {3, 0}});
  CHECK(z.s == doctest::Approx(2.5));
  z = zero_crossing({{0, 0}, {1, 1}, {2, 0}});
  CHECK(z.s == doctest::Approx(2.0));  // single positive sample
  z = zero_crossing({{0, 1}, {1, 1e-9}, {2, 0}});
  CHECK(z.s == doctest::Approx(1.0));  // below the floor counts as zero
  z = zero_crossing({{0, 1}, {1, 0.5}, {2, 1e-9}}, 1e-12);
  CHECK(z.kind == K::beyond_range);
  CHECK_THROWS_AS(zero_crossing({{1, 1}, {0, 0}}), DomainError);
}

TEST_CASE("onset crossing") {
  using K = ZeroCrossing::Kind;
  CHECK(onset_crossing({{0, 1}, {1, 2}}).kind == K::beyond_range);
  CHECK(onset_crossing({{0, 1}, {1, 0}}).kind == K::none);

  ZeroCrossing z = onset_crossing({{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 2}});
  CHECK(z.found());
  CHECK(z.s == doctest::Approx(2.0));
  z = onset_crossing({{0, 0}, {1, 0}, {2, 1}, {3, 3}});
  CHECK(z.s == doctest::Approx(1.5));
  z = onset_crossing({{0, 0}, {1, 0}, {2, 1}, {3, 1.5}});
  CHECK(z.s == doctest::Approx(1.0));  // clamped
  z = onset_crossing({{0, 0}, {1, 1}, {2, 0}, {3, 1}});
  CHECK(z.s == doctest::Approx(2.0));  // single positive sample after the last zero
  CHECK_THROWS_AS(onset_crossing({{0, 0}, {0, 1}}), DomainError);
}
