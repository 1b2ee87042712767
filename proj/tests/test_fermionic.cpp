#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "entfate/errors.hpp"
#include "entfate/fermionic.hpp"
#include "test_util.hpp"

using namespace entfate;
using namespace entfate::fermi;

namespace {

// Sum over the mirrored terms of the full product (x)_j (rho_j + eps w_j).
CMatrix product_expansion(const FermionicEnsemble& e, double eps) {
  const auto dim = Eigen::Index{1} << e.modes();
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& t : e.mirrored_terms()) {
    std::vector<CMatrix> f;
    for (int j = 0; j < e.modes(); ++j) {
      const auto jj = static_cast<std::size_t>(j);
      f.push_back(t.modes[jj].matrix() + eps * t.perturbations[jj].matrix());
    }
    out += t.weight * kron(std::span<const CMatrix>(f));
  }
  return out;
}

FermionicEnsemble scaled(const FermionicEnsemble& e, double factor) {
  std::vector<EnsembleTerm> base = e.base_terms();
  for (auto& t : base) {
    for (auto& w : t.perturbations) w = {factor * w.b, factor * w.c};
  }
  return build_mirrored_ensemble(base, e.modes());
}

}  // namespace

TEST_CASE("single-mode building blocks") {
  const CMatrix r = EvenModeState{0.2}.matrix();
  CHECK(r(0, 0) == Complex(0.7));
  CHECK(r(1, 1) == Complex(0.3));
  CHECK(r(0, 1) == Complex(0.0));
  const CMatrix w = ParityBreakingPerturbation{0.3, -0.4}.matrix();
  CHECK(testutil::max_abs(w - (0.3 * pauli(1) - 0.4 * pauli(2))) == 0.0);
  CHECK(testutil::max_abs(w * pauli(3) + pauli(3) * w) == 0.0);
  CHECK(testutil::max_abs(total_parity(3) - kron({pauli(3), pauli(3), pauli(3)})) == 0.0);
}

TEST_CASE("ensemble construction checks") {
  const EnsembleTerm ok{1.0, {{0.1}, {0.2}, {-0.3}}, {{0.5, 0.0}, {0.0, 0.5}, {0.1, 0.1}}};
  CHECK_NOTHROW(build_mirrored_ensemble({ok}, 3));
  EnsembleTerm shore = ok;
  shore.modes[1].a = 0.5;
  CHECK_THROWS_AS(build_mirrored_ensemble({shore}, 3), DomainError);
  shore.perturbations[1] = {};
  CHECK_NOTHROW(build_mirrored_ensemble({shore}, 3));
  EnsembleTerm out_of_range = ok;
  out_of_range.modes[0].a = 0.6;
  CHECK_THROWS_AS(build_mirrored_ensemble({out_of_range}, 3), DomainError);
  EnsembleTerm bad_weight = ok;
  bad_weight.weight = 0.7;
  CHECK_THROWS_AS(build_mirrored_ensemble({bad_weight}, 3), DomainError);
  CHECK_THROWS_AS(build_mirrored_ensemble({ok}, 4), DomainError);
  CHECK_THROWS_AS(build_mirrored_ensemble({ok}, 5), DomainError);

  const auto e = build_mirrored_ensemble({ok}, 3);
  const auto m = e.mirrored_terms();
  REQUIRE(m.size() == 2);
  CHECK(m[0].weight == 0.5);
  CHECK(m[1].perturbations[2].b == -0.1);
  CHECK(e.positivity_limit() == doctest::Approx(std::sqrt((0.25 - 0.04) / 0.25)));  // mode 2 binds
  CHECK(e.satisfies_positivity(0.9));
  CHECK_FALSE(e.satisfies_positivity(10.0));
  CHECK_THROWS_AS(assemble_rho_eps(e, 10.0), DomainError);
}

TEST_CASE("assembled state equals the mirrored product expansion") {
  std::mt19937_64 rng(41);
  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    const int m = 3 + seed % 2;
    const FermionicEnsemble e = random_ensemble(m, rng);
    const double eps = 0.9 * std::min(1.0, e.positivity_limit());
    const CMatrix oracle = product_expansion(e, eps);
    const DensityMatrix rho = assemble_rho_eps(e, eps);
    worst = std::max(worst, testutil::max_abs(rho.matrix() - oracle));
    // total parity commutes exactly: the odd-order terms cancel
    const CMatrix p = total_parity(m);
    CHECK(testutil::max_abs(rho.matrix() * p - p * rho.matrix()) == 0.0);
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("uniform sigma-x example") {
  const FermionicEnsemble e = uniform_sigma_x_ensemble(3);
  const double eps = 0.1;
  const CMatrix i2 = CMatrix::Identity(2, 2) / 2.0;
  const CMatrix x = pauli(1);
  const CMatrix expected = CMatrix::Identity(8, 8) / 8.0 +
                           eps * eps * (kron({i2, x, x}) + kron({x, i2, x}) + kron({x, x, i2}));
  const DensityMatrix rho = assemble_rho_eps(e, eps);
  CHECK(testutil::max_abs(rho.matrix() - expected) < 1e-16);
  CHECK((eigh(rho.matrix()).eigenvalues - eigh(expected).eigenvalues).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(testutil::max_abs(assemble_rho_eps(e, 0.0).matrix() - CMatrix::Identity(8, 8) / 8.0) == 0.0);
}

TEST_CASE("perturbation breaks local parity") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + trial % 2;
    const FermionicEnsemble e = random_ensemble(m, rng);
    const double eps = 0.5 * std::min(1.0, e.positivity_limit());
    const CMatrix rho = assemble_rho_eps(e, eps).matrix();
    CHECK(testutil::max_abs(rho - local_parity_twirl(rho, m)) > 0.0);
    const CMatrix r0 = assemble_rho_eps(e, 0.0).matrix();
    CHECK(testutil::max_abs(r0 - local_parity_twirl(r0, m)) < 1e-16);
  }
}

TEST_CASE("analytic threshold for three modes") {
  const FermionicEnsemble e = uniform_sigma_x_ensemble(3);
  const EpsilonStar s = epsilon_star(e);
  CHECK(s.binding == EpsilonStar::Binding::block_positivity);
  CHECK(std::abs(s.value - 1.0 / (2.0 * std::sqrt(3.0))) <= 1e-6);

  // two-mode block I/4 + 3 eps^2 X X has eigenvalues 1/4 +- 3 eps^2
  const double eps = 0.2;
  const auto d = biseparable_decomposition_m3(e, eps);
  REQUIRE(d.components.size() == 3);
  for (const auto& c : d.components) {
    CHECK(c.weight == doctest::Approx(1.0 / 3.0));
    const CMatrix& pair = c.left.rows() == 4 ? c.left : c.right;
    const RVector ev = eigh(pair).eigenvalues;
    CHECK(ev(0) == doctest::Approx(0.25 - 3 * eps * eps));
    CHECK(ev(3) == doctest::Approx(0.25 + 3 * eps * eps));
  }
  std::vector<std::string> labels;
  for (const auto& c : d.components) labels.push_back(c.label());
  CHECK(labels == std::vector<std::string>{"1|23", "2|13", "3|12"});

  CHECK(verify_decomposition(biseparable_decomposition_m3(e, 0.5 * s.value), assemble_rho_eps(e, 0.5 * s.value).matrix()).pass());
  CHECK(verify_decomposition(biseparable_decomposition_m3(e, s.value), assemble_rho_eps(e, s.value).matrix()).pass());
  const auto beyond = biseparable_decomposition_m3(e, 1.5 * s.value);
  CHECK_FALSE(beyond.valid);
  const auto report = verify_decomposition(beyond, assemble_rho_eps(e, 1.5 * s.value).matrix());
  CHECK_FALSE(report.psd_ok);
  CHECK(report.reconstruction_ok);
}

TEST_CASE("analytic threshold for four modes") {
  const FermionicEnsemble e = uniform_sigma_x_ensemble(4);
  const EpsilonStar s = epsilon_star(e);
  // blocks I/4 +- sqrt7 eps^2 X X are PSD iff eps^2 <= 1/(4 sqrt 7); the
  // permutation blocks I/4 + 7 eps^2 X X bind first at eps^2 = 1/28
  CHECK(std::abs(s.value - 1.0 / std::sqrt(28.0)) <= 1e-6);
  CHECK(1.0 / 28.0 < 1.0 / (4.0 * std::sqrt(7.0)));
  const auto d = biseparable_decomposition_m4(e, 0.5 * s.value);
  CHECK(d.components.size() == 8);
  CHECK(d.components.front().label() == "12|34");
  CHECK(verify_decomposition(d, assemble_rho_eps(e, 0.5 * s.value).matrix()).pass());
  CHECK_FALSE(verify_decomposition(biseparable_decomposition_m4(e, 1.5 * s.value),
                                   assemble_rho_eps(e, 1.5 * s.value).matrix()).psd_ok);
}

TEST_CASE("unperturbed ensembles decompose into products") {
  std::vector<EnsembleTerm> base{{0.4, {{0.1}, {-0.2}, {0.3}}, {{}, {}, {}}},
                                 {0.6, {{0.45}, {0.0}, {-0.1}}, {{}, {}, {}}}};
  const auto e = build_mirrored_ensemble(base, 3);
  CHECK_FALSE(e.has_perturbation());
  CHECK(epsilon_star(e).unbounded());
  const auto d = biseparable_decomposition_m3(e, 0.0);
  const auto r = verify_decomposition(d, assemble_rho_eps(e, 0.0).matrix());
  CHECK(r.pass());
  CHECK(r.reconstruction_error <= 1e-15);
}

TEST_CASE("fuzzed decompositions verify below the threshold") {
  std::mt19937_64 rng(43);
  for (int m : {3, 4}) {
    for (int seed = 0; seed < 100; ++seed) {
      const FermionicEnsemble e = random_ensemble(m, rng);
      const EpsilonStar s = epsilon_star(e);
      REQUIRE(s.value > 0.0);
      for (double eps : {0.5 * s.value, s.value}) {
        const auto report = verify_decomposition(biseparable_decomposition(e, eps), assemble_rho_eps(e, eps).matrix());
        CHECK(report.pass());
        CHECK(report.max_parity_commutator <= kParityCommutatorTol);
      }
    }
  }
}

TEST_CASE("threshold shrinks when perturbations grow") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const FermionicEnsemble e = random_ensemble(3 + trial % 2, rng);
    const double base = epsilon_star(e).value;
    const double bigger = epsilon_star(scaled(e, 1.7)).value;
    CHECK(bigger <= base + kEpsilonStarPrecision);
  }
}
