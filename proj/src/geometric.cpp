#include "entfate/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "entfate/errors.hpp"

namespace entfate {

namespace {

constexpr int kMaxParties = 4;
constexpr int kMaxPauli = 256;  // 4^kMaxParties
constexpr double kSaturatedU = 20.0;  // tanh(20) == 1.0 in double precision

// Squared Frobenius distance in the Pauli basis:
//   d^2 = 2^-m sum_P (a_P - s_P)^2.
class SquaredDistance {
 public:
  SquaredDistance(std::vector<double> target, int parties, int terms)
      : target_(std::move(target)), parties_(parties), terms_(terms) {}

  double operator()(const RVector& x) const {
    std::array<double, kMaxPauli> s{};
    std::array<double, kMaxPauli> tmp{};
    std::array<double, kMaxPauli> next{};
    const int npauli = static_cast<int>(target_.size());

    double theta_max = x(0);
    for (int k = 1; k < terms_; ++k) theta_max = std::max(theta_max, x(k));
    double wsum = 0.0;
    for (int k = 0; k < terms_; ++k) wsum += std::exp(x(k) - theta_max);

    for (int k = 0; k < terms_; ++k) {
      const double w = std::exp(x(k) - theta_max) / wsum;
      int size = 1;
      tmp[0] = w;
      for (int j = 0; j < parties_; ++j) {
        const Eigen::Index base = terms_ + 3 * (k * parties_ + j);
        const auto r = bloch_from_unconstrained(x(base), x(base + 1), x(base + 2));
        const double c[4] = {1.0, r[0], r[1], r[2]};
        for (int i = 0; i < size; ++i)
          for (int p = 0; p < 4; ++p) next[static_cast<std::size_t>(4 * i + p)] = tmp[static_cast<std::size_t>(i)] * c[p];
        size *= 4;
        std::copy_n(next.begin(), size, tmp.begin());
      }
      for (int p = 0; p < npauli; ++p) s[static_cast<std::size_t>(p)] += tmp[static_cast<std::size_t>(p)];
    }
    double acc = 0.0;
    for (int p = 0; p < npauli; ++p) {
      const double d = target_[static_cast<std::size_t>(p)] - s[static_cast<std::size_t>(p)];
      acc += d * d;
    }
    return acc / static_cast<double>(1 << parties_);
  }

 private:
  std::vector<double> target_;
  int parties_;
  int terms_;
};

std::array<double, 3> unconstrained_from_bloch(const std::array<double, 3>& r) {
  const double len = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (len == 0.0) return {0.0, 0.0, 0.0};
  const double target = len >= 1.0 ? kSaturatedU : std::min(kSaturatedU, std::atanh(len));
  const double scale = target / len;
  return {r[0] * scale, r[1] * scale, r[2] * scale};
}

}  // namespace

std::array<double, 3> bloch_from_unconstrained(double ux, double uy, double uz) {
  const double len = std::sqrt(ux * ux + uy * uy + uz * uz);
  if (len < 1e-8) {
    // tanh(l)/l = 1 - l^2/3 + O(l^4)
    const double f = 1.0 - len * len / 3.0;
    return {ux * f, uy * f, uz * f};
  }
  const double f = std::tanh(len) / len;
  return {ux * f, uy * f, uz * f};
}

ProductMixtureAnsatz::ProductMixtureAnsatz(int parties, int terms)
    : ProductMixtureAnsatz(parties, terms, RVector::Zero(parameter_count(parties, terms))) {}

ProductMixtureAnsatz::ProductMixtureAnsatz(int parties, int terms, RVector parameters)
    : parties_(parties), terms_(terms), params_(std::move(parameters)) {
  if (parties < 1 || parties > kMaxParties) throw DomainError("ProductMixtureAnsatz: bad party count");
  if (terms < 1) throw DomainError("ProductMixtureAnsatz: need at least one term");
  if (params_.size() != parameter_count(parties, terms)) {
    throw DomainError("ProductMixtureAnsatz: wrong parameter count");
  }
  if (!params_.allFinite()) throw NumericalError("ProductMixtureAnsatz: non-finite parameter");
}

std::vector<double> ProductMixtureAnsatz::weights() const {
  const double theta_max = params_.head(terms_).maxCoeff();
  std::vector<double> w(static_cast<std::size_t>(terms_));
  double sum = 0.0;
  for (int k = 0; k < terms_; ++k) {
    w[static_cast<std::size_t>(k)] = std::exp(params_(k) - theta_max);
    sum += w[static_cast<std::size_t>(k)];
  }
  for (double& x : w) x /= sum;
  return w;
}

std::array<double, 3> ProductMixtureAnsatz::bloch(int term, int party) const {
  const Eigen::Index base = terms_ + 3 * (term * parties_ + party);
  return bloch_from_unconstrained(params_(base), params_(base + 1), params_(base + 2));
}

CMatrix ProductMixtureAnsatz::density_matrix() const {
  const auto w = weights();
  const auto dim = Eigen::Index{1} << parties_;
  CMatrix rho = CMatrix::Zero(dim, dim);
  std::vector<CMatrix> factors(static_cast<std::size_t>(parties_));
  for (int k = 0; k < terms_; ++k) {
    for (int j = 0; j < parties_; ++j) {
      const auto r = bloch(k, j);
      factors[static_cast<std::size_t>(j)] =
          0.5 * (pauli(0) + r[0] * pauli(1) + r[1] * pauli(2) + r[2] * pauli(3));
    }
    rho += w[static_cast<std::size_t>(k)] * kron(factors);
  }
  return rho;
}

std::vector<double> pauli_coefficients(const CMatrix& rho) {
  int m = 0;
  while ((Eigen::Index{1} << m) < rho.rows()) ++m;
  if ((Eigen::Index{1} << m) != rho.rows() || m > kMaxParties) {
    throw DomainError("pauli_coefficients: unsupported dimension");
  }
  const int count = 1 << (2 * m);
  std::vector<double> a(static_cast<std::size_t>(count));
  std::vector<CMatrix> factors(static_cast<std::size_t>(m));
  for (int p = 0; p < count; ++p) {
    for (int j = 0; j < m; ++j) {
      factors[static_cast<std::size_t>(j)] = pauli((p >> (2 * (m - 1 - j))) & 3);
    }
    a[static_cast<std::size_t>(p)] = (rho * kron(factors)).trace().real();
  }
  return a;
}

OptimizerConfig default_geometric_config() {
  OptimizerConfig c;
  c.restarts = 20;
  c.max_iterations = 10000;
  c.tolerance = 1e-12;
  return c;
}

GeometricResult geometric_entanglement(const DensityMatrix& rho, const OptimizerConfig& config,
                                       int max_terms) {
  config.validate();
  const int m = rho.n_sites();
  if (m < 2 || m > 3) throw DomainError("geometric_entanglement: expected 2 or 3 qubits");
  if (max_terms < 1 || max_terms > kMaxProductTerms) {
    throw DomainError("geometric_entanglement: max_terms must be 1..7");
  }
  const std::vector<double> target = pauli_coefficients(rho.matrix());

  // single-site Bloch vectors of the marginals seed the first start
  std::vector<std::array<double, 3>> marginal_u(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    std::array<double, 3> r{};
    for (int c = 0; c < 3; ++c) {
      const int p = (c + 1) << (2 * (m - 1 - j));
      r[static_cast<std::size_t>(c)] = target[static_cast<std::size_t>(p)];
    }
    marginal_u[static_cast<std::size_t>(j)] = unconstrained_from_bloch(r);
  }

  const int restarts = config.restarts;
  const int total = max_terms * restarts;
  std::vector<MinimizeResult> runs(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic)
  for (int run = 0; run < total; ++run) {
    const int terms = run / restarts + 1;
    const int start = run % restarts;
    auto rng = restart_rng(config.seed, 0xD0 + static_cast<std::uint64_t>(terms),
                           static_cast<std::uint64_t>(start));
    std::normal_distribution<double> normal(0.0, 1.0);
    RVector x0(ProductMixtureAnsatz::parameter_count(m, terms));
    for (int k = 0; k < terms; ++k) x0(k) = start == 0 ? 0.0 : 0.5 * normal(rng);
    for (int k = 0; k < terms; ++k) {
      for (int j = 0; j < m; ++j) {
        const Eigen::Index base = terms + 3 * (k * m + j);
        for (int c = 0; c < 3; ++c) {
          const double mu = marginal_u[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
          double v;
          if (start == 0 && k == 0) {
            v = mu;
          } else if (start % 2 == 1) {
            v = std::clamp(mu, -3.0, 3.0) + normal(rng);
          } else {
            v = normal(rng);
          }
          x0(base + c) = v;
        }
      }
    }
    const SquaredDistance objective(target, m, terms);
    runs[static_cast<std::size_t>(run)] =
        bfgs_minimize(std::cref(objective), std::move(x0), config.max_iterations, config.tolerance);
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].value < runs[best].value) best = r;
  }
  const int best_terms = static_cast<int>(best) / restarts + 1;
  GeometricResult out;
  out.certificate = ProductMixtureAnsatz(m, best_terms, runs[best].x);
  out.value = std::max(0.0, frobenius_distance(rho.matrix(), out.certificate.density_matrix()));
  return out;
}

}  // namespace entfate
