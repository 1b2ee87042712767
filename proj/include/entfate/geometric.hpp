#pragma once

// Geometric entanglement: Frobenius distance to the nearest state in a
// K-term mixture of qubit product states, minimized by multi-start
// quasi-Newton descent. The result is an upper bound on the distance to the
// separable set.

#include <array>
#include <vector>

#include "entfate/optimize.hpp"
#include "entfate/qstate.hpp"

namespace entfate {

inline constexpr int kMaxProductTerms = 7;
inline constexpr double kEffectivelySeparable = 1e-4;

// rho_sep = sum_k w_k (x)_j (I + r_kj . sigma) / 2 with w = softmax(theta)
// and r = u tanh(|u|)/|u|, so every parameter vector is a valid state.
// Parameter layout: theta_0..theta_{K-1}, then u_kj (3 each) with k major.
class ProductMixtureAnsatz {
 public:
  ProductMixtureAnsatz(int parties, int terms);
  ProductMixtureAnsatz(int parties, int terms, RVector parameters);

  static int parameter_count(int parties, int terms) { return terms * (1 + 3 * parties); }

  int parties() const { return parties_; }
  int terms() const { return terms_; }
  const RVector& parameters() const { return params_; }

  std::vector<double> weights() const;
  std::array<double, 3> bloch(int term, int party) const;
  CMatrix density_matrix() const;

 private:
  int parties_;
  int terms_;
  RVector params_;
};

std::array<double, 3> bloch_from_unconstrained(double ux, double uy, double uz);

// Tr(rho P) for all 4^m Pauli strings, P index = sum_j p_j 4^(m-1-j).
std::vector<double> pauli_coefficients(const CMatrix& rho);

struct GeometricResult {
  double value = 0.0;
  ProductMixtureAnsatz certificate{2, 1};
};

OptimizerConfig default_geometric_config();

// Searches K = 1..max_terms with config.restarts starts each; the returned
// value is the distance between rho and the returned certificate.
GeometricResult geometric_entanglement(const DensityMatrix& rho, const OptimizerConfig& config,
                                       int max_terms = kMaxProductTerms);

}  // namespace entfate
