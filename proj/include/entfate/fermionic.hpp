#pragma once

// Fermionic separable ensembles perturbed by local-parity-breaking terms, and
// explicit fermionic-biseparable decompositions of the perturbed state for
// three and four modes.
//
// Each mode is a qubit in the occupation basis (|0>, |1>); local parity is
// diag(1, -1) = sigma^z.

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "entfate/qstate.hpp"

namespace entfate::fermi {

// 1/2 I + a sigma^z, |a| <= 1/2.
struct EvenModeState {
  double a = 0.0;
  CMatrix matrix() const;
};

// b sigma^x + c sigma^y.
struct ParityBreakingPerturbation {
  double b = 0.0;
  double c = 0.0;
  CMatrix matrix() const;
  bool is_zero() const { return b == 0.0 && c == 0.0; }
  ParityBreakingPerturbation operator-() const { return {-b, -c}; }
};

struct EnsembleTerm {
  double weight = 0.0;
  std::vector<EvenModeState> modes;
  std::vector<ParityBreakingPerturbation> perturbations;
};

// Base terms plus their mirror images: every base term (p, {a}, {w}) stands
// for the pair (p/2, {a}, {w}) and (p/2, {a}, {-w}), so all contributions
// odd in the perturbation cancel identically.
class FermionicEnsemble {
 public:
  int modes() const { return modes_; }
  const std::vector<EnsembleTerm>& base_terms() const { return base_; }
  std::vector<EnsembleTerm> mirrored_terms() const;
  bool has_perturbation() const;

  // a_j^2 + eps^2 (b_j^2 + c_j^2) <= 1/4 for every term and mode.
  bool satisfies_positivity(double eps) const;
  // Largest eps allowed by the condition above (+inf without perturbations).
  double positivity_limit() const;

 private:
  friend FermionicEnsemble build_mirrored_ensemble(std::vector<EnsembleTerm>, int);
  int modes_ = 0;
  std::vector<EnsembleTerm> base_;
};

// Throws DomainError for bad weights or ranges, and when a mode sits at
// a = +-1/2 with a nonzero perturbation.
FermionicEnsemble build_mirrored_ensemble(std::vector<EnsembleTerm> base, int modes);

// rho(eps) = sum_k p_k sum_{S even} eps^|S| (x)_j (j in S ? w_j : rho_j).
DensityMatrix assemble_rho_eps(const FermionicEnsemble& ensemble, double eps);

CMatrix total_parity(int modes);
// Average over conjugation by each local parity.
CMatrix local_parity_twirl(const CMatrix& x, int modes);

struct BiseparableComponent {
  double weight = 0.0;
  std::vector<int> left_modes;   // 1-based
  std::vector<int> right_modes;
  CMatrix left;
  CMatrix right;

  std::string label() const;   // e.g. "1|23"
  CMatrix assembled() const;   // left (x) right, reordered to modes 1..m
};

struct BiseparableDecomposition {
  int modes = 0;
  std::vector<BiseparableComponent> components;
  bool valid = false;  // every block PSD within kDecompositionPsdTol
};

inline constexpr double kDecompositionPsdTol = -1e-12;
inline constexpr double kParityCommutatorTol = 1e-13;
inline constexpr double kReconstructionTol = 1e-12;

BiseparableDecomposition biseparable_decomposition_m3(const FermionicEnsemble& ensemble, double eps);
BiseparableDecomposition biseparable_decomposition_m4(const FermionicEnsemble& ensemble, double eps);
BiseparableDecomposition biseparable_decomposition(const FermionicEnsemble& ensemble, double eps);

struct VerificationReport {
  double min_eigenvalue = 0.0;
  double max_parity_commutator = 0.0;
  double reconstruction_error = 0.0;
  bool psd_ok = false;
  bool parity_ok = false;
  bool reconstruction_ok = false;
  bool pass() const { return psd_ok && parity_ok && reconstruction_ok; }
};

VerificationReport verify_decomposition(const BiseparableDecomposition& decomp,
                                        const CMatrix& target);

struct EpsilonStar {
  enum class Binding { none, block_positivity, mode_positivity };
  double value = std::numeric_limits<double>::infinity();
  Binding binding = Binding::none;
  bool unbounded() const { return binding == Binding::none; }
};

inline constexpr double kEpsilonStarPrecision = 1e-8;

// Largest eps for which every decomposition block is PSD and the per-mode
// positivity condition holds, by bisection.
EpsilonStar epsilon_star(const FermionicEnsemble& ensemble);

// a uniform in [-0.45, 0.45], (b, c) uniform on the unit disk, 1..3 base
// terms with flat-Dirichlet weights.
FermionicEnsemble random_ensemble(int modes, std::mt19937_64& rng);

// Single base term, a = 0 and w = sigma^x on every mode.
FermionicEnsemble uniform_sigma_x_ensemble(int modes);

}  // namespace entfate::fermi
