#pragma once

// Transverse-field Ising antiferromagnet on a SiteGraph,
//   H = J sum_<ij> X_i X_j - h sum_i Z_i,
// solved by full exact diagonalization. Energies in units of J, k_B = hbar = 1.

#include <functional>
#include <string_view>
#include <vector>

#include "entfate/icosahedron.hpp"
#include "entfate/kernels.hpp"
#include "entfate/qstate.hpp"

namespace entfate {

struct ModelParams {
  double j = 1.0;  // the drivers always use J = 1; other values are for tests
  double h = 0.0;

  void validate() const;
};

inline constexpr double kDegeneracyTol = 1e-10;

RMatrix build_hamiltonian(const SiteGraph& graph, const ModelParams& params);

// Full eigensystem of a Hamiltonian. Immutable after construction.
class SpectrumCache {
 public:
  SpectrumCache(ModelParams params, HermitianEigensystem<double> eig);

  const ModelParams& params() const { return params_; }
  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return static_cast<std::size_t>(eig_.eigenvalues.size()); }
  const RVector& energies() const { return eig_.eigenvalues; }
  const RMatrix& eigenvectors() const { return eig_.eigenvectors; }
  double ground_energy() const { return eig_.eigenvalues(0); }
  int ground_degeneracy() const { return degeneracy_; }

 private:
  ModelParams params_;
  HermitianEigensystem<double> eig_;
  int n_sites_ = 0;
  int degeneracy_ = 1;
};

// Diagonalizes H. When H conserves the global parity prod_i Z_i (checked
// exactly on the matrix entries) the two parity sectors are solved
// separately and merged; otherwise the full matrix goes to eigh.
SpectrumCache diagonalize(const RMatrix& h, const ModelParams& params = {});

struct GroundState {
  PureState state;
  double energy;
  int degeneracy;
  // Callers must not use `state` alone when this is set; the T -> 0+ thermal
  // state is the meaningful zero-temperature limit.
  bool degenerate() const { return degeneracy > 1; }
};

GroundState ground_state(const SpectrumCache& cache);

// Boltzmann weights p_n = exp(-(E_n - E_0)/T) / Z.
std::vector<double> boltzmann_weights(const RVector& energies, double temperature);

// Per-eigenstate reduced states on `keep`, cached so that any number of
// temperatures can be mixed cheaply.
class ThermalSeries {
 public:
  ThermalSeries(const SpectrumCache& cache, const SubsystemSpec& keep);

  DensityMatrix at(double temperature) const;
  const std::vector<RMatrix>& eigenstate_rdms() const { return rdms_; }
  const SubsystemSpec& keep() const { return keep_; }

 private:
  const SpectrumCache* cache_;
  SubsystemSpec keep_;
  std::vector<RMatrix> rdms_;
};

DensityMatrix thermal_state_rdm(const SpectrumCache& cache, double temperature,
                                const SubsystemSpec& keep);

// Zero-temperature reduced state: the pure ground state when it is unique,
// otherwise the T = 1e-6 thermal state (equal weight on the ground manifold).
inline constexpr double kZeroTemperature = 1e-6;
DensityMatrix zero_temperature_rdm(const SpectrumCache& cache, const SubsystemSpec& keep);

PureState quench_state(const SpectrumCache& cache, const PureState& psi0, double t);

// Precomputes <E_n|psi0> for repeated evaluation on a time grid.
class QuenchEvolution {
 public:
  QuenchEvolution(const SpectrumCache& cache, const PureState& psi0);
  PureState at(double t) const;

 private:
  const SpectrumCache* cache_;
  PureState psi0_;
  CVector overlaps_;
};

// '0' or 'u' is spin-up, '1' or 'd' is spin-down; character i is site i+1.
PureState product_basis_state(std::string_view pattern, int n_sites = 12);

struct SpinObservables {
  double sx = 0.0, sy = 0.0, sz = 0.0;  // site averages
  double sxsx_conn = 0.0, sysy_conn = 0.0, szsz_conn = 0.0;  // bond averages
};

using RdmProvider = std::function<DensityMatrix(const SubsystemSpec&)>;

SpinObservables observables(const RdmProvider& rdm, const SiteGraph& graph);
SpinObservables observables(const PureState& psi, const SiteGraph& graph);

struct FrhEntry {
  double energy;
  double lambda_min;
};

// lambda_min of the reduced state of every eigenstate, in energy order.
std::vector<FrhEntry> frh_sweep(const SpectrumCache& cache, const SubsystemSpec& keep);

}  // namespace entfate
