#pragma once

// Data-parallel inner loops. Every kernel exists twice: an OpenMP version in
// `parallel` and a straightforward loop in `serial`. The serial versions are
// the reference the tests compare against; library code calls `parallel`.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "entfate/qstate.hpp"

namespace entfate::kernels {

// Maps a full basis index to (kept-subsystem index, environment index).
// Kept bits are packed in `keep` order (first label = MSB); environment bits
// keep their ascending site order.
class SiteSplit {
 public:
  SiteSplit(int n_sites, const SubsystemSpec& keep);

  int n_sites() const { return n_sites_; }
  std::size_t keep_dim() const { return keep_dim_; }
  std::size_t rest_dim() const { return rest_dim_; }
  std::size_t keep_index(std::size_t b) const { return keep_index_[b]; }
  std::size_t rest_index(std::size_t b) const { return rest_index_[b]; }

 private:
  int n_sites_;
  std::size_t keep_dim_;
  std::size_t rest_dim_;
  std::vector<std::size_t> keep_index_;
  std::vector<std::size_t> rest_index_;
};

// Rank-1 partial trace: Tr_rest |psi><psi|.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> reduce_pure(
    const Scalar* psi, const SiteSplit& split) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m = Mat::Zero(static_cast<Eigen::Index>(split.keep_dim()),
                    static_cast<Eigen::Index>(split.rest_dim()));
  const std::size_t dim = std::size_t{1} << split.n_sites();
  for (std::size_t b = 0; b < dim; ++b) {
    m(static_cast<Eigen::Index>(split.keep_index(b)),
      static_cast<Eigen::Index>(split.rest_index(b))) = psi[b];
  }
  return m * m.adjoint();
}

// H = J sum_edges X_i X_j - h sum_i Z_i in the computational basis.
using Edge = std::pair<int, int>;  // 1-based site labels

namespace serial {
RMatrix ising_hamiltonian(int n_sites, std::span<const Edge> edges, double j, double h);
std::vector<RMatrix> eigenstate_rdms(const RMatrix& eigenvectors, const SiteSplit& split);
RMatrix weighted_sum(std::span<const RMatrix> terms, std::span<const double> weights);
CVector evolve(const RMatrix& eigenvectors, const RVector& energies,
               const CVector& overlaps, double t);
}  // namespace serial

namespace parallel {
RMatrix ising_hamiltonian(int n_sites, std::span<const Edge> edges, double j, double h);
std::vector<RMatrix> eigenstate_rdms(const RMatrix& eigenvectors, const SiteSplit& split);
RMatrix weighted_sum(std::span<const RMatrix> terms, std::span<const double> weights);
CVector evolve(const RMatrix& eigenvectors, const RVector& energies,
               const CVector& overlaps, double t);
}  // namespace parallel

}  // namespace entfate::kernels
