#pragma once

// Dense quantum-state algebra on qubit registers.
//
// Basis convention (used everywhere in this library):
//   * sites are labelled 1..n;
//   * site 1 is the most significant bit: the basis index of a configuration
//     (bit_1, ..., bit_n) is  b = sum_i bit_i * 2^(n-i);
//   * bit 0 is spin-up, i.e. the +1 eigenvector of sigma^z.
// For three sites the matrix indices 0..7 are |000>, |001>, ..., |111>.
// The W functional in measures.hpp depends on this ordering.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace entfate {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = -1e-10;
inline constexpr double kNormTol = 1e-12;

struct BasisConvention {
  static constexpr std::string_view id = "site1-msb/bit0-up";

  int n_sites = 0;

  explicit BasisConvention(int n);

  std::size_t dim() const { return std::size_t{1} << n_sites; }

  // bit of 1-based `site` in basis index `index`
  int bit(std::size_t index, int site) const {
    return static_cast<int>((index >> (n_sites - site)) & 1u);
  }

  std::size_t index_of(std::span<const int> bits) const;
  std::vector<int> configuration(std::size_t index) const;
};

// Ordered list of distinct 1-based site labels. Order is the tensor-factor
// order of any reduced state built from it.
class SubsystemSpec {
 public:
  SubsystemSpec() = default;
  SubsystemSpec(std::initializer_list<int> labels);
  explicit SubsystemSpec(std::vector<int> labels);

  const std::vector<int>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  int operator[](std::size_t i) const { return labels_[i]; }

  // Throws DomainError unless every label lies in [1, n].
  void check_range(int n) const;

  bool operator==(const SubsystemSpec&) const = default;

 private:
  std::vector<int> labels_;
};

class PureState {
 public:
  // Amplitudes must have length 2^n and unit norm within kNormTol.
  explicit PureState(CVector amplitudes);

  const CVector& amplitudes() const { return amplitudes_; }
  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

 private:
  CVector amplitudes_;
  int n_sites_ = 0;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positivity. `sites` defaults to
  // 1..m.
  explicit DensityMatrix(CMatrix entries, std::vector<int> sites = {});

  static DensityMatrix maximally_mixed(int m);
  static DensityMatrix from_pure(const PureState& psi);

  const CMatrix& matrix() const { return entries_; }
  const std::vector<int>& sites() const { return sites_; }
  int n_sites() const { return static_cast<int>(sites_.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  double min_eigenvalue() const;

 private:
  CMatrix entries_;
  std::vector<int> sites_;
};

template <class Scalar>
struct HermitianEigensystem {
  RVector eigenvalues;  // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;  // columns
};

// Pauli matrices indexed 0..3 = I, X, Y, Z.
const CMatrix& pauli(int which);

double max_hermitian_deviation(const CMatrix& x);

// Reduced state of `psi` (sites 1..n) on `keep`, in `keep` order.
DensityMatrix partial_trace(const PureState& psi, const SubsystemSpec& keep,
                            const BasisConvention& convention);
// `keep` holds labels drawn from rho.sites().
DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemSpec& keep);

// Transpose on the tensor factors whose labels appear in `transposed`.
CMatrix partial_transpose(const DensityMatrix& rho, const SubsystemSpec& transposed);

double frobenius_distance(const CMatrix& a, const CMatrix& b);
double frobenius_distance(const DensityMatrix& a, const DensityMatrix& b);

// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const CMatrix& x);

HermitianEigensystem<Complex> eigh(const CMatrix& h);
// Real symmetric input goes to LAPACK (dsyevd). The result is spot-checked
// and recomputed with eigh_reference if it is inaccurate.
HermitianEigensystem<double> eigh(const RMatrix& h);
// Eigen's self-adjoint solver, no LAPACK involved.
HermitianEigensystem<double> eigh_reference(const RMatrix& h);

CMatrix kron(std::span<const CMatrix> factors);
CMatrix kron(std::initializer_list<CMatrix> factors);

// Reorders tensor factors: result factor i is input factor perm[i]
// (0-based, each factor a qubit).
CMatrix permute_qubits(const CMatrix& x, std::span<const int> perm);

}  // namespace entfate
