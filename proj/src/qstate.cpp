#include "entfate/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>

#include <lapacke.h>

#include "entfate/errors.hpp"
#include "entfate/kernels.hpp"

namespace entfate {

namespace {

int log2_exact(std::size_t dim, const char* what) {
  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw DomainError(std::string(what) + ": dimension " + std::to_string(dim) +
                      " is not a power of two");
  }
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

// Positions (1-based) of `labels` within `sites`.
std::vector<int> positions_of(const std::vector<int>& sites, const SubsystemSpec& labels) {
  std::vector<int> pos;
  pos.reserve(labels.size());
  for (int label : labels.labels()) {
    auto it = std::find(sites.begin(), sites.end(), label);
    if (it == sites.end()) {
      throw DomainError("site label " + std::to_string(label) + " not present in state");
    }
    pos.push_back(static_cast<int>(it - sites.begin()) + 1);
  }
  return pos;
}

}  // namespace

BasisConvention::BasisConvention(int n) : n_sites(n) {
  if (n < 1 || n > 30) throw DomainError("BasisConvention: site count out of range");
}

std::size_t BasisConvention::index_of(std::span<const int> bits) const {
  if (static_cast<int>(bits.size()) != n_sites) {
    throw DomainError("BasisConvention::index_of: wrong configuration length");
  }
  std::size_t b = 0;
  for (int bit : bits) {
    if (bit != 0 && bit != 1) throw DomainError("BasisConvention::index_of: bits must be 0/1");
    b = (b << 1) | static_cast<std::size_t>(bit);
  }
  return b;
}

std::vector<int> BasisConvention::configuration(std::size_t index) const {
  if (index >= dim()) throw DomainError("BasisConvention::configuration: index out of range");
  std::vector<int> bits(static_cast<std::size_t>(n_sites));
  for (int s = 1; s <= n_sites; ++s) bits[static_cast<std::size_t>(s - 1)] = bit(index, s);
  return bits;
}

SubsystemSpec::SubsystemSpec(std::initializer_list<int> labels)
    : SubsystemSpec(std::vector<int>(labels)) {}

SubsystemSpec::SubsystemSpec(std::vector<int> labels) : labels_(std::move(labels)) {
  std::vector<int> sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("SubsystemSpec: duplicate site label");
  }
  if (!sorted.empty() && sorted.front() < 1) {
    throw DomainError("SubsystemSpec: site labels are 1-based");
  }
}

void SubsystemSpec::check_range(int n) const {
  for (int label : labels_) {
    if (label < 1 || label > n) {
      throw DomainError("site label " + std::to_string(label) + " outside 1.." +
                        std::to_string(n));
    }
  }
}

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  n_sites_ = log2_exact(static_cast<std::size_t>(amplitudes_.size()), "PureState");
  const double norm = amplitudes_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTol) {
    std::ostringstream msg;
    msg << "PureState: norm " << norm << " is not 1";
    throw DomainError(msg.str());
  }
}

double max_hermitian_deviation(const CMatrix& x) {
  if (x.rows() != x.cols()) return std::numeric_limits<double>::infinity();
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(CMatrix entries, std::vector<int> sites)
    : entries_(std::move(entries)), sites_(std::move(sites)) {
  if (entries_.rows() != entries_.cols()) throw DomainError("DensityMatrix: not square");
  const int m = log2_exact(static_cast<std::size_t>(entries_.rows()), "DensityMatrix");
  if (sites_.empty()) {
    sites_.resize(static_cast<std::size_t>(m));
    std::iota(sites_.begin(), sites_.end(), 1);
  }
  if (static_cast<int>(sites_.size()) != m) {
    throw DomainError("DensityMatrix: site list does not match dimension");
  }
  SubsystemSpec{sites_};  // label validity

  const double herm = max_hermitian_deviation(entries_);
  if (!(herm <= kHermitianTol)) {
    throw DomainError("DensityMatrix: not Hermitian (deviation " + std::to_string(herm) + ")");
  }
  entries_ = (0.5 * (entries_ + entries_.adjoint())).eval();
  const double tr = entries_.trace().real();
  if (!(std::abs(tr - 1.0) <= kTraceTol)) {
    throw DomainError("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
  }
  const double lmin = min_eigenvalue();
  if (!(lmin >= kPsdTol)) {
    throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
  }
}

DensityMatrix DensityMatrix::maximally_mixed(int m) {
  const auto d = Eigen::Index{1} << m;
  return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

const CMatrix& pauli(int which) {
  static const std::array<CMatrix, 4> mats = [] {
    std::array<CMatrix, 4> p;
    const Complex i{0.0, 1.0};
    p[0] = CMatrix::Identity(2, 2);
    p[1] = CMatrix::Zero(2, 2);
    p[1](0, 1) = 1.0;
    p[1](1, 0) = 1.0;
    p[2] = CMatrix::Zero(2, 2);
    p[2](0, 1) = -i;
    p[2](1, 0) = i;
    p[3] = CMatrix::Zero(2, 2);
    p[3](0, 0) = 1.0;
    p[3](1, 1) = -1.0;
    return p;
  }();
  if (which < 0 || which > 3) throw DomainError("pauli: index must be 0..3");
  return mats[static_cast<std::size_t>(which)];
}

DensityMatrix partial_trace(const PureState& psi, const SubsystemSpec& keep,
                            const BasisConvention& convention) {
  if (keep.empty()) throw DomainError("partial_trace: empty subsystem");
  if (convention.n_sites != psi.n_sites()) {
    throw DomainError("partial_trace: convention does not match state size");
  }
  keep.check_range(psi.n_sites());
  const kernels::SiteSplit split(psi.n_sites(), keep);
  return DensityMatrix(kernels::reduce_pure(psi.amplitudes().data(), split), keep.labels());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemSpec& keep) {
  if (keep.empty()) throw DomainError("partial_trace: empty subsystem");
  const std::vector<int> pos = positions_of(rho.sites(), keep);
  const kernels::SiteSplit split(rho.n_sites(), SubsystemSpec(pos));
  const auto kd = static_cast<Eigen::Index>(split.keep_dim());
  CMatrix out = CMatrix::Zero(kd, kd);
  const std::size_t dim = rho.dim();
  const CMatrix& r = rho.matrix();
  for (std::size_t b = 0; b < dim; ++b) {
    for (std::size_t c = 0; c < dim; ++c) {
      if (split.rest_index(b) != split.rest_index(c)) continue;
      out(static_cast<Eigen::Index>(split.keep_index(b)),
          static_cast<Eigen::Index>(split.keep_index(c))) +=
          r(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c));
    }
  }
  return DensityMatrix(std::move(out), keep.labels());
}

CMatrix partial_transpose(const DensityMatrix& rho, const SubsystemSpec& transposed) {
  const std::vector<int> pos = positions_of(rho.sites(), transposed);
  const int n = rho.n_sites();
  std::size_t mask = 0;
  for (int p : pos) mask |= std::size_t{1} << (n - p);
  const auto dim = static_cast<Eigen::Index>(rho.dim());
  CMatrix out(dim, dim);
  const CMatrix& r = rho.matrix();
  for (Eigen::Index b = 0; b < dim; ++b) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const auto ub = static_cast<std::size_t>(b);
      const auto uc = static_cast<std::size_t>(c);
      const std::size_t nb = (ub & ~mask) | (uc & mask);
      const std::size_t nc = (uc & ~mask) | (ub & mask);
      out(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nc)) = r(b, c);
    }
  }
  return out;
}

double frobenius_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError("frobenius_distance: dimension mismatch");
  }
  return (a - b).norm();
}

double frobenius_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return frobenius_distance(a.matrix(), b.matrix());
}

double trace_norm(const CMatrix& x) {
  if (!(max_hermitian_deviation(x) <= 1e-10)) {
    throw DomainError("trace_norm: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(x, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

HermitianEigensystem<Complex> eigh(const CMatrix& h) {
  if (!(max_hermitian_deviation(h) <= 1e-10)) throw DomainError("eigh: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigh: Eigen self-adjoint solver did not converge (dim " +
                         std::to_string(h.rows()) + ")");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

// Residual and norm of every 64th eigenpair. Catches a broken LAPACK/BLAS
// build (seen with OpenBLAS 0.3.20 kernels on AVX-512 FP16 CPUs) without
// paying for a full H V - V diag(E) product.
bool spot_check(const RMatrix& h, const HermitianEigensystem<double>& eig) {
  const double scale = std::max(1.0, h.cwiseAbs().rowwise().sum().maxCoeff());
  const Eigen::Index n = h.rows();
  const Eigen::Index stride = std::max<Eigen::Index>(1, n / 32);
  for (Eigen::Index k = 0; k < n; k += stride) {
    const auto v = eig.eigenvectors.col(k);
    if (!(std::abs(v.norm() - 1.0) <= 1e-10)) return false;
    const double r = (h * v - eig.eigenvalues(k) * v).cwiseAbs().maxCoeff();
    if (!(r <= 1e-9 * scale)) return false;
  }
  for (Eigen::Index k = 1; k < n; ++k) {
    if (!(eig.eigenvalues(k) >= eig.eigenvalues(k - 1))) return false;
  }
  return true;
}

}  // namespace

HermitianEigensystem<double> eigh_reference(const RMatrix& h) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigh: Eigen self-adjoint solver did not converge (dim " +
                         std::to_string(h.rows()) + ")");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

HermitianEigensystem<double> eigh(const RMatrix& h) {
  if (h.rows() != h.cols()) throw DomainError("eigh: matrix is not square");
  if (!(((h - h.transpose()).cwiseAbs().maxCoeff()) <= 1e-10)) {
    throw DomainError("eigh: input is not symmetric");
  }
  HermitianEigensystem<double> out;
  const auto n = static_cast<lapack_int>(h.rows());
  out.eigenvectors = h;
  out.eigenvalues.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         out.eigenvectors.data(), n, out.eigenvalues.data());
  if (info == 0 && spot_check(h, out)) return out;
  static std::once_flag warned;
  std::call_once(warned, [info] {
    std::fprintf(stderr,
                 "entfate: LAPACK dsyevd returned %s; using the Eigen solver instead "
                 "(for OpenBLAS try OPENBLAS_CORETYPE=Haswell)\n",
                 info == 0 ? "an inaccurate eigensystem" : "an error");
  });
  return eigh_reference(h);
}

CMatrix kron(std::span<const CMatrix> factors) {
  if (factors.empty()) throw DomainError("kron: empty factor list");
  CMatrix acc = factors[0];
  for (std::size_t f = 1; f < factors.size(); ++f) {
    const CMatrix& b = factors[f];
    CMatrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Eigen::Index i = 0; i < acc.rows(); ++i) {
      for (Eigen::Index j = 0; j < acc.cols(); ++j) {
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = acc(i, j) * b;
      }
    }
    acc = std::move(next);
  }
  return acc;
}

CMatrix kron(std::initializer_list<CMatrix> factors) {
  return kron(std::span<const CMatrix>(factors.begin(), factors.size()));
}

CMatrix permute_qubits(const CMatrix& x, std::span<const int> perm) {
  const int n = log2_exact(static_cast<std::size_t>(x.rows()), "permute_qubits");
  if (static_cast<int>(perm.size()) != n) throw DomainError("permute_qubits: bad permutation");
  std::vector<int> seen(perm.begin(), perm.end());
  std::sort(seen.begin(), seen.end());
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)] != i) throw DomainError("permute_qubits: bad permutation");
  }
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::size_t> src(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    std::size_t s = 0;
    for (int i = 0; i < n; ++i) {
      const std::size_t bit = (r >> (n - 1 - i)) & 1u;
      s |= bit << (n - 1 - perm[static_cast<std::size_t>(i)]);
    }
    src[r] = s;
  }
  CMatrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          x(static_cast<Eigen::Index>(src[r]), static_cast<Eigen::Index>(src[c]));
    }
  }
  return out;
}

}  // namespace entfate
