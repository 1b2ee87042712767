#include "entfate/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>

#include <omp.h>

#include "entfate/errors.hpp"

namespace entfate::kernels {

namespace {

// Fixed chunk count for reductions so the summation order (and therefore
// every bit of the result) does not depend on the thread count.
constexpr std::size_t kReductionChunks = 64;

double diagonal_field(std::size_t b, int n_sites, double h) {
  // sigma^z eigenvalue is +1 for bit 0, -1 for bit 1
  const int ones = std::popcount(b);
  return -h * static_cast<double>(n_sites - 2 * ones);
}

std::vector<std::size_t> edge_masks(int n_sites, std::span<const Edge> edges) {
  std::vector<std::size_t> masks;
  masks.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 1 || b < 1 || a > n_sites || b > n_sites || a == b) {
      throw DomainError("ising_hamiltonian: invalid edge");
    }
    masks.push_back((std::size_t{1} << (n_sites - a)) | (std::size_t{1} << (n_sites - b)));
  }
  return masks;
}

void fill_column(RMatrix& hm, std::size_t b, int n_sites, const std::vector<std::size_t>& masks,
                 double j, double h) {
  const auto col = static_cast<Eigen::Index>(b);
  hm(col, col) = diagonal_field(b, n_sites, h);
  for (std::size_t m : masks) hm(static_cast<Eigen::Index>(b ^ m), col) += j;
}

}  // namespace

SiteSplit::SiteSplit(int n_sites, const SubsystemSpec& keep) : n_sites_(n_sites) {
  keep.check_range(n_sites);
  if (keep.empty()) throw DomainError("SiteSplit: empty subsystem");
  std::vector<int> rest;
  for (int s = 1; s <= n_sites; ++s) {
    if (std::find(keep.labels().begin(), keep.labels().end(), s) == keep.labels().end()) {
      rest.push_back(s);
    }
  }
  keep_dim_ = std::size_t{1} << keep.size();
  rest_dim_ = std::size_t{1} << rest.size();
  const std::size_t dim = std::size_t{1} << n_sites;
  keep_index_.resize(dim);
  rest_index_.resize(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    std::size_t k = 0;
    for (int label : keep.labels()) k = (k << 1) | ((b >> (n_sites - label)) & 1u);
    std::size_t r = 0;
    for (int label : rest) r = (r << 1) | ((b >> (n_sites - label)) & 1u);
    keep_index_[b] = k;
    rest_index_[b] = r;
  }
}

namespace serial {

RMatrix ising_hamiltonian(int n_sites, std::span<const Edge> edges, double j, double h) {
  const auto masks = edge_masks(n_sites, edges);
  const std::size_t dim = std::size_t{1} << n_sites;
  RMatrix hm = RMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) fill_column(hm, b, n_sites, masks, j, h);
  return hm;
}

std::vector<RMatrix> eigenstate_rdms(const RMatrix& eigenvectors, const SiteSplit& split) {
  std::vector<RMatrix> out(static_cast<std::size_t>(eigenvectors.cols()));
  for (Eigen::Index n = 0; n < eigenvectors.cols(); ++n) {
    out[static_cast<std::size_t>(n)] = reduce_pure(eigenvectors.col(n).data(), split);
  }
  return out;
}

RMatrix weighted_sum(std::span<const RMatrix> terms, std::span<const double> weights) {
  if (terms.size() != weights.size() || terms.empty()) {
    throw DomainError("weighted_sum: size mismatch");
  }
  const std::size_t count = terms.size();
  const std::size_t chunk = (count + kReductionChunks - 1) / kReductionChunks;
  RMatrix total = RMatrix::Zero(terms[0].rows(), terms[0].cols());
  for (std::size_t c = 0; c * chunk < count; ++c) {
    RMatrix part = RMatrix::Zero(terms[0].rows(), terms[0].cols());
    for (std::size_t n = c * chunk; n < std::min(count, (c + 1) * chunk); ++n) {
      part += weights[n] * terms[n];
    }
    total += part;
  }
  return total;
}

CVector evolve(const RMatrix& eigenvectors, const RVector& energies, const CVector& overlaps,
               double t) {
  const Eigen::Index dim = energies.size();
  RVector re(dim), im(dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    const Complex z = std::exp(Complex{0.0, -energies(n) * t}) * overlaps(n);
    re(n) = z.real();
    im(n) = z.imag();
  }
  CVector out(eigenvectors.rows());
  out.real() = eigenvectors * re;
  out.imag() = eigenvectors * im;
  return out;
}

}  // namespace serial

namespace parallel {

RMatrix ising_hamiltonian(int n_sites, std::span<const Edge> edges, double j, double h) {
  const auto masks = edge_masks(n_sites, edges);
  const auto dim = static_cast<std::int64_t>(std::size_t{1} << n_sites);
  RMatrix hm = RMatrix::Zero(dim, dim);
  // each column is written by exactly one iteration
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < dim; ++b) {
    fill_column(hm, static_cast<std::size_t>(b), n_sites, masks, j, h);
  }
  return hm;
}

std::vector<RMatrix> eigenstate_rdms(const RMatrix& eigenvectors, const SiteSplit& split) {
  const std::int64_t count = eigenvectors.cols();
  std::vector<RMatrix> out(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t n = 0; n < count; ++n) {
    out[static_cast<std::size_t>(n)] = reduce_pure(eigenvectors.col(n).data(), split);
  }
  return out;
}

RMatrix weighted_sum(std::span<const RMatrix> terms, std::span<const double> weights) {
  if (terms.size() != weights.size() || terms.empty()) {
    throw DomainError("weighted_sum: size mismatch");
  }
  const std::size_t count = terms.size();
  const std::size_t chunk = (count + kReductionChunks - 1) / kReductionChunks;
  const auto nchunks = static_cast<std::int64_t>((count + chunk - 1) / chunk);
  std::vector<RMatrix> parts(static_cast<std::size_t>(nchunks));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    RMatrix part = RMatrix::Zero(terms[0].rows(), terms[0].cols());
    const auto lo = static_cast<std::size_t>(c) * chunk;
    for (std::size_t n = lo; n < std::min(count, lo + chunk); ++n) {
      part += weights[n] * terms[n];
    }
    parts[static_cast<std::size_t>(c)] = std::move(part);
  }
  RMatrix total = RMatrix::Zero(terms[0].rows(), terms[0].cols());
  for (const RMatrix& p : parts) total += p;
  return total;
}

CVector evolve(const RMatrix& eigenvectors, const RVector& energies, const CVector& overlaps,
               double t) {
  const Eigen::Index dim = energies.size();
  RVector re(dim), im(dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    const Complex z = std::exp(Complex{0.0, -energies(n) * t}) * overlaps(n);
    re(n) = z.real();
    im(n) = z.imag();
  }
  const Eigen::Index rows = eigenvectors.rows();
  constexpr Eigen::Index kBlock = 256;
  const std::int64_t nblocks = (rows + kBlock - 1) / kBlock;
  CVector out(rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t blk = 0; blk < nblocks; ++blk) {
    const Eigen::Index lo = blk * kBlock;
    const Eigen::Index len = std::min(kBlock, rows - lo);
    const auto block = eigenvectors.middleRows(lo, len);
    out.segment(lo, len).real() = block * re;
    out.segment(lo, len).imag() = block * im;
  }
  return out;
}

}  // namespace parallel

}  // namespace entfate::kernels
