#include "entfate/spin_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "entfate/errors.hpp"

namespace entfate {

namespace {

bool odd_parity(std::size_t b) { return (std::popcount(b) & 1) != 0; }

bool conserves_parity(const RMatrix& h) {
  for (Eigen::Index c = 0; c < h.cols(); ++c) {
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      if (h(r, c) != 0.0 &&
          odd_parity(static_cast<std::size_t>(r) ^ static_cast<std::size_t>(c))) {
        return false;
      }
    }
  }
  return true;
}

HermitianEigensystem<double> sector_eigensystem(const RMatrix& h) {
  const auto dim = static_cast<std::size_t>(h.rows());
  std::array<std::vector<Eigen::Index>, 2> sector;
  for (std::size_t b = 0; b < dim; ++b) {
    sector[odd_parity(b) ? 1 : 0].push_back(static_cast<Eigen::Index>(b));
  }
  std::array<HermitianEigensystem<double>, 2> part;
  for (int s = 0; s < 2; ++s) {
    const auto& idx = sector[static_cast<std::size_t>(s)];
    if (idx.empty()) continue;
    part[static_cast<std::size_t>(s)] = eigh(RMatrix(h(idx, idx)));
  }

  HermitianEigensystem<double> out;
  out.eigenvalues.resize(static_cast<Eigen::Index>(dim));
  out.eigenvectors = RMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::Index next[2] = {0, 0};
  for (Eigen::Index col = 0; col < static_cast<Eigen::Index>(dim); ++col) {
    // ascending merge; ties go to the even sector
    int s;
    if (next[0] >= part[0].eigenvalues.size()) {
      s = 1;
    } else if (next[1] >= part[1].eigenvalues.size()) {
      s = 0;
    } else {
      s = part[1].eigenvalues(next[1]) < part[0].eigenvalues(next[0]) ? 1 : 0;
    }
    const auto& p = part[static_cast<std::size_t>(s)];
    const auto& idx = sector[static_cast<std::size_t>(s)];
    const Eigen::Index k = next[s]++;
    out.eigenvalues(col) = p.eigenvalues(k);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.eigenvectors(idx[i], col) = p.eigenvectors(static_cast<Eigen::Index>(i), k);
    }
  }
  return out;
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(j) || !std::isfinite(h)) throw DomainError("ModelParams: non-finite value");
  if (h < 0.0) throw DomainError("ModelParams: transverse field must be >= 0");
  if (j < 0.0) throw DomainError("ModelParams: exchange coupling must be >= 0");
}

RMatrix build_hamiltonian(const SiteGraph& graph, const ModelParams& params) {
  params.validate();
  return kernels::parallel::ising_hamiltonian(graph.vertex_count(), graph.edges(), params.j,
                                              params.h);
}

SpectrumCache::SpectrumCache(ModelParams params, HermitianEigensystem<double> eig)
    : params_(params), eig_(std::move(eig)) {
  const auto dim = static_cast<std::size_t>(eig_.eigenvalues.size());
  if (dim == 0 || (dim & (dim - 1)) != 0) throw DomainError("SpectrumCache: bad dimension");
  n_sites_ = std::countr_zero(dim);
  degeneracy_ = 0;
  for (Eigen::Index n = 0; n < eig_.eigenvalues.size(); ++n) {
    if (eig_.eigenvalues(n) - eig_.eigenvalues(0) <= kDegeneracyTol) ++degeneracy_;
  }
}

SpectrumCache diagonalize(const RMatrix& h, const ModelParams& params) {
  if (h.rows() != h.cols()) throw DomainError("diagonalize: matrix is not square");
  if (conserves_parity(h)) return SpectrumCache(params, sector_eigensystem(h));
  return SpectrumCache(params, eigh(h));
}

GroundState ground_state(const SpectrumCache& cache) {
  CVector psi = cache.eigenvectors().col(0).cast<Complex>();
  psi.normalize();
  return GroundState{PureState(std::move(psi)), cache.ground_energy(), cache.ground_degeneracy()};
}

std::vector<double> boltzmann_weights(const RVector& energies, double temperature) {
  if (!(temperature > 0.0)) throw DomainError("temperature must be > 0");
  const double e0 = energies.minCoeff();
  std::vector<double> w(static_cast<std::size_t>(energies.size()));
  double z = 0.0;
  for (Eigen::Index n = 0; n < energies.size(); ++n) {
    w[static_cast<std::size_t>(n)] = std::exp(-(energies(n) - e0) / temperature);
    z += w[static_cast<std::size_t>(n)];
  }
  for (double& x : w) x /= z;
  return w;
}

ThermalSeries::ThermalSeries(const SpectrumCache& cache, const SubsystemSpec& keep)
    : cache_(&cache), keep_(keep) {
  if (keep.empty()) throw DomainError("ThermalSeries: empty subsystem");
  const kernels::SiteSplit split(cache.n_sites(), keep);
  rdms_ = kernels::parallel::eigenstate_rdms(cache.eigenvectors(), split);
}

DensityMatrix ThermalSeries::at(double temperature) const {
  const auto w = boltzmann_weights(cache_->energies(), temperature);
  RMatrix rho = kernels::parallel::weighted_sum(rdms_, w);
  return DensityMatrix(rho.cast<Complex>(), keep_.labels());
}

DensityMatrix thermal_state_rdm(const SpectrumCache& cache, double temperature,
                                const SubsystemSpec& keep) {
  if (!(temperature > 0.0)) throw DomainError("thermal_state_rdm: temperature must be > 0");
  return ThermalSeries(cache, keep).at(temperature);
}

DensityMatrix zero_temperature_rdm(const SpectrumCache& cache, const SubsystemSpec& keep) {
  if (cache.ground_degeneracy() > 1) return thermal_state_rdm(cache, kZeroTemperature, keep);
  const GroundState gs = ground_state(cache);
  return partial_trace(gs.state, keep, BasisConvention(cache.n_sites()));
}

QuenchEvolution::QuenchEvolution(const SpectrumCache& cache, const PureState& psi0)
    : cache_(&cache), psi0_(psi0) {
  if (psi0.dim() != cache.dim()) throw DomainError("QuenchEvolution: dimension mismatch");
  const RMatrix& v = cache.eigenvectors();
  overlaps_.resize(v.cols());
  overlaps_.real() = v.transpose() * psi0.amplitudes().real();
  overlaps_.imag() = v.transpose() * psi0.amplitudes().imag();
}

PureState QuenchEvolution::at(double t) const {
  if (t == 0.0) return psi0_;
  CVector psi =
      kernels::parallel::evolve(cache_->eigenvectors(), cache_->energies(), overlaps_, t);
  // renormalize away roundoff accumulated over 4096-term sums
  psi /= psi.norm();
  return PureState(std::move(psi));
}

PureState quench_state(const SpectrumCache& cache, const PureState& psi0, double t) {
  if (t == 0.0) return psi0;
  return QuenchEvolution(cache, psi0).at(t);
}

PureState product_basis_state(std::string_view pattern, int n_sites) {
  if (static_cast<int>(pattern.size()) != n_sites) {
    throw DomainError("product_basis_state: pattern must have " + std::to_string(n_sites) +
                      " characters, got " + std::to_string(pattern.size()));
  }
  std::vector<int> bits;
  for (char c : pattern) {
    switch (c) {
      case '0': case 'u': case 'U': bits.push_back(0); break;
      case '1': case 'd': case 'D': bits.push_back(1); break;
      default:
        throw DomainError(std::string("product_basis_state: bad character '") + c + "'");
    }
  }
  const BasisConvention conv(n_sites);
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(conv.dim()));
  psi(static_cast<Eigen::Index>(conv.index_of(bits))) = 1.0;
  return PureState(std::move(psi));
}

namespace {

double expect(const DensityMatrix& rho, const CMatrix& op) {
  return (rho.matrix() * op).trace().real();
}

}  // namespace

SpinObservables observables(const RdmProvider& rdm, const SiteGraph& graph) {
  SpinObservables out;
  const int n = graph.vertex_count();
  std::array<std::vector<double>, 4> single;
  for (int a = 1; a <= 3; ++a) single[static_cast<std::size_t>(a)].assign(static_cast<std::size_t>(n + 1), 0.0);
  for (int v = 1; v <= n; ++v) {
    const DensityMatrix r = rdm(SubsystemSpec{v});
    for (int a = 1; a <= 3; ++a) {
      single[static_cast<std::size_t>(a)][static_cast<std::size_t>(v)] = expect(r, pauli(a));
    }
  }
  for (int v = 1; v <= n; ++v) {
    out.sx += single[1][static_cast<std::size_t>(v)] / n;
    out.sy += single[2][static_cast<std::size_t>(v)] / n;
    out.sz += single[3][static_cast<std::size_t>(v)] / n;
  }
  const auto& edges = graph.edges();
  if (edges.empty()) return out;
  std::array<double, 4> conn{};
  for (auto [i, j] : edges) {
    const DensityMatrix r = rdm(SubsystemSpec{i, j});
    for (int a = 1; a <= 3; ++a) {
      const double two = expect(r, kron({pauli(a), pauli(a)}));
      conn[static_cast<std::size_t>(a)] +=
          two - single[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                    single[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
    }
  }
  const auto m = static_cast<double>(edges.size());
  out.sxsx_conn = conn[1] / m;
  out.sysy_conn = conn[2] / m;
  out.szsz_conn = conn[3] / m;
  return out;
}

SpinObservables observables(const PureState& psi, const SiteGraph& graph) {
  const BasisConvention conv(psi.n_sites());
  return observables([&](const SubsystemSpec& keep) { return partial_trace(psi, keep, conv); },
                     graph);
}

std::vector<FrhEntry> frh_sweep(const SpectrumCache& cache, const SubsystemSpec& keep) {
  if (keep.size() < 1 || keep.size() > 3) throw DomainError("frh_sweep: keep size must be 1..3");
  const kernels::SiteSplit split(cache.n_sites(), keep);
  const auto rdms = kernels::parallel::eigenstate_rdms(cache.eigenvectors(), split);
  std::vector<FrhEntry> out(rdms.size());
  const auto count = static_cast<std::int64_t>(rdms.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t n = 0; n < count; ++n) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(rdms[static_cast<std::size_t>(n)],
                                              Eigen::EigenvaluesOnly);
    out[static_cast<std::size_t>(n)] = {cache.energies()(n), es.eigenvalues()(0)};
  }
  return out;
}

}  // namespace entfate
