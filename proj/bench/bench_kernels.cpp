// Serial reference loops against their OpenMP counterparts on the
// icosahedron-sized problems the drivers actually run.

#include <random>

#include <benchmark/benchmark.h>

#include "entfate/icosahedron.hpp"
#include "entfate/kernels.hpp"

using namespace entfate;
namespace ks = entfate::kernels;

namespace {

const SiteGraph& graph() {
  static const SiteGraph g = build_icosahedron();
  return g;
}

// Random orthogonal-ish columns are enough: the kernels never assume an
// actual eigenbasis.
const RMatrix& basis() {
  static const RMatrix v = [] {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    RMatrix m(4096, 4096);
    for (auto& x : m.reshaped()) x = g(rng);
    m.colwise().normalize();
    return m;
  }();
  return v;
}

template <RMatrix (*Build)(int, std::span<const ks::Edge>, double, double)>
void hamiltonian(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Build(12, graph().edges(), 1.0, 3.0));
}

template <std::vector<RMatrix> (*Rdms)(const RMatrix&, const ks::SiteSplit&)>
void face_rdms(benchmark::State& state) {
  const ks::SiteSplit split(12, SubsystemSpec{1, 2, 3});
  const RMatrix& v = basis();
  for (auto _ : state) benchmark::DoNotOptimize(Rdms(v, split));
}

template <RMatrix (*Sum)(std::span<const RMatrix>, std::span<const double>)>
void thermal_mix(benchmark::State& state) {
  const auto rdms = ks::serial::eigenstate_rdms(basis(), ks::SiteSplit(12, SubsystemSpec{1, 2, 3}));
  std::vector<double> w(rdms.size(), 1.0 / static_cast<double>(rdms.size()));
  for (auto _ : state) benchmark::DoNotOptimize(Sum(rdms, w));
}

template <CVector (*Evolve)(const RMatrix&, const RVector&, const CVector&, double)>
void evolve(benchmark::State& state) {
  const RMatrix& v = basis();
  const RVector e = RVector::LinSpaced(4096, -40.0, 40.0);
  const CVector c = CVector::Constant(4096, Complex(1.0 / 64.0, 0.0));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Evolve(v, e, c, t));
    t += 0.02;
  }
}

}  // namespace

BENCHMARK(hamiltonian<ks::serial::ising_hamiltonian>)->Name("hamiltonian/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(hamiltonian<ks::parallel::ising_hamiltonian>)->Name("hamiltonian/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(face_rdms<ks::serial::eigenstate_rdms>)->Name("eigenstate_rdms/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(face_rdms<ks::parallel::eigenstate_rdms>)->Name("eigenstate_rdms/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(thermal_mix<ks::serial::weighted_sum>)->Name("weighted_sum/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(thermal_mix<ks::parallel::weighted_sum>)->Name("weighted_sum/parallel")->Unit(benchmark::kMicrosecond);
BENCHMARK(evolve<ks::serial::evolve>)->Name("evolve/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(evolve<ks::parallel::evolve>)->Name("evolve/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
