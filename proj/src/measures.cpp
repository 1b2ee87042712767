#include "entfate/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>

#include "entfate/errors.hpp"
#include "entfate/spin_model.hpp"

namespace entfate {

double log_negativity(const DensityMatrix& rho, const SubsystemSpec& transposed) {
  if (transposed.empty() || static_cast<int>(transposed.size()) >= rho.n_sites()) {
    throw DomainError("log_negativity: partition must be a nontrivial subset of the sites");
  }
  const double value = std::log(trace_norm(partial_transpose(rho, transposed)));
  return value < kLogNegativityFloor ? 0.0 : value;
}

double gme_W_raw(const CMatrix& r) {
  if (r.rows() != 8 || r.cols() != 8) throw DomainError("gme_W_raw: expected an 8x8 matrix");
  // 0-based positions of the 1-based indices in the formula
  auto pop = [&](int i) { return std::max(0.0, r(i, i).real()); };
  const double coherences = std::abs(r(1, 2)) + std::abs(r(1, 4)) + std::abs(r(2, 4));
  const double p1 = pop(0);
  const double roots = std::sqrt(p1 * pop(3)) + std::sqrt(p1 * pop(5)) + std::sqrt(p1 * pop(6));
  return coherences - roots - 0.5 * (r(1, 1).real() + r(2, 2).real() + r(4, 4).real());
}

double gme_W_raw(const DensityMatrix& rho) { return gme_W_raw(rho.matrix()); }

CMatrix LocalUnitaryTriple::unitary(int site) const {
  if (site < 0 || site > 2) throw DomainError("LocalUnitaryTriple: site must be 0..2");
  const auto& [alpha, beta, gamma] = angles[static_cast<std::size_t>(site)];
  auto rz = [](double a) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = std::exp(Complex{0.0, -0.5 * a});
    m(1, 1) = std::exp(Complex{0.0, 0.5 * a});
    return m;
  };
  CMatrix ry(2, 2);
  const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta);
  ry << c, -s, s, c;
  return rz(alpha) * ry * rz(gamma);
}

CMatrix LocalUnitaryTriple::full() const { return kron({unitary(0), unitary(1), unitary(2)}); }

namespace {

LocalUnitaryTriple triple_from(const RVector& x) {
  LocalUnitaryTriple t;
  for (int j = 0; j < 3; ++j)
    for (int a = 0; a < 3; ++a)
      t.angles[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] = x(3 * j + a);
  return t;
}

double rotated_w(const CMatrix& rho, const RVector& x) {
  const CMatrix u = triple_from(x).full();
  return gme_W_raw(CMatrix(u * rho * u.adjoint()));
}

}  // namespace

OptimizerConfig default_w_config() {
  OptimizerConfig c;
  c.restarts = 50;
  c.max_iterations = 3000;
  c.tolerance = 1e-12;
  return c;
}

GmeWResult gme_W(const DensityMatrix& rho, const OptimizerConfig& config) {
  config.validate();
  if (rho.dim() != 8) throw DomainError("gme_W: expected a three-qubit state");
  const CMatrix& r = rho.matrix();
  const Objective negated = [&](const RVector& x) { return -rotated_w(r, x); };

  const int restarts = config.restarts;
  std::vector<MinimizeResult> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < restarts; ++k) {
    RVector x0 = RVector::Zero(9);
    if (k > 0) {
      auto rng = restart_rng(config.seed, 0x57, static_cast<std::uint64_t>(k));
      std::uniform_real_distribution<double> turn(0.0, 2.0 * std::numbers::pi);
      std::uniform_real_distribution<double> tilt(0.0, std::numbers::pi);
      for (int j = 0; j < 3; ++j) {
        x0(3 * j) = turn(rng);
        x0(3 * j + 1) = tilt(rng);
        x0(3 * j + 2) = turn(rng);
      }
    }
    MinimizeResult first =
        nelder_mead_minimize(negated, x0, 0.6, config.max_iterations, config.tolerance);
    // restart the simplex around the first optimum to shake off collapse
    MinimizeResult polished =
        nelder_mead_minimize(negated, first.x, 0.05, config.max_iterations, config.tolerance);
    runs[static_cast<std::size_t>(k)] = polished.value <= first.value ? polished : first;
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].value < runs[best].value) best = k;
  }
  GmeWResult out;
  out.raw = -runs[best].value;
  out.value = out.raw > kGmeWFloor ? out.raw : 0.0;
  out.rotation = triple_from(runs[best].x);
  return out;
}

SeparableBall separable_ball(const DensityMatrix& center) {
  const double lmin = center.min_eigenvalue();
  if (!(lmin > 1e-12)) {
    throw DomainError("separable_ball: center is not full rank (lambda_min = " +
                      std::to_string(lmin) + ")");
  }
  const int m = center.n_sites();
  const double radius = std::pow(2.0, 1.0 - 0.5 * m) * lmin;
  return SeparableBall{center, m, radius};
}

bool in_separable_ball(const SeparableBall& ball, const DensityMatrix& rho) {
  if (rho.dim() != ball.center.dim()) throw DomainError("in_separable_ball: dimension mismatch");
  return frobenius_distance(rho, ball.center) <= ball.radius;
}

ThresholdResult temperature_threshold(const std::function<DensityMatrix(double)>& state_at,
                                      const SeparableBall& ball, double t_lo, double t_hi) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
    throw DomainError("temperature_threshold: need 0 < t_lo < t_hi");
  }
  auto g = [&](double t) { return frobenius_distance(state_at(t), ball.center) - ball.radius; };

  ThresholdResult res{};
  const double ratio = std::log(t_hi / t_lo) / (kThresholdScanPoints - 1);
  for (int i = 0; i < kThresholdScanPoints; ++i) {
    const double t = i == kThresholdScanPoints - 1 ? t_hi : t_lo * std::exp(ratio * i);
    res.scan.emplace_back(t, g(t));
  }
  auto describe = [&] {
    std::ostringstream os;
    os.precision(6);
    for (auto [t, v] : res.scan) os << " (" << t << ", " << v << ")";
    return os.str();
  };
  for (std::size_t i = 1; i < res.scan.size(); ++i) {
    if (res.scan[i].second > res.scan[i - 1].second + 1e-12) {
      throw PreconditionError("temperature_threshold: scan is not monotone decreasing:" +
                              describe());
    }
  }
  if (res.scan.front().second <= 0.0 || res.scan.back().second > 0.0) {
    throw RangeError("temperature_threshold: no sign change in range:" + describe());
  }

  std::size_t hi = 1;
  while (res.scan[hi].second > 0.0) ++hi;
  double a = res.scan[hi - 1].first;
  double b = res.scan[hi].first;
  double gb = res.scan[hi].second;
  while (b - a > kThresholdPrecision) {
    const double mid = 0.5 * (a + b);
    const double gm = g(mid);
    if (gm > 0.0) {
      a = mid;
    } else {
      b = mid;
      gb = gm;
    }
  }
  res.temperature = b;
  res.g_at_threshold = gb;
  return res;
}

ThresholdResult temperature_threshold(const SpectrumCache& cache, const SubsystemSpec& keep,
                                      const SeparableBall& ball, double t_lo, double t_hi) {
  const ThermalSeries series(cache, keep);
  return temperature_threshold([&](double t) { return series.at(t); }, ball, t_lo, t_hi);
}

namespace {

void check_sorted(const Curve& curve, const char* who) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].first > curve[i - 1].first)) throw DomainError(std::string(who) + ": curve not sorted");
  }
}

// Zero of the secant through samples a and b, clamped to [lo, hi]; nullopt
// when the secant is flat or slopes the wrong way.
std::optional<double> secant_zero(std::pair<double, double> a, std::pair<double, double> b,
                                  double lo, double hi) {
  const double slope = (b.second - a.second) / (b.first - a.first);
  if (!(slope != 0.0) || !std::isfinite(slope)) return std::nullopt;
  const double s = a.first - a.second / slope;
  if (!(s >= a.first && s >= b.first) && !(s <= a.first && s <= b.first)) return std::nullopt;
  return std::clamp(s, lo, hi);
}

}  // namespace

ZeroCrossing zero_crossing(const Curve& curve, double floor) {
  check_sorted(curve, "zero_crossing");
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].second > floor) last = i;
  }
  if (!last) return {ZeroCrossing::Kind::none, 0.0};
  const std::size_t i = *last;
  if (i + 1 == curve.size()) return {ZeroCrossing::Kind::beyond_range, curve[i].first};
  const double lo = curve[i].first, hi = curve[i + 1].first;
  if (i > 0 && curve[i - 1].second > floor) {
    if (auto s = secant_zero(curve[i - 1], curve[i], lo, hi)) return {ZeroCrossing::Kind::found, *s};
  }
  return {ZeroCrossing::Kind::found, hi};
}

ZeroCrossing onset_crossing(const Curve& curve, double floor) {
  check_sorted(curve, "onset_crossing");
  std::optional<std::size_t> last_zero;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].second <= floor) last_zero = i;
  }
  if (!last_zero) return {ZeroCrossing::Kind::beyond_range, curve.empty() ? 0.0 : curve.front().first};
  const std::size_t i = *last_zero;
  if (i + 1 == curve.size()) return {ZeroCrossing::Kind::none, 0.0};
  const double lo = curve[i].first, hi = curve[i + 1].first;
  if (i + 2 < curve.size() && curve[i + 2].second > floor) {
    if (auto s = secant_zero(curve[i + 1], curve[i + 2], lo, hi)) return {ZeroCrossing::Kind::found, *s};
  }
  return {ZeroCrossing::Kind::found, lo};
}

}  // namespace entfate
