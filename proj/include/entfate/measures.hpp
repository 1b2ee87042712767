#pragma once

// Entanglement detectors and separability certificates.

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "entfate/optimize.hpp"
#include "entfate/qstate.hpp"

namespace entfate {

class SpectrumCache;

inline constexpr double kLogNegativityFloor = 1e-12;

// ln ||rho^{T_A}||_1 with A = `transposed`; values below kLogNegativityFloor
// are returned as exactly 0. Natural logarithm.
double log_negativity(const DensityMatrix& rho, const SubsystemSpec& transposed);

// The three-qubit functional
//   |r23| + |r25| + |r35| - sqrt(r11 r44) - sqrt(r11 r66) - sqrt(r11 r77)
//   - (r22 + r33 + r55) / 2
// with 1-based indices 1..8 = |000>..|111> (site 1 most significant).
// Positive values certify genuine three-party entanglement.
double gme_W_raw(const CMatrix& rho);
double gme_W_raw(const DensityMatrix& rho);

// Per-site ZYZ Euler angles; U_j = Rz(alpha) Ry(beta) Rz(gamma).
struct LocalUnitaryTriple {
  std::array<std::array<double, 3>, 3> angles{};

  CMatrix unitary(int site) const;  // site 0..2
  CMatrix full() const;             // U_1 (x) U_2 (x) U_3
};

// Raw values at or below this are reported as 0. A square root of two
// populations, one of them near zero, is only resolved to about
// sqrt(DBL_EPSILON); the functional has three such terms.
inline constexpr double kGmeWFloor = 4.5e-8;

struct GmeWResult {
  double value = 0.0;  // best raw value, or 0 when <= kGmeWFloor
  double raw = 0.0;    // best raw value found, may be negative
  LocalUnitaryTriple rotation;
};

// Maximizes gme_W_raw over local unitaries with Nelder-Mead from
// `config.restarts` starts (start 0 is the identity) and clips at kGmeWFloor.
GmeWResult gme_W(const DensityMatrix& rho, const OptimizerConfig& config);
OptimizerConfig default_w_config();

struct SeparableBall {
  DensityMatrix center;
  int parties;
  double radius;
};

// Radius 2^(1 - m/2) lambda_min(center) of the Frobenius ball of separable
// states around a full-rank product center. The center must be assembled
// as a product by the caller; product-ness is not verified here.
SeparableBall separable_ball(const DensityMatrix& center);

bool in_separable_ball(const SeparableBall& ball, const DensityMatrix& rho);

struct ThresholdResult {
  double temperature;  // certified side of the final bracket
  double g_at_threshold;
  std::vector<std::pair<double, double>> scan;  // (T, distance - radius)
};

inline constexpr int kThresholdScanPoints = 16;
inline constexpr double kThresholdPrecision = 1e-3;

// Smallest T in [t_lo, t_hi] beyond which state_at(T) stays inside `ball`,
// found by bisection on g(T) = d(state_at(T), center) - R after a
// log-spaced monotonicity scan.
ThresholdResult temperature_threshold(const std::function<DensityMatrix(double)>& state_at,
                                      const SeparableBall& ball, double t_lo, double t_hi);
ThresholdResult temperature_threshold(const SpectrumCache& cache, const SubsystemSpec& keep,
                                      const SeparableBall& ball, double t_lo, double t_hi);

struct ZeroCrossing {
  enum class Kind { found, none, beyond_range };
  Kind kind = Kind::none;
  double s = 0.0;

  bool found() const { return kind == Kind::found; }
};

using Curve = std::vector<std::pair<double, double>>;

inline constexpr double kCrossingFloor = 1e-8;

// Death point of a quantity clipped at zero. The last sample above `floor`
// and the one before it are extended linearly to zero, clamped to the grid
// interval that follows; without two positive samples the next grid point
// is returned. `beyond_range` if the quantity is still positive at the end.
// `curve` must be sorted by s.
ZeroCrossing zero_crossing(const Curve& curve, double floor = kCrossingFloor);

// Mirror image for quantities that switch on: the first two positive samples
// after the last vanishing one are extended back to zero. `none` if the
// quantity is not positive at the end, `beyond_range` if it never vanishes.
ZeroCrossing onset_crossing(const Curve& curve, double floor = kCrossingFloor);

}  // namespace entfate
