#include "entfate/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "entfate/errors.hpp"

namespace entfate {

namespace {

double checked(double v) {
  if (!std::isfinite(v)) throw NumericalError("optimizer: objective is not finite");
  return v;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 1) throw DomainError("OptimizerConfig: restarts must be >= 1");
  if (max_iterations < 1) throw DomainError("OptimizerConfig: max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw DomainError("OptimizerConfig: tolerance must be > 0");
}

std::mt19937_64 restart_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

RVector central_gradient(const Objective& f, const RVector& x, double h, int* evaluations) {
  RVector g(x.size());
  RVector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double fp = checked(f(probe));
    probe(i) = x(i) - h;
    const double fm = checked(f(probe));
    probe(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  if (evaluations) *evaluations += static_cast<int>(2 * x.size());
  return g;
}

MinimizeResult bfgs_minimize(const Objective& f, RVector x0, int max_iterations,
                             double tolerance, double fd_step) {
  constexpr double kArmijo = 1e-4;
  constexpr int kStallLimit = 8;

  MinimizeResult res;
  const Eigen::Index n = x0.size();
  RVector x = std::move(x0);
  double fx = checked(f(x));
  res.evaluations = 1;
  RVector g = central_gradient(f, x, fd_step, &res.evaluations);
  RMatrix hinv = RMatrix::Identity(n, n);
  int stall = 0;

  for (int it = 0; it < max_iterations; ++it) {
    res.iterations = it + 1;
    if (g.lpNorm<Eigen::Infinity>() == 0.0) break;
    RVector p = -hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }

    double alpha = 1.0;
    RVector xn;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + alpha * p;
      fn = checked(f(xn));
      ++res.evaluations;
      if (fn <= fx + kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;

    const RVector gn = central_gradient(f, xn, fd_step, &res.evaluations);
    const RVector s = xn - x;
    const RVector y = gn - g;
    const double ys = y.dot(s);
    if (ys > 1e-12 * s.norm() * y.norm() && ys > 0.0) {
      if (it == 0) hinv *= ys / y.squaredNorm();
      const double rho = 1.0 / ys;
      const RVector hy = hinv * y;
      const double yhy = y.dot(hy);
      hinv += ((1.0 + rho * yhy) * rho) * (s * s.transpose()) -
              rho * (hy * s.transpose() + s * hy.transpose());
    }

    const double decrease = fx - fn;
    x = xn;
    g = gn;
    fx = fn;
    if (decrease <= tolerance * std::max(std::abs(fx), 1e-300)) {
      if (++stall >= kStallLimit) break;
    } else {
      stall = 0;
    }
  }
  res.x = std::move(x);
  res.value = fx;
  return res;
}

MinimizeResult nelder_mead_minimize(const Objective& f, RVector x0, double initial_step,
                                    int max_evaluations, double tolerance) {
  const Eigen::Index n = x0.size();
  std::vector<RVector> simplex;
  std::vector<double> values;
  simplex.reserve(static_cast<std::size_t>(n + 1));
  simplex.push_back(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    RVector v = x0;
    v(i) += initial_step;
    simplex.push_back(std::move(v));
  }
  MinimizeResult res;
  for (const auto& v : simplex) values.push_back(checked(f(v)));
  res.evaluations = static_cast<int>(simplex.size());

  std::vector<std::size_t> order(simplex.size());
  while (res.evaluations < max_evaluations) {
    ++res.iterations;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    if (values[worst] - values[best] <= tolerance * (std::abs(values[best]) + tolerance)) {
      double diameter = 0.0;
      for (const auto& v : simplex) diameter = std::max(diameter, (v - simplex[best]).lpNorm<Eigen::Infinity>());
      if (diameter <= 1e-9) break;
    }

    RVector centroid = RVector::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const RVector xr = centroid + (centroid - simplex[worst]);
    const double fr = checked(f(xr));
    ++res.evaluations;
    if (fr < values[best]) {
      const RVector xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = checked(f(xe));
      ++res.evaluations;
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const RVector xc = outside ? RVector(centroid + 0.5 * (xr - centroid))
                               : RVector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = checked(f(xc));
    ++res.evaluations;
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = checked(f(simplex[i]));
      ++res.evaluations;
    }
  }
  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  res.x = simplex[best];
  res.value = values[best];
  return res;
}

}  // namespace entfate
