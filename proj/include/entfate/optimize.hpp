#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "entfate/qstate.hpp"

namespace entfate {

struct OptimizerConfig {
  int restarts = 20;
  int max_iterations = 2000;
  double tolerance = 1e-12;  // relative objective change
  std::uint64_t seed = 0;

  void validate() const;
};

using Objective = std::function<double(const RVector&)>;

struct MinimizeResult {
  RVector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

// Independent, reproducible stream for (seed, purpose, restart index).
std::mt19937_64 restart_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Central differences, step `h` on every coordinate.
RVector central_gradient(const Objective& f, const RVector& x, double h, int* evaluations = nullptr);

// Quasi-Newton descent (inverse-Hessian BFGS, Armijo backtracking) on
// finite-difference gradients. Stops on max_iterations, on `tolerance`
// relative stagnation, or when the line search can make no progress.
MinimizeResult bfgs_minimize(const Objective& f, RVector x0, int max_iterations, double tolerance,
                             double fd_step = 1e-6);

// Gradient-free downhill simplex (Nelder-Mead, standard coefficients).
MinimizeResult nelder_mead_minimize(const Objective& f, RVector x0, double initial_step,
                                    int max_evaluations, double tolerance);

}  // namespace entfate
