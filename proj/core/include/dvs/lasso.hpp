#pragma once

#include <optional>
#include <vector>

#include "dvs/glm.hpp"
#include "dvs/types.hpp"

namespace dvs {

struct LassoConfig {
  std::optional<double> lambda;  // nullopt: auto_lambda at fit time
  int max_iter = 1000;
  double tol = 1e-7;  // max coordinate change
  bool standardize = false;
};

struct LassoResult {
  CoefVector beta;
  bool converged = false;
  int iterations = 0;
  double lambda = 0.0;  // penalty actually used
  // Penalized objective after each iteration (sweep for the coordinate
  // solver, proximal step otherwise); non-increasing by construction.
  std::vector<double> objective_trace;
};

// Default rate sqrt(ln p / n), scaled by c. p < 2 falls back to
// c * sqrt(1/n) with a warning on stderr.
double auto_lambda(const DataShard& shard, double c = 1.0);

// l1-penalized local likelihood on one shard: cyclic coordinate descent
// with soft-thresholding for Gaussian, proximal gradient (ISTA) with
// backtracking for Bernoulli/Poisson. Hitting max_iter flags the result
// as non-converged instead of raising.
LassoResult lasso_fit(const DataShard& shard, const GlmFamily& family,
                      const LassoConfig& cfg);

}  // namespace dvs
