#pragma once

#include <Eigen/Dense>

namespace dvs {

// Largest eigenvalue of X'X by power iteration on the Gram operator
// v -> X'(Xv), without forming X'X. Deterministic all-ones start.
double largest_gram_eigenvalue(const Eigen::MatrixXd& X, int max_iter = 200,
                               double tol = 1e-9);

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace dvs
