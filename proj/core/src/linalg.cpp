#include "dvs/linalg.hpp"

#include <cmath>

#include "dvs/types.hpp"

namespace dvs {

double largest_gram_eigenvalue(const Eigen::MatrixXd& X, int max_iter,
                               double tol) {
  const Eigen::Index p = X.cols();
  if (p == 0) throw ShapeError("power iteration: empty matrix");
  Eigen::VectorXd v = Eigen::VectorXd::Ones(p) / std::sqrt(double(p));
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = X.transpose() * (X * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;  // X'X v in the null space: all-zero matrix
    v = w / nw;
    const double next = (X * v).squaredNorm();  // Rayleigh quotient, ||v||=1
    if (std::abs(next - lambda) <= tol * std::max(1.0, next)) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace dvs
