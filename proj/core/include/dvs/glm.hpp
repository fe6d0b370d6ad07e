#pragma once

#include <string>

#include "dvs/types.hpp"

namespace dvs {

enum class Family { Gaussian, Bernoulli, Poisson };

// Poisson natural parameters are capped so exp(theta) stays well inside
// double range; breaching the cap raises instead of silently saturating,
// since an Inf loss would defeat the descent check downstream.
inline constexpr double kPoissonThetaCap = 30.0;

// Exponential-family spec under the canonical link: cumulant b, mean b'
// and variance b''. All three validate theta (finite, Poisson cap).
struct GlmFamily {
  Family kind = Family::Gaussian;

  double cumulant(double theta) const;  // b(theta)
  double mean(double theta) const;      // b'(theta)
  double variance(double theta) const;  // b''(theta)
};

std::string family_name(Family kind);

// Static curvature bound mu = max b''. Gaussian: 1, Bernoulli: 1/4.
// Poisson has no finite global bound; use the dynamic overload, which
// maximizes b'' over the supplied natural parameters.
double curvature_bound(const GlmFamily& family);
double curvature_bound(const GlmFamily& family, const Eigen::VectorXd& thetas);

// One machine's (X, y) block. Rows are observations.
struct DataShard {
  int machine_id = 0;
  Eigen::MatrixXd X;  // n x p
  Eigen::VectorXd y;  // length n

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
};

// n >= 1, p >= 1, y matches X and is valid for the family: finite for
// Gaussian, {0,1} for Bernoulli, nonnegative integer for Poisson.
// Throws DataError naming the first offending row.
void validate_shard(const DataShard& shard, const GlmFamily& family);

// Natural parameters X * beta, with the Poisson cap enforced.
Eigen::VectorXd linear_predictor(const DataShard& shard,
                                 const CoefVector& beta,
                                 const GlmFamily& family);

// Local negative log-likelihood  n^-1 sum_j [ b(X_j'beta) - (X_j'beta) y_j ].
double local_loss(const DataShard& shard, const CoefVector& beta,
                  const GlmFamily& family);

// Gradient  n^-1 sum_j X_j (b'(X_j'beta) - y_j).
Eigen::VectorXd local_gradient(const DataShard& shard, const CoefVector& beta,
                               const GlmFamily& family);

// v' [ n^-1 sum_j X_j b''(X_j'beta) X_j' ] v, always >= 0.
double local_hessian_quadform(const DataShard& shard, const CoefVector& beta,
                              const Eigen::VectorXd& v,
                              const GlmFamily& family);

}  // namespace dvs
