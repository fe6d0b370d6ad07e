#include "dvs/glm.hpp"

#include <cmath>
#include <string>

namespace dvs {

namespace {

void check_theta(Family kind, double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("glm: non-finite natural parameter theta");
  }
  if (kind == Family::Poisson && theta > kPoissonThetaCap) {
    throw std::overflow_error("glm: Poisson theta " + std::to_string(theta) +
                              " exceeds overflow guard " +
                              std::to_string(kPoissonThetaCap));
  }
}

// log(1 + e^t) without overflow for large |t|.
double log1pexp(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// logistic mean, saturating smoothly at both tails.
double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double GlmFamily::cumulant(double theta) const {
  check_theta(kind, theta);
  switch (kind) {
    case Family::Gaussian:
      return 0.5 * theta * theta;
    case Family::Bernoulli:
      return log1pexp(theta);
    case Family::Poisson:
      return std::exp(theta);
  }
  return 0.0;
}

double GlmFamily::mean(double theta) const {
  check_theta(kind, theta);
  switch (kind) {
    case Family::Gaussian:
      return theta;
    case Family::Bernoulli:
      return sigmoid(theta);
    case Family::Poisson:
      return std::exp(theta);
  }
  return 0.0;
}

double GlmFamily::variance(double theta) const {
  check_theta(kind, theta);
  switch (kind) {
    case Family::Gaussian:
      return 1.0;
    case Family::Bernoulli: {
      const double m = sigmoid(theta);
      return m * (1.0 - m);
    }
    case Family::Poisson:
      return std::exp(theta);
  }
  return 0.0;
}

std::string family_name(Family kind) {
  switch (kind) {
    case Family::Gaussian:
      return "gaussian";
    case Family::Bernoulli:
      return "bernoulli";
    case Family::Poisson:
      return "poisson";
  }
  return "?";
}

double curvature_bound(const GlmFamily& family) {
  switch (family.kind) {
    case Family::Gaussian:
      return 1.0;
    case Family::Bernoulli:
      return 0.25;
    case Family::Poisson:
      throw ConfigError(
          "glm: Poisson has no finite static curvature bound; use the "
          "dynamic overload");
  }
  return 0.0;
}

double curvature_bound(const GlmFamily& family, const Eigen::VectorXd& thetas) {
  if (family.kind != Family::Poisson) return curvature_bound(family);
  double mu = 0.0;
  for (Eigen::Index i = 0; i < thetas.size(); ++i) {
    mu = std::max(mu, family.variance(thetas[i]));
  }
  return mu;
}

void validate_shard(const DataShard& shard, const GlmFamily& family) {
  if (shard.n() < 1 || shard.p() < 1) {
    throw ShapeError("shard: need n >= 1 and p >= 1");
  }
  if (shard.y.size() != shard.X.rows()) {
    throw ShapeError("shard: y length does not match X rows");
  }
  for (int i = 0; i < shard.n(); ++i) {
    const double yi = shard.y[i];
    bool ok = std::isfinite(yi);
    if (ok && family.kind == Family::Bernoulli) {
      ok = yi == 0.0 || yi == 1.0;
    } else if (ok && family.kind == Family::Poisson) {
      ok = yi >= 0.0 && yi == std::floor(yi);
    }
    if (!ok) {
      throw DataError("shard " + std::to_string(shard.machine_id) + ": row " +
                      std::to_string(i) + " response " + std::to_string(yi) +
                      " invalid for family " + family_name(family.kind));
    }
  }
}

Eigen::VectorXd linear_predictor(const DataShard& shard,
                                 const CoefVector& beta,
                                 const GlmFamily& family) {
  if (beta.size() != shard.p()) {
    throw ShapeError("glm: beta has length " + std::to_string(beta.size()) +
                     ", shard has p = " + std::to_string(shard.p()));
  }
  Eigen::VectorXd theta = shard.X * beta.values();
  if (!theta.allFinite()) {
    throw std::invalid_argument("glm: non-finite natural parameter theta");
  }
  if (family.kind == Family::Poisson && theta.maxCoeff() > kPoissonThetaCap) {
    throw std::overflow_error(
        "glm: Poisson theta " + std::to_string(theta.maxCoeff()) +
        " exceeds overflow guard " + std::to_string(kPoissonThetaCap));
  }
  return theta;
}

double local_loss(const DataShard& shard, const CoefVector& beta,
                  const GlmFamily& family) {
  const Eigen::VectorXd theta = linear_predictor(shard, beta, family);
  double acc = 0.0;
  for (int i = 0; i < shard.n(); ++i) {
    acc += family.cumulant(theta[i]) - theta[i] * shard.y[i];
  }
  return acc / shard.n();
}

Eigen::VectorXd local_gradient(const DataShard& shard, const CoefVector& beta,
                               const GlmFamily& family) {
  const Eigen::VectorXd theta = linear_predictor(shard, beta, family);
  Eigen::VectorXd resid(shard.n());
  for (int i = 0; i < shard.n(); ++i) {
    resid[i] = family.mean(theta[i]) - shard.y[i];
  }
  return (shard.X.transpose() * resid) / shard.n();
}

double local_hessian_quadform(const DataShard& shard, const CoefVector& beta,
                              const Eigen::VectorXd& v,
                              const GlmFamily& family) {
  if (v.size() != shard.p()) {
    throw ShapeError("glm: direction has length " + std::to_string(v.size()) +
                     ", shard has p = " + std::to_string(shard.p()));
  }
  const Eigen::VectorXd theta = linear_predictor(shard, beta, family);
  const Eigen::VectorXd Xv = shard.X * v;
  double acc = 0.0;
  for (int i = 0; i < shard.n(); ++i) {
    acc += family.variance(theta[i]) * Xv[i] * Xv[i];
  }
  return acc / shard.n();
}

}  // namespace dvs
