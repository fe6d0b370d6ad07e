#include "dvs/lasso.hpp"

#include <cmath>
#include <iostream>

#include "dvs/linalg.hpp"

namespace dvs {

double auto_lambda(const DataShard& shard, double c) {
  const double n = shard.n();
  if (shard.p() < 2) {
    std::cerr << "dvs: warning: auto lambda with p < 2, using c*sqrt(1/n)\n";
    return c * std::sqrt(1.0 / n);
  }
  return c * std::sqrt(std::log(double(shard.p())) / n);
}

namespace {

double l1_norm(const Eigen::VectorXd& v) {
  return v.lpNorm<1>();
}

// Gaussian: exact cyclic coordinate descent on
//   n^-1 [ 0.5 ||X b||^2 - y'Xb ] + lambda ||b||_1.
LassoResult fit_gaussian_cd(const DataShard& shard, double lambda,
                            const LassoConfig& cfg) {
  const int n = shard.n();
  const int p = shard.p();
  const GlmFamily fam{Family::Gaussian};

  Eigen::VectorXd col_ms(p);  // n^-1 X_j'X_j
  for (int j = 0; j < p; ++j) col_ms[j] = shard.X.col(j).squaredNorm() / n;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = shard.y;  // y - X beta

  LassoResult out;
  out.lambda = lambda;
  for (int it = 0; it < cfg.max_iter; ++it) {
    double max_change = 0.0;
    for (int j = 0; j < p; ++j) {
      if (col_ms[j] == 0.0) continue;  // constant-zero column stays out
      const double old = beta[j];
      const double z = shard.X.col(j).dot(resid) / n + col_ms[j] * old;
      const double next = soft_threshold(z, lambda) / col_ms[j];
      if (next != old) {
        resid -= (next - old) * shard.X.col(j);
        beta[j] = next;
        max_change = std::max(max_change, std::abs(next - old));
      }
    }
    out.iterations = it + 1;
    out.objective_trace.push_back(
        local_loss(shard, CoefVector(beta), fam) + lambda * l1_norm(beta));
    if (max_change <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.beta = CoefVector(std::move(beta));
  return out;
}

// Bernoulli/Poisson: ISTA with backtracking. The majorization check
// guarantees the penalized objective never increases.
LassoResult fit_ista(const DataShard& shard, const GlmFamily& family,
                     double lambda, const LassoConfig& cfg) {
  const int p = shard.p();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double loss = local_loss(shard, CoefVector(beta), family);
  double step = 1.0;

  LassoResult out;
  out.lambda = lambda;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd grad =
        local_gradient(shard, CoefVector(beta), family);
    Eigen::VectorXd next(p);
    double next_loss = 0.0;
    for (;;) {
      for (int j = 0; j < p; ++j) {
        next[j] = soft_threshold(beta[j] - step * grad[j], step * lambda);
      }
      bool ok = true;
      try {
        next_loss = local_loss(shard, CoefVector(next), family);
      } catch (const std::overflow_error&) {
        ok = false;  // step walked past the Poisson guard: shrink
      }
      if (ok) {
        const Eigen::VectorXd d = next - beta;
        const double quad =
            loss + grad.dot(d) + d.squaredNorm() / (2.0 * step);
        if (next_loss <= quad + 1e-15) break;
      }
      step *= 0.5;
      if (step < 1e-18) {
        throw NumericalError("lasso: backtracking step underflow");
      }
    }
    const double max_change = (next - beta).lpNorm<Eigen::Infinity>();
    beta.swap(next);
    loss = next_loss;
    out.iterations = it + 1;
    out.objective_trace.push_back(loss + lambda * l1_norm(beta));
    if (max_change <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.beta = CoefVector(std::move(beta));
  return out;
}

}  // namespace

LassoResult lasso_fit(const DataShard& shard, const GlmFamily& family,
                      const LassoConfig& cfg) {
  if (cfg.max_iter < 1) throw ConfigError("lasso: max_iter must be >= 1");
  if (!(cfg.tol > 0.0)) throw ConfigError("lasso: tol must be > 0");
  if (cfg.lambda && !(*cfg.lambda >= 0.0)) {
    throw ConfigError("lasso: lambda must be >= 0");
  }
  const double lambda = cfg.lambda ? *cfg.lambda : auto_lambda(shard);

  if (!cfg.standardize) {
    return family.kind == Family::Gaussian
               ? fit_gaussian_cd(shard, lambda, cfg)
               : fit_ista(shard, family, lambda, cfg);
  }

  // Scale-only standardization (no centering: the model has no intercept).
  DataShard scaled = shard;
  Eigen::VectorXd sd(shard.p());
  for (int j = 0; j < shard.p(); ++j) {
    const auto col = shard.X.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / shard.n();
    sd[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    scaled.X.col(j) /= sd[j];
  }
  LassoConfig inner = cfg;
  inner.standardize = false;
  inner.lambda = lambda;
  LassoResult res = family.kind == Family::Gaussian
                        ? fit_gaussian_cd(scaled, lambda, inner)
                        : fit_ista(scaled, family, lambda, inner);
  res.beta.values().array() /= sd.array();
  return res;
}

}  // namespace dvs
