#include "dvs/simgen.hpp"

#include <cmath>

#include "dvs/rng.hpp"

namespace dvs {

Scenario parse_scenario(const std::string& label) {
  if (label == "1.1") return Scenario::Linear11;
  if (label == "1.2") return Scenario::Linear12;
  if (label == "2.1") return Scenario::Logistic21;
  if (label == "2.2") return Scenario::Logistic22;
  if (label == "3.1") return Scenario::Poisson21;
  if (label == "3.2") return Scenario::Poisson22;
  throw ConfigError("unknown scenario '" + label +
                    "' (expected 1.1, 1.2, 2.1, 2.2, 3.1 or 3.2)");
}

std::string scenario_label(Scenario s) {
  switch (s) {
    case Scenario::Linear11:
      return "1.1";
    case Scenario::Linear12:
      return "1.2";
    case Scenario::Logistic21:
      return "2.1";
    case Scenario::Logistic22:
      return "2.2";
    case Scenario::Poisson21:
      return "3.1";
    case Scenario::Poisson22:
      return "3.2";
  }
  return "?";
}

GlmFamily scenario_family(Scenario s) {
  switch (s) {
    case Scenario::Linear11:
    case Scenario::Linear12:
      return {Family::Gaussian};
    case Scenario::Logistic21:
    case Scenario::Logistic22:
      return {Family::Bernoulli};
    case Scenario::Poisson21:
    case Scenario::Poisson22:
      return {Family::Poisson};
  }
  return {Family::Gaussian};
}

CoefVector scenario_truth(Scenario s, int p) {
  if (p < 6) throw ConfigError("scenario: p must be >= 6");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  switch (s) {
    case Scenario::Linear11:
      b[0] = 2, b[1] = 4, b[2] = 6, b[3] = 8, b[4] = 10;
      break;
    case Scenario::Linear12:
      b[0] = 0.25, b[1] = -0.5, b[2] = 1.0, b[3] = 0.3, b[4] = -0.2;
      break;
    case Scenario::Logistic21:
    case Scenario::Logistic22:
      b[1] = 1.5, b[3] = 2.0, b[5] = -0.6;
      break;
    case Scenario::Poisson21:
    case Scenario::Poisson22:
      b[1] = 0.8, b[2] = -0.6, b[4] = 0.5;
      break;
  }
  return CoefVector(std::move(b));
}

namespace {

bool ar1_covariates(Scenario s) {
  return s == Scenario::Linear12 || s == Scenario::Logistic22 ||
         s == Scenario::Poisson22;
}

double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                  : std::exp(t) / (1.0 + std::exp(t));
}

// Per-observation draw order is part of the reproducibility contract:
// covariate normals first (plus the five shared-factor extras for the
// Linear11 design), then the response draw(s).
DataShard generate_shard(const ScenarioSpec& spec, int machine, int n,
                         const Eigen::VectorXd& truth) {
  Rng rng = Rng::substream(spec.seed, std::uint64_t(machine));
  const int p = spec.p;

  DataShard shard;
  shard.machine_id = machine;
  shard.X.resize(n, p);
  shard.y.resize(n);

  double upsilon = 0.0;
  if (ar1_covariates(spec.example)) upsilon = rng.uniform(0.2, 0.3);
  const double ar_scale = std::sqrt(1.0 - upsilon * upsilon);

  const Scenario sc = spec.example;
  for (int i = 0; i < n; ++i) {
    if (sc == Scenario::Linear11) {
      Eigen::VectorXd z(p);
      for (int l = 0; l < p; ++l) z[l] = rng.normal();
      const double zsum5 = z.head(5).sum();
      for (int l = 0; l < 5; ++l) {
        shard.X(i, l) = (z[l] + rng.normal()) / std::sqrt(2.0);
      }
      for (int l = 5; l < p; ++l) {
        shard.X(i, l) = (z[l] + zsum5) / 2.0;
      }
    } else if (ar1_covariates(sc)) {
      // AR(1) conditional recursion; marginally N(0,1) with lag
      // correlation upsilon^|s-t|.
      double prev = rng.normal();
      shard.X(i, 0) = prev;
      for (int l = 1; l < p; ++l) {
        prev = upsilon * prev + ar_scale * rng.normal();
        shard.X(i, l) = prev;
      }
    } else {
      for (int l = 0; l < p; ++l) shard.X(i, l) = rng.normal();
    }

    const double theta = shard.X.row(i).dot(truth);
    switch (sc) {
      case Scenario::Linear11:
      case Scenario::Linear12:
        shard.y[i] = theta + rng.normal();
        break;
      case Scenario::Logistic21:
      case Scenario::Logistic22:
        shard.y[i] = rng.bernoulli(sigmoid(theta)) ? 1.0 : 0.0;
        break;
      case Scenario::Poisson21:
      case Scenario::Poisson22:
        shard.y[i] = double(rng.poisson(std::exp(theta)));
        break;
    }
  }
  return shard;
}

}  // namespace

GeneratedDataset generate(const ScenarioSpec& spec) {
  if (spec.m < 1) throw ConfigError("scenario: m must be >= 1");
  if (spec.N < 1) throw ConfigError("scenario: N must be >= 1");
  if (spec.N % spec.m != 0) throw ConfigError("N must be divisible by m");
  if (spec.p < 6) throw ConfigError("scenario: p must be >= 6");

  GeneratedDataset out;
  out.truth = scenario_truth(spec.example, spec.p);
  out.support = out.truth.support();

  const int n = static_cast<int>(spec.N / spec.m);
  out.shards.reserve(spec.m);
  for (int i = 0; i < spec.m; ++i) {
    out.shards.push_back(generate_shard(spec, i, n, out.truth.values()));
  }
  return out;
}

Eigen::MatrixXd ar1_cholesky(int p, double upsilon) {
  if (p < 1) throw ConfigError("ar1_cholesky: p must be >= 1");
  if (!(std::abs(upsilon) < 1.0)) {
    throw std::domain_error("ar1_cholesky: need |upsilon| < 1");
  }
  Eigen::MatrixXd sigma(p, p);
  for (int s = 0; s < p; ++s) {
    for (int t = 0; t < p; ++t) {
      sigma(s, t) = std::pow(upsilon, std::abs(s - t));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("ar1_cholesky: factorization failed");
  }
  return llt.matrixL();
}

}  // namespace dvs
