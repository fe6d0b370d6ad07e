#include "dvs/diht.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dvs/linalg.hpp"

namespace dvs {

// Absolute slack absorbing float noise in the descent comparison.
static constexpr double kDescentTol = 1e-12;

SurrogateState build_surrogate(const ClusterSpec& cluster,
                               const CoefVector& beta_tilde,
                               const GlmFamily& family) {
  const Eigen::VectorXd agg =
      broadcast_and_aggregate(cluster, beta_tilde, family);
  SurrogateState state;
  state.shard0 = &cluster.shard(0);
  state.beta_tilde = beta_tilde;
  state.total_n = cluster.total_n();
  state.comm_rounds = 1;
  if (cluster.m() == 1) {
    state.correction = Eigen::VectorXd::Zero(cluster.p());
  } else {
    state.correction =
        local_gradient(cluster.shard(0), beta_tilde, family) - agg;
  }
  return state;
}

double surrogate_loss(const SurrogateState& state, const CoefVector& beta,
                      const GlmFamily& family) {
  if (beta.size() != state.shard().p()) {
    throw ShapeError("surrogate: beta length " + std::to_string(beta.size()) +
                     " != p = " + std::to_string(state.shard().p()));
  }
  return local_loss(state.shard(), beta, family) -
         beta.values().dot(state.correction);
}

Eigen::VectorXd surrogate_gradient(const SurrogateState& state,
                                   const CoefVector& beta,
                                   const GlmFamily& family) {
  if (beta.size() != state.shard().p()) {
    throw ShapeError("surrogate: beta length " + std::to_string(beta.size()) +
                     " != p = " + std::to_string(state.shard().p()));
  }
  return local_gradient(state.shard(), beta, family) - state.correction;
}

CoefVector hard_threshold(const Eigen::VectorXd& gamma, int k) {
  const int p = static_cast<int>(gamma.size());
  if (k < 1 || k > p) {
    throw ConfigError("hard_threshold: k = " + std::to_string(k) +
                      " outside [1, " + std::to_string(p) + "]");
  }
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(),
                   [&](int a, int b) {
                     const double fa = std::abs(gamma[a]);
                     const double fb = std::abs(gamma[b]);
                     return fa != fb ? fa > fb : a < b;
                   });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < k; ++i) out[idx[i]] = gamma[idx[i]];
  return CoefVector(std::move(out));
}

CoefVector diht_step(const SurrogateState& state, const CoefVector& beta_t,
                     double vartheta, int k, const GlmFamily& family) {
  if (!(vartheta > 0.0)) {
    throw ConfigError("diht: vartheta must be > 0");
  }
  const Eigen::VectorXd grad = surrogate_gradient(state, beta_t, family);
  return hard_threshold(beta_t.values() - grad / vartheta, k);
}

int communication_rounds(const ScreeningRun& run) {
  return run.comm_rounds;
}

ScreeningRun diht_run(const SurrogateState& state, const DihtConfig& cfg,
                      const GlmFamily& family, const CoefVector& beta0) {
  const int p = state.shard().p();
  if (cfg.k < 1 || cfg.k > p) {
    throw ConfigError("diht: k = " + std::to_string(cfg.k) + " outside [1, " +
                      std::to_string(p) + "]");
  }
  if (!(cfg.epsilon > 0.0)) throw ConfigError("diht: epsilon must be > 0");
  if (beta0.size() != p) {
    throw ShapeError("diht: beta0 length " + std::to_string(beta0.size()) +
                     " != p = " + std::to_string(p));
  }

  ScreeningRun run;
  run.k = cfg.k;
  run.comm_rounds = state.comm_rounds;

  double vartheta = cfg.vartheta0;
  const double vartheta_limit = std::ldexp(cfg.vartheta0, 60);
  // An initializer with more than k nonzeros is projected onto the
  // feasible set first; the descent guarantee only covers k-sparse
  // iterates, so starting outside would stall the doubling rule.
  CoefVector beta = beta0.nnz() > cfg.k
                        ? hard_threshold(beta0.values(), cfg.k)
                        : beta0;
  double loss = surrogate_loss(state, beta, family);
  run.log.records.push_back(
      {0, loss, vartheta, beta.support(), 0.0, 0});

  for (int t = 1; t <= cfg.max_iter; ++t) {
    const Eigen::VectorXd grad = surrogate_gradient(state, beta, family);
    CoefVector candidate;
    double cand_loss = 0.0;
    int doublings = 0;
    for (;;) {
      candidate = hard_threshold(beta.values() - grad / vartheta, cfg.k);
      bool descended = false;
      try {
        cand_loss = surrogate_loss(state, candidate, family);
        descended = cand_loss <= loss + kDescentTol;
      } catch (const std::overflow_error&) {
        descended = false;  // step blew past the Poisson guard
      }
      if (descended) break;
      vartheta *= 2.0;
      ++doublings;
      if (vartheta > vartheta_limit) {
        throw NumericalError(
            "diht: vartheta doubled past 2^60 * vartheta0 without descent");
      }
    }
    const double step_norm = (candidate.values() - beta.values()).norm();
    beta = std::move(candidate);
    loss = cand_loss;
    run.log.doubling_events += doublings;
    run.log.records.push_back(
        {t, loss, vartheta, beta.support(), step_norm, doublings});
    run.iterations = t;
    if (step_norm <= cfg.epsilon) {
      run.converged = true;
      break;
    }
  }

  run.beta = std::move(beta);
  run.support = run.beta.support();
  return run;
}

double static_vartheta(const DataShard& shard, const GlmFamily& family) {
  const double rho1 = largest_gram_eigenvalue(shard.X);
  return rho1 * curvature_bound(family) / shard.n();
}

std::string to_json_lines(const IterationLog& log) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& r : log.records) {
    os << "{\"t\":" << r.t << ",\"loss\":" << r.loss
       << ",\"vartheta\":" << r.vartheta << ",\"support\":[";
    for (std::size_t i = 0; i < r.support.size(); ++i) {
      if (i) os << ',';
      os << r.support[i] + 1;  // 1-based in external outputs
    }
    os << "],\"step_norm\":" << r.step_norm << ",\"doublings\":" << r.doublings
       << "}\n";
  }
  return os.str();
}

}  // namespace dvs
