#pragma once

#include <string>
#include <vector>

#include "dvs/cluster.hpp"
#include "dvs/glm.hpp"
#include "dvs/types.hpp"

namespace dvs {

// Everything the hard-thresholding loop needs after the one communication
// round: the coordinator shard, the gradient-gap correction
// c = grad_1(beta_tilde) - grad(beta_tilde), and the initializer.
// The referenced shard must outlive the state.
struct SurrogateState {
  const DataShard* shard0 = nullptr;
  Eigen::VectorXd correction;
  CoefVector beta_tilde;
  long total_n = 0;  // N across all machines, for model selection
  int comm_rounds = 1;

  const DataShard& shard() const { return *shard0; }
};

// Runs the single broadcast/aggregate round and assembles the state.
SurrogateState build_surrogate(const ClusterSpec& cluster,
                               const CoefVector& beta_tilde,
                               const GlmFamily& family);

// L_1(beta) - <beta, c>  and its gradient grad_1(beta) - c.
double surrogate_loss(const SurrogateState& state, const CoefVector& beta,
                      const GlmFamily& family);
Eigen::VectorXd surrogate_gradient(const SurrogateState& state,
                                   const CoefVector& beta,
                                   const GlmFamily& family);

// Keeps the k entries of largest magnitude (ties to the smaller index),
// zeroes the rest.
CoefVector hard_threshold(const Eigen::VectorXd& gamma, int k);

// One projected gradient step: hard_threshold(beta - grad/vartheta, k).
CoefVector diht_step(const SurrogateState& state, const CoefVector& beta_t,
                     double vartheta, int k, const GlmFamily& family);

struct DihtConfig {
  int k = 1;
  double vartheta0 = 1.0;
  double epsilon = 1e-6;  // stop when ||beta_next - beta||_2 <= epsilon
  int max_iter = 500;
};

struct IterationRecord {
  int t = 0;
  double loss = 0.0;
  double vartheta = 0.0;
  std::vector<int> support;
  double step_norm = 0.0;
  int doublings = 0;  // vartheta doublings spent on this step
};

struct IterationLog {
  std::vector<IterationRecord> records;
  int doubling_events = 0;
};

// One JSON object per accepted iteration.
std::string to_json_lines(const IterationLog& log);

struct ScreeningRun {
  int k = 0;
  CoefVector beta;
  std::vector<int> support;
  IterationLog log;
  bool converged = false;
  int iterations = 0;
  int comm_rounds = 1;
};

// Number of broadcast/aggregate rounds behind a completed run. One per
// run by construction (m = 1 counts as one logical round).
int communication_rounds(const ScreeningRun& run);

// The full loop: step, check descent, double vartheta on violation and
// retry from the same iterate, stop on a small step or max_iter. The
// accepted loss sequence is non-increasing. Doubling past 2^60 * vartheta0
// raises NumericalError; exhausting max_iter only flags the result.
ScreeningRun diht_run(const SurrogateState& state, const DihtConfig& cfg,
                      const GlmFamily& family, const CoefVector& beta0);

// Theorem step bound rho_1 * mu / n for the coordinator shard, with rho_1
// from power iteration on X'X. Families with a static curvature bound
// only (Gaussian, Bernoulli).
double static_vartheta(const DataShard& shard, const GlmFamily& family);

}  // namespace dvs
