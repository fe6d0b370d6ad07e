#pragma once

#include <optional>

#include "dvs/cluster.hpp"
#include "dvs/lasso.hpp"
#include "dvs/model_select.hpp"

namespace dvs {

struct ScreeningOptions {
  std::optional<double> lambda;  // nullopt: auto rate on the coordinator shard
  int k = 0;                     // > 0: fixed sparsity, no EBIC scan
  int k_max = 0;                 // scan bound K; 0 picks min(p, 50)
  double epsilon = 1e-6;
  int max_iter = 500;
  double vartheta0 = 1.0;
  double lasso_tol = 1e-7;
  int lasso_max_iter = 1000;
  int jobs = 1;
};

struct PhaseTimings {
  double lasso_s = 0.0;
  double aggregate_s = 0.0;
  double scan_s = 0.0;
};

struct ScreeningOutcome {
  ScreeningRun run;
  EbicTrace trace;  // single row when k was fixed
  CoefVector beta_tilde;
  bool lasso_converged = true;
  double lambda = 0.0;
  PhaseTimings timings;
};

// The whole pipeline: Lasso initializer on the coordinator shard, one
// broadcast/aggregate round, then DIHT at fixed k or the EBIC k-scan.
ScreeningOutcome run_screening(const ClusterSpec& cluster,
                               const GlmFamily& family,
                               const ScreeningOptions& opts);

}  // namespace dvs
