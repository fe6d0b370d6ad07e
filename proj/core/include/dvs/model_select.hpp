#pragma once

#include <vector>

#include "dvs/diht.hpp"

namespace dvs {

// loss + k (ln N + 0.5 ln p) / N
double ebic(double loss_val, int k, long N, long p);

struct EbicTrace {
  struct Row {
    int k = 0;
    double loss = 0.0;   // surrogate loss at the k-sparse fit
    double ebic = 0.0;
    std::vector<int> support;
    bool converged = true;
  };
  std::vector<Row> rows;
  int chosen_k = 0;
};

struct SelectionResult {
  ScreeningRun run;  // the run at the EBIC-minimizing k
  EbicTrace trace;
};

// Scans k = 1..K, each run starting from beta_tilde and reusing the one
// cached aggregate inside `state` (no further communication). Ties in the
// criterion go to the smallest k. Runs that hit max_iter without
// converging are recorded in the trace but ineligible for the argmin:
// past the sparsity level where the coordinator's data separates, the
// surrogate objective is unbounded below and a non-converged iterate
// carries no model-selection information. If no run converges the plain
// argmin is used. jobs > 1 fans the independent per-k runs out across
// threads; results are identical for any jobs value.
SelectionResult select_k(const SurrogateState& state, const GlmFamily& family,
                         int K, const DihtConfig& cfg, int jobs = 1);

}  // namespace dvs
