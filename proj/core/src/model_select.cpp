#include "dvs/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace dvs {

double ebic(double loss_val, int k, long N, long p) {
  if (N < 1 || p < 1) throw ConfigError("ebic: need N >= 1 and p >= 1");
  if (k < 0) throw ConfigError("ebic: k must be >= 0");
  return loss_val + double(k) * (std::log(double(N)) + 0.5 * std::log(double(p))) /
                        double(N);
}

SelectionResult select_k(const SurrogateState& state, const GlmFamily& family,
                         int K, const DihtConfig& cfg, int jobs) {
  const int p = state.shard().p();
  if (K < 1 || K > p) {
    throw ConfigError("select_k: K = " + std::to_string(K) + " outside [1, " +
                      std::to_string(p) + "]");
  }

  std::vector<ScreeningRun> runs(K);
  auto run_one = [&](int k) {
    DihtConfig c = cfg;
    c.k = k;
    try {
      return diht_run(state, c, family, state.beta_tilde);
    } catch (const NumericalError& e) {
      throw NumericalError("select_k: scan aborted at k = " +
                           std::to_string(k) + ": " + e.what());
    }
  };

  if (jobs <= 1) {
    for (int k = 1; k <= K; ++k) runs[k - 1] = run_one(k);
  } else {
    for (int start = 1; start <= K; start += jobs) {
      const int end = std::min(K, start + jobs - 1);
      std::vector<std::future<ScreeningRun>> batch;
      for (int k = start; k <= end; ++k) {
        batch.push_back(std::async(std::launch::async, run_one, k));
      }
      for (int k = start; k <= end; ++k) {
        runs[k - 1] = batch[k - start].get();
      }
    }
  }

  SelectionResult out;
  out.trace.rows.reserve(K);
  for (int k = 1; k <= K; ++k) {
    const ScreeningRun& r = runs[k - 1];
    const double loss = r.log.records.back().loss;
    EbicTrace::Row row;
    row.k = k;
    row.loss = loss;
    row.ebic = ebic(loss, k, state.total_n, p);
    row.support = r.support;
    row.converged = r.converged;
    out.trace.rows.push_back(std::move(row));
  }
  int best = -1;
  for (int i = 0; i < K; ++i) {
    if (!out.trace.rows[i].converged) continue;
    if (best < 0 || out.trace.rows[i].ebic < out.trace.rows[best].ebic) {
      best = i;
    }
  }
  if (best < 0) {  // nothing converged: fall back to the plain argmin
    best = 0;
    for (int i = 1; i < K; ++i) {
      if (out.trace.rows[i].ebic < out.trace.rows[best].ebic) best = i;
    }
  }
  out.trace.chosen_k = best + 1;
  out.run = std::move(runs[best]);
  return out;
}

}  // namespace dvs
