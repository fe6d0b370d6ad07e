#include "dvs/screening.hpp"

#include <algorithm>
#include <chrono>

namespace dvs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

ScreeningOutcome run_screening(const ClusterSpec& cluster,
                               const GlmFamily& family,
                               const ScreeningOptions& opts) {
  const int p = cluster.p();
  ScreeningOutcome out;

  auto t0 = std::chrono::steady_clock::now();
  LassoConfig lcfg;
  lcfg.lambda = opts.lambda;
  lcfg.tol = opts.lasso_tol;
  lcfg.max_iter = opts.lasso_max_iter;
  const LassoResult lres = lasso_fit(cluster.shard(0), family, lcfg);
  out.beta_tilde = lres.beta;
  out.lasso_converged = lres.converged;
  out.lambda = lres.lambda;
  out.timings.lasso_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const SurrogateState state = build_surrogate(cluster, out.beta_tilde, family);
  out.timings.aggregate_s = seconds_since(t0);

  DihtConfig dcfg;
  dcfg.epsilon = opts.epsilon;
  dcfg.max_iter = opts.max_iter;
  dcfg.vartheta0 = opts.vartheta0;

  t0 = std::chrono::steady_clock::now();
  if (opts.k > 0) {
    dcfg.k = opts.k;
    out.run = diht_run(state, dcfg, family, state.beta_tilde);
    EbicTrace::Row row;
    row.k = opts.k;
    row.loss = out.run.log.records.back().loss;
    row.ebic = ebic(row.loss, opts.k, state.total_n, p);
    row.support = out.run.support;
    row.converged = out.run.converged;
    out.trace.rows.push_back(std::move(row));
    out.trace.chosen_k = opts.k;
  } else {
    const int K = opts.k_max > 0 ? opts.k_max : std::min(p, 50);
    SelectionResult sel = select_k(state, family, K, dcfg, opts.jobs);
    out.run = std::move(sel.run);
    out.trace = std::move(sel.trace);
  }
  out.timings.scan_s = seconds_since(t0);
  return out;
}

}  // namespace dvs
