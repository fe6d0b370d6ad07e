#include <benchmark/benchmark.h>

#include "dvs/diht.hpp"
#include "dvs/lasso.hpp"
#include "dvs/linalg.hpp"
#include "dvs/marginal.hpp"
#include "dvs/rng.hpp"
#include "dvs/simgen.hpp"

namespace {

using namespace dvs;

DataShard make_shard(int n, int p, Family kind, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd bstar = Eigen::VectorXd::Zero(p);
  bstar[p > 1 ? 1 : 0] = 1.0;
  if (p > 3) bstar[3] = -0.8;
  DataShard shard;
  shard.X.resize(n, p);
  shard.y.resize(n);
  const GlmFamily fam{kind};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) shard.X(i, j) = rng.normal();
    const double theta = shard.X.row(i).dot(bstar);
    switch (kind) {
      case Family::Gaussian:
        shard.y[i] = theta + rng.normal();
        break;
      case Family::Bernoulli:
        shard.y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-theta))) ? 1 : 0;
        break;
      case Family::Poisson:
        shard.y[i] = double(rng.poisson(std::exp(theta)));
        break;
    }
  }
  return shard;
}

void BM_LocalGradient(benchmark::State& state) {
  const int n = int(state.range(0));
  const int p = int(state.range(1));
  const DataShard shard = make_shard(n, p, Family::Bernoulli, 1);
  const CoefVector beta = CoefVector::zeros(p);
  const GlmFamily fam{Family::Bernoulli};
  for (auto _ : state) {
    benchmark::DoNotOptimize(local_gradient(shard, beta, fam));
  }
  state.SetItemsProcessed(state.iterations() * n * p);
}
BENCHMARK(BM_LocalGradient)->Args({300, 1000})->Args({300, 6000});

void BM_HardThreshold(benchmark::State& state) {
  const int p = int(state.range(0));
  Rng rng(2);
  Eigen::VectorXd g(p);
  for (int j = 0; j < p; ++j) g[j] = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(hard_threshold(g, 10));
  }
}
BENCHMARK(BM_HardThreshold)->Arg(1000)->Arg(6000)->Arg(50000);

void BM_PowerIteration(benchmark::State& state) {
  const DataShard shard =
      make_shard(int(state.range(0)), int(state.range(1)), Family::Gaussian, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(largest_gram_eigenvalue(shard.X));
  }
}
BENCHMARK(BM_PowerIteration)->Args({300, 1000})->Args({300, 6000});

void BM_LassoFit(benchmark::State& state) {
  const Family kind = state.range(2) == 0 ? Family::Gaussian
                                          : Family::Bernoulli;
  const DataShard shard =
      make_shard(int(state.range(0)), int(state.range(1)), kind, 4);
  const GlmFamily fam{kind};
  LassoConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lasso_fit(shard, fam, cfg));
  }
}
BENCHMARK(BM_LassoFit)->Args({300, 1000, 0})->Args({300, 1000, 1});

void BM_DihtRun(benchmark::State& state) {
  const int n = int(state.range(0));
  const int p = int(state.range(1));
  const DataShard shard = make_shard(n, p, Family::Bernoulli, 5);
  ClusterSpec cluster({shard});
  const GlmFamily fam{Family::Bernoulli};
  const LassoResult lres = lasso_fit(cluster.shard(0), fam, LassoConfig{});
  const SurrogateState st = build_surrogate(cluster, lres.beta, fam);
  DihtConfig cfg;
  cfg.k = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(diht_run(st, cfg, fam, st.beta_tilde));
  }
}
BENCHMARK(BM_DihtRun)->Args({200, 1000});

void BM_Kendall(benchmark::State& state) {
  const DataShard shard =
      make_shard(int(state.range(0)), 2, Family::Gaussian, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kendall_utility(shard, 0));
  }
}
BENCHMARK(BM_Kendall)->Arg(300)->Arg(3000);

void BM_Dcor(benchmark::State& state) {
  const DataShard shard =
      make_shard(int(state.range(0)), 2, Family::Gaussian, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dcor_utility(shard, 0));
  }
}
BENCHMARK(BM_Dcor)->Arg(100)->Arg(300);

void BM_Generate(benchmark::State& state) {
  ScenarioSpec spec;
  spec.example = Scenario::Logistic21;
  spec.N = state.range(0);
  spec.p = int(state.range(1));
  spec.m = 10;
  spec.seed = 8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(spec));
  }
}
BENCHMARK(BM_Generate)->Args({1000, 500});

}  // namespace

BENCHMARK_MAIN();
