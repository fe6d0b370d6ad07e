#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "dvs/diht.hpp"
#include "dvs/lasso.hpp"
#include "dvs/linalg.hpp"
#include "support/test_util.hpp"

using namespace dvs;

namespace {

std::vector<DataShard> partition(const DataShard& pooled, int m) {
  const int n = pooled.n() / m;
  std::vector<DataShard> shards(m);
  for (int i = 0; i < m; ++i) {
    shards[i].X = pooled.X.middleRows(i * n, n);
    shards[i].y = pooled.y.segment(i * n, n);
  }
  return shards;
}

SurrogateState make_state(const ClusterSpec& cluster, const GlmFamily& fam,
                          const CoefVector& beta_tilde) {
  return build_surrogate(cluster, beta_tilde, fam);
}

}  // namespace

TEST_SUITE_BEGIN("diht");

TEST_CASE("surrogate loss: zero correction, zero beta, naive oracle") {
  Rng rng(21);
  const GlmFamily fam{Family::Bernoulli};
  DataShard pooled = test::random_shard(rng, 60, 5, fam);

  ClusterSpec single(partition(pooled, 1));
  Eigen::VectorXd bt(5);
  for (int j = 0; j < 5; ++j) bt[j] = 0.2 * rng.normal();
  const SurrogateState s1 = make_state(single, fam, CoefVector(bt));
  CHECK(s1.correction.lpNorm<Eigen::Infinity>() == 0.0);

  Eigen::VectorXd b(5);
  for (int j = 0; j < 5; ++j) b[j] = 0.3 * rng.normal();
  CHECK(surrogate_loss(s1, CoefVector(b), fam) ==
        local_loss(single.shard(0), CoefVector(b), fam));

  ClusterSpec multi(partition(pooled, 3));
  const SurrogateState s3 = make_state(multi, fam, CoefVector(bt));
  CHECK(surrogate_loss(s3, CoefVector::zeros(5), fam) ==
        local_loss(multi.shard(0), CoefVector::zeros(5), fam));

  // naive-summation oracle
  double naive = local_loss(multi.shard(0), CoefVector(b), fam);
  for (int j = 0; j < 5; ++j) naive -= b[j] * s3.correction[j];
  CHECK(surrogate_loss(s3, CoefVector(b), fam) ==
        doctest::Approx(naive).epsilon(1e-13));
}

TEST_CASE("surrogate gradient at beta_tilde recovers the aggregate") {
  Rng rng(22);
  const GlmFamily fam{Family::Gaussian};
  DataShard pooled = test::random_shard(rng, 80, 6, fam);
  ClusterSpec cluster(partition(pooled, 4));
  Eigen::VectorXd bt(6);
  for (int j = 0; j < 6; ++j) bt[j] = rng.normal();

  const Eigen::VectorXd agg =
      broadcast_and_aggregate(cluster, CoefVector(bt), fam);
  const SurrogateState state = make_state(cluster, fam, CoefVector(bt));
  const Eigen::VectorXd g = surrogate_gradient(state, CoefVector(bt), fam);
  CHECK((g - agg).lpNorm<Eigen::Infinity>() <=
        1e-12 * std::max(1.0, agg.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("surrogate gradient matches finite differences") {
  Rng rng(23);
  const GlmFamily fam{Family::Bernoulli};
  DataShard pooled = test::random_shard(rng, 60, 4, fam);
  ClusterSpec cluster(partition(pooled, 2));
  Eigen::VectorXd bt(4);
  for (int j = 0; j < 4; ++j) bt[j] = 0.3 * rng.normal();
  const SurrogateState state = make_state(cluster, fam, CoefVector(bt));

  Eigen::VectorXd b(4), u(4);
  for (int j = 0; j < 4; ++j) b[j] = 0.3 * rng.normal();
  for (int j = 0; j < 4; ++j) u[j] = rng.normal();
  u.normalize();
  auto f = [&](const Eigen::VectorXd& x) {
    return surrogate_loss(state, CoefVector(x), fam);
  };
  const double fd = test::directional_fd(f, b, u);
  const double an = surrogate_gradient(state, CoefVector(b), fam).dot(u);
  CHECK(fd == doctest::Approx(an).epsilon(1e-5));
}

TEST_CASE("hard_threshold keeps the top-k with index tie-breaking") {
  Eigen::VectorXd g1(4);
  g1 << 3, -1, 2, 0.5;
  const CoefVector r1 = hard_threshold(g1, 2);
  CHECK(r1[0] == 3.0);
  CHECK(r1[1] == 0.0);
  CHECK(r1[2] == 2.0);
  CHECK(r1[3] == 0.0);

  Eigen::VectorXd g2(3);
  g2 << 1, 1, 0;
  const CoefVector r2 = hard_threshold(g2, 1);
  CHECK(r2[0] == 1.0);
  CHECK(r2[1] == 0.0);
  CHECK(r2[2] == 0.0);

  CHECK_THROWS_AS(hard_threshold(g2, 0), ConfigError);
  CHECK_THROWS_AS(hard_threshold(g2, 4), ConfigError);
}

TEST_CASE("hard_threshold matches a full sort oracle") {
  Rng rng(24);
  Eigen::VectorXd g(50);
  for (int j = 0; j < 50; ++j) g[j] = rng.normal();
  const int k = 7;
  const CoefVector r = hard_threshold(g, k);

  std::vector<int> idx(50);
  for (int j = 0; j < 50; ++j) idx[j] = j;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(g[a]) != std::abs(g[b]) ? std::abs(g[a]) > std::abs(g[b])
                                            : a < b;
  });
  std::vector<int> expect(idx.begin(), idx.begin() + k);
  std::sort(expect.begin(), expect.end());
  CHECK(r.support() == expect);
  for (int j : expect) CHECK(r[j] == g[j]);
  CHECK(r.nnz() == k);
}

TEST_CASE("diht_step: fixed point, vanishing step, orthonormal closed form") {
  Rng rng(25);
  const GlmFamily fam{Family::Gaussian};
  const int n = 32, p = 8, k = 3;
  DataShard shard;
  shard.X = test::orthonormal_design(rng, n, p);
  Eigen::VectorXd bstar = Eigen::VectorXd::Zero(p);
  bstar[1] = 1.0;
  bstar[4] = -2.0;
  shard.y = shard.X * bstar;  // zero gradient at bstar exactly

  ClusterSpec cluster({shard});
  const SurrogateState state = make_state(cluster, fam, CoefVector::zeros(p));

  // gradient-zero fixed point with sparse beta
  const CoefVector stay = diht_step(state, CoefVector(bstar), 1.0, k, fam);
  CHECK((stay.values() - bstar).lpNorm<Eigen::Infinity>() == 0.0);

  // vanishing step: support reduces to hard_threshold of beta itself
  Eigen::VectorXd bt(p);
  for (int j = 0; j < p; ++j) bt[j] = rng.normal();
  const CoefVector tiny = diht_step(state, CoefVector(bt), 1e12, k, fam);
  CHECK(tiny.support() == hard_threshold(bt, k).support());

  // orthonormal design from zero with unit step: threshold of X'y/n
  shard.y = shard.X * bstar;
  for (int i = 0; i < n; ++i) shard.y[i] += 0.1 * rng.normal();
  ClusterSpec c2({shard});
  const SurrogateState s2 = make_state(c2, fam, CoefVector::zeros(p));
  const CoefVector step = diht_step(s2, CoefVector::zeros(p), 1.0, k, fam);
  const Eigen::VectorXd z = shard.X.transpose() * shard.y / n;
  const CoefVector expect = hard_threshold(z, k);
  CHECK(step.support() == expect.support());
  for (int j : expect.support()) {
    CHECK(step[j] == doctest::Approx(expect[j]).epsilon(1e-12));
  }
}

TEST_CASE("diht_run recovers a strong-signal support (enumeration oracle)") {
  Rng rng(26);
  const GlmFamily fam{Family::Gaussian};
  const int n = 200, p = 20, q = 2;
  Eigen::VectorXd bstar = Eigen::VectorXd::Zero(p);
  bstar[2] = 3.0;
  bstar[11] = -2.5;
  DataShard shard = test::random_shard(rng, n, p, fam, bstar);
  ClusterSpec cluster({shard});

  LassoConfig lcfg;
  const LassoResult lres = lasso_fit(shard, fam, lcfg);
  const SurrogateState state = make_state(cluster, fam, lres.beta);

  DihtConfig cfg;
  cfg.k = q;
  const ScreeningRun run = diht_run(state, cfg, fam, state.beta_tilde);
  CHECK(run.converged);
  CHECK(run.support == std::vector<int>{2, 11});

  // exhaustive best-subset enumeration confirms the same support
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_support;
  test::for_each_subset(p, q, [&](const std::vector<int>& s) {
    const Eigen::VectorXd fit = test::restricted_minimizer(state, s, fam);
    const double loss = surrogate_loss(state, CoefVector(fit), fam);
    if (loss < best) {
      best = loss;
      best_support = s;
    }
  });
  CHECK(best_support == run.support);
}

TEST_CASE("k = p converges to the unrestricted minimizer") {
  Rng rng(27);
  const GlmFamily fam{Family::Bernoulli};
  Eigen::VectorXd bstar = Eigen::VectorXd::Zero(6);
  bstar[0] = 1.0;
  bstar[3] = -1.5;
  DataShard shard = test::random_shard(rng, 300, 6, fam, bstar);
  ClusterSpec cluster({shard});
  const SurrogateState state = make_state(cluster, fam, CoefVector::zeros(6));

  DihtConfig cfg;
  cfg.k = 6;
  cfg.max_iter = 5000;
  const ScreeningRun run = diht_run(state, cfg, fam, CoefVector::zeros(6));
  CHECK(run.converged);
  CHECK(surrogate_gradient(state, run.beta, fam).norm() <= 1e-4);
}

TEST_CASE("max_iter = 0 returns beta0 unchanged and non-converged") {
  Rng rng(28);
  const GlmFamily fam{Family::Gaussian};
  DataShard shard = test::random_shard(rng, 20, 4, fam);
  ClusterSpec cluster({shard});
  const SurrogateState state = make_state(cluster, fam, CoefVector::zeros(4));
  Eigen::VectorXd b0(4);
  b0 << 0.5, 0, -1, 0;
  DihtConfig cfg;
  cfg.k = 2;
  cfg.max_iter = 0;
  const ScreeningRun run = diht_run(state, cfg, fam, CoefVector(b0));
  CHECK(!run.converged);
  CHECK(run.iterations == 0);
  CHECK((run.beta.values() - b0).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("accepted losses never increase and iterates stay k-sparse") {
  Rng rng(29);
  const Family kinds[] = {Family::Gaussian, Family::Bernoulli,
                          Family::Poisson};
  for (int trial = 0; trial < 12; ++trial) {
    const GlmFamily fam{kinds[trial % 3]};
    const int p = 10 + int(rng.uniform() * 20);
    const int m = 1 + int(rng.uniform() * 3);
    const int n_per = 30 + int(rng.uniform() * 40);
    Eigen::VectorXd bstar = Eigen::VectorXd::Zero(p);
    bstar[0] = 0.6;
    bstar[3] = -0.4;
    DataShard pooled = test::random_shard(rng, n_per * m, p, fam, bstar);
    ClusterSpec cluster(partition(pooled, m));
    LassoConfig lcfg;
    const LassoResult lres = lasso_fit(cluster.shard(0), fam, lcfg);
    const SurrogateState state = make_state(cluster, fam, lres.beta);
    DihtConfig cfg;
    cfg.k = 1 + int(rng.uniform() * 6);
    const ScreeningRun run = diht_run(state, cfg, fam, state.beta_tilde);
    for (std::size_t i = 1; i < run.log.records.size(); ++i) {
      CHECK(run.log.records[i].loss <= run.log.records[i - 1].loss + 1e-12);
      CHECK(int(run.log.records[i].support.size()) <= cfg.k);
    }
  }
}

TEST_CASE("static step bound wards off doubling (Gaussian and Bernoulli)") {
  Rng rng(30);
  for (int trial = 0; trial < 10; ++trial) {
    const GlmFamily fam{trial % 2 == 0 ? Family::Gaussian
                                       : Family::Bernoulli};
    const int p = 15;
    Eigen::VectorXd bstar = Eigen::VectorXd::Zero(p);
    bstar[1] = 1.2;
    bstar[7] = -0.9;
    DataShard pooled = test::random_shard(rng, 120, p, fam, bstar);
    ClusterSpec cluster(partition(pooled, 2));
    LassoConfig lcfg;
    const LassoResult lres = lasso_fit(cluster.shard(0), fam, lcfg);
    const SurrogateState state = make_state(cluster, fam, lres.beta);
    DihtConfig cfg;
    cfg.k = 4;
    cfg.vartheta0 = static_vartheta(cluster.shard(0), fam);
    const ScreeningRun run = diht_run(state, cfg, fam, state.beta_tilde);
    CHECK(run.log.doubling_events == 0);
  }
}

TEST_CASE("termination count obeys the telescoping bound") {
  Rng rng(31);
  const GlmFamily fam{Family::Gaussian};
  const int p = 12;
  Eigen::VectorXd bstar = Eigen::VectorXd::Zero(p);
  bstar[0] = 2.0;
  bstar[5] = -1.0;
  DataShard shard = test::random_shard(rng, 100, p, fam, bstar);
  ClusterSpec cluster({shard});
  const SurrogateState state = make_state(cluster, fam, CoefVector::zeros(p));

  const double bound_rate = static_vartheta(shard, fam);  // rho1 mu / n
  DihtConfig cfg;
  cfg.k = 4;
  cfg.vartheta0 = 2.0 * bound_rate;
  cfg.epsilon = 1e-6;
  const ScreeningRun run = diht_run(state, cfg, fam, CoefVector::zeros(p));
  REQUIRE(run.converged);

  long big_steps = 0;
  for (std::size_t i = 1; i < run.log.records.size(); ++i) {
    if (run.log.records[i].step_norm > cfg.epsilon) ++big_steps;
  }
  const double l0 = run.log.records.front().loss;
  const double lf = run.log.records.back().loss;
  const double rhs =
      2.0 * (l0 - lf) / (cfg.epsilon * cfg.epsilon * (cfg.vartheta0 - bound_rate));
  CHECK(double(big_steps) <= rhs + 1.0);
}

TEST_CASE("the accepted map is deterministic at a fixed point") {
  Rng rng(32);
  const GlmFamily fam{Family::Gaussian};
  DataShard shard = test::random_shard(rng, 50, 8, fam);
  ClusterSpec cluster({shard});
  const SurrogateState state = make_state(cluster, fam, CoefVector::zeros(8));
  DihtConfig cfg;
  cfg.k = 3;
  cfg.max_iter = 2000;
  cfg.epsilon = 1e-14;
  const ScreeningRun run = diht_run(state, cfg, fam, CoefVector::zeros(8));
  if (run.converged && run.log.records.back().step_norm == 0.0) {
    const double vt = run.log.records.back().vartheta;
    const CoefVector again = diht_step(state, run.beta, vt, cfg.k, fam);
    CHECK((again.values() - run.beta.values()).lpNorm<Eigen::Infinity>() ==
          0.0);
  }
}

TEST_CASE("iteration log serializes to JSON lines") {
  IterationLog log;
  log.records.push_back({0, 0.5, 1.0, {0, 2}, 0.0, 0});
  log.records.push_back({1, 0.25, 2.0, {2}, 0.7071, 1});
  const std::string jsonl = to_json_lines(log);
  CHECK(jsonl.find("\"t\":0") != std::string::npos);
  CHECK(jsonl.find("\"support\":[1,3]") != std::string::npos);
  CHECK(jsonl.find("\"doublings\":1") != std::string::npos);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 2);
}

TEST_CASE("communication rounds stay at one per run") {
  Rng rng(33);
  const GlmFamily fam{Family::Gaussian};
  DataShard pooled = test::random_shard(rng, 60, 5, fam);
  ClusterSpec cluster(partition(pooled, 3));
  const SurrogateState state = make_state(cluster, fam, CoefVector::zeros(5));
  DihtConfig cfg;
  cfg.k = 2;
  const ScreeningRun run = diht_run(state, cfg, fam, CoefVector::zeros(5));
  CHECK(communication_rounds(run) == 1);
  CHECK(cluster.stats().rounds == 1);

  ClusterSpec solo({pooled});
  const SurrogateState s1 = make_state(solo, fam, CoefVector::zeros(5));
  const ScreeningRun r1 = diht_run(s1, cfg, fam, CoefVector::zeros(5));
  CHECK(communication_rounds(r1) == 1);  // logical round, zero messages
  CHECK(solo.stats().broadcasts == 0);
}

TEST_SUITE_END();
