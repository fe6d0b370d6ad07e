#include <doctest.h>

#include <cmath>
#include <limits>

#include "dvs/glm.hpp"
#include "dvs/rng.hpp"
#include "support/test_util.hpp"

using namespace dvs;

namespace {

DataShard single_obs(double x, double y) {
  DataShard s;
  s.X.resize(1, 1);
  s.X(0, 0) = x;
  s.y.resize(1);
  s.y[0] = y;
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("glm");

TEST_CASE("cumulant values per family") {
  CHECK(GlmFamily{Family::Gaussian}.cumulant(0.0) == 0.0);
  CHECK(GlmFamily{Family::Bernoulli}.cumulant(0.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(GlmFamily{Family::Poisson}.cumulant(1.0) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("cumulant rejects bad theta") {
  const GlmFamily pois{Family::Poisson};
  CHECK_THROWS_AS(pois.cumulant(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
  CHECK_THROWS_AS(GlmFamily{Family::Gaussian}.cumulant(
                      std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(pois.cumulant(kPoissonThetaCap + 1.0), std::overflow_error);
  CHECK_NOTHROW(pois.cumulant(kPoissonThetaCap));
  // large thetas are fine for the bounded families
  CHECK(GlmFamily{Family::Bernoulli}.cumulant(800.0) ==
        doctest::Approx(800.0));
}

TEST_CASE("mean is monotone and variance nonnegative on a grid") {
  for (Family kind : {Family::Gaussian, Family::Bernoulli, Family::Poisson}) {
    const GlmFamily fam{kind};
    double prev = -std::numeric_limits<double>::infinity();
    for (double t = -20.0; t <= 20.0; t += 0.25) {
      const double m = fam.mean(t);
      CHECK(m >= prev);
      CHECK(fam.variance(t) >= 0.0);
      prev = m;
    }
  }
}

TEST_CASE("curvature bounds") {
  CHECK(curvature_bound(GlmFamily{Family::Gaussian}) == 1.0);
  CHECK(curvature_bound(GlmFamily{Family::Bernoulli}) == 0.25);
  CHECK_THROWS_AS(curvature_bound(GlmFamily{Family::Poisson}), ConfigError);
  Eigen::VectorXd thetas(3);
  thetas << -1.0, 0.5, 2.0;
  CHECK(curvature_bound(GlmFamily{Family::Poisson}, thetas) ==
        doctest::Approx(std::exp(2.0)));
}

TEST_CASE("local_loss single-observation values") {
  CHECK(local_loss(single_obs(1.0, 0.0), CoefVector::zeros(1),
                   GlmFamily{Family::Bernoulli}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(local_loss(single_obs(1.0, 2.0),
                   CoefVector(Eigen::VectorXd::Constant(1, 2.0)),
                   GlmFamily{Family::Gaussian}) == doctest::Approx(-2.0));
}

TEST_CASE("local_loss matches per-observation summation oracle") {
  Rng rng(20240517);
  const GlmFamily fam{Family::Bernoulli};
  DataShard shard = test::random_shard(rng, 20, 5, fam);
  Eigen::VectorXd beta(5);
  for (int j = 0; j < 5; ++j) beta[j] = rng.normal();

  double naive = 0.0;
  for (int i = 0; i < shard.n(); ++i) {
    double theta = 0.0;
    for (int j = 0; j < shard.p(); ++j) theta += shard.X(i, j) * beta[j];
    naive += std::log(1.0 + std::exp(theta)) - theta * shard.y[i];
  }
  naive /= shard.n();

  CHECK(local_loss(shard, CoefVector(beta), fam) ==
        doctest::Approx(naive).epsilon(1e-12));
}

TEST_CASE("dimension mismatch raises ShapeError") {
  Rng rng(7);
  DataShard shard = test::random_shard(rng, 5, 3, GlmFamily{Family::Gaussian});
  CHECK_THROWS_AS(
      local_loss(shard, CoefVector::zeros(4), GlmFamily{Family::Gaussian}),
      ShapeError);
  CHECK_THROWS_AS(local_gradient(shard, CoefVector::zeros(2),
                                 GlmFamily{Family::Gaussian}),
                  ShapeError);
  CHECK_THROWS_AS(
      local_hessian_quadform(shard, CoefVector::zeros(3),
                             Eigen::VectorXd::Zero(5),
                             GlmFamily{Family::Gaussian}),
      ShapeError);
}

TEST_CASE("gradient of balanced Bernoulli column is zero") {
  DataShard shard;
  shard.X = Eigen::MatrixXd::Ones(2, 1);
  shard.y.resize(2);
  shard.y << 0.0, 1.0;
  const Eigen::VectorXd g =
      local_gradient(shard, CoefVector::zeros(1), GlmFamily{Family::Bernoulli});
  CHECK(g[0] == 0.0);
}

TEST_CASE("gradient vanishes at the least-squares solution") {
  Rng rng(99);
  DataShard shard =
      test::random_shard(rng, 40, 6, GlmFamily{Family::Gaussian});
  const Eigen::VectorXd beta =
      (shard.X.transpose() * shard.X)
          .ldlt()
          .solve(shard.X.transpose() * shard.y);
  const Eigen::VectorXd g =
      local_gradient(shard, CoefVector(beta), GlmFamily{Family::Gaussian});
  CHECK(g.lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("gradient matches finite differences per family") {
  Rng rng(321);
  for (Family kind : {Family::Gaussian, Family::Bernoulli, Family::Poisson}) {
    const GlmFamily fam{kind};
    DataShard shard = test::random_shard(rng, 25, 4, fam);
    Eigen::VectorXd beta(4), u(4);
    for (int j = 0; j < 4; ++j) beta[j] = 0.3 * rng.normal();
    for (int j = 0; j < 4; ++j) u[j] = rng.normal();
    u.normalize();
    auto f = [&](const Eigen::VectorXd& b) {
      return local_loss(shard, CoefVector(b), fam);
    };
    const double fd = test::directional_fd(f, beta, u);
    const double an = local_gradient(shard, CoefVector(beta), fam).dot(u);
    CHECK(fd == doctest::Approx(an).epsilon(1e-5));
  }
}

TEST_CASE("directional derivative property, 100 randomized trials") {
  Rng rng(5150);
  const Family kinds[] = {Family::Gaussian, Family::Bernoulli,
                          Family::Poisson};
  for (int trial = 0; trial < 100; ++trial) {
    const GlmFamily fam{kinds[trial % 3]};
    const int n = 10 + int(rng.uniform() * 40);
    const int p = 2 + int(rng.uniform() * 6);
    DataShard shard = test::random_shard(rng, n, p, fam);
    Eigen::VectorXd beta(p), u(p);
    for (int j = 0; j < p; ++j) beta[j] = 0.2 * rng.normal();
    for (int j = 0; j < p; ++j) u[j] = rng.normal();
    u.normalize();
    auto f = [&](const Eigen::VectorXd& b) {
      return local_loss(shard, CoefVector(b), fam);
    };
    const double fd = test::directional_fd(f, beta, u);
    const double an = local_gradient(shard, CoefVector(beta), fam).dot(u);
    CHECK(std::abs(fd - an) <=
          1e-5 * std::max({1.0, std::abs(fd), std::abs(an)}));
  }
}

TEST_CASE("hessian quadform: zero direction, Gaussian identity, oracle") {
  Rng rng(42);
  const GlmFamily gau{Family::Gaussian};
  DataShard shard = test::random_shard(rng, 30, 5, gau);
  const CoefVector beta = CoefVector::zeros(5);

  CHECK(local_hessian_quadform(shard, beta, Eigen::VectorXd::Zero(5), gau) ==
        0.0);

  Eigen::VectorXd v(5);
  for (int j = 0; j < 5; ++j) v[j] = rng.normal();
  CHECK(local_hessian_quadform(shard, beta, v, gau) ==
        doctest::Approx((shard.X * v).squaredNorm() / shard.n())
            .epsilon(1e-12));

  const GlmFamily ber{Family::Bernoulli};
  DataShard bshard = test::random_shard(rng, 25, 5, ber);
  Eigen::VectorXd b(5);
  for (int j = 0; j < 5; ++j) b[j] = 0.5 * rng.normal();
  const Eigen::MatrixXd H = test::dense_local_hessian(bshard, b, ber);
  const double direct = v.dot(H * v);
  CHECK(local_hessian_quadform(bshard, CoefVector(b), v, ber) ==
        doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("hessian quadform is nonnegative") {
  Rng rng(1234);
  const Family kinds[] = {Family::Gaussian, Family::Bernoulli,
                          Family::Poisson};
  for (int trial = 0; trial < 30; ++trial) {
    const GlmFamily fam{kinds[trial % 3]};
    DataShard shard = test::random_shard(rng, 15, 4, fam);
    Eigen::VectorXd beta(4), v(4);
    for (int j = 0; j < 4; ++j) beta[j] = 0.2 * rng.normal();
    for (int j = 0; j < 4; ++j) v[j] = rng.normal();
    CHECK(local_hessian_quadform(shard, CoefVector(beta), v, fam) >= 0.0);
  }
}

TEST_CASE("loss is convex along random segments") {
  Rng rng(777);
  const Family kinds[] = {Family::Gaussian, Family::Bernoulli,
                          Family::Poisson};
  for (int trial = 0; trial < 100; ++trial) {
    const GlmFamily fam{kinds[trial % 3]};
    DataShard shard = test::random_shard(rng, 12, 3, fam);
    Eigen::VectorXd a(3), b(3);
    for (int j = 0; j < 3; ++j) a[j] = 0.3 * rng.normal();
    for (int j = 0; j < 3; ++j) b[j] = 0.3 * rng.normal();
    const double fa = local_loss(shard, CoefVector(a), fam);
    const double fb = local_loss(shard, CoefVector(b), fam);
    const double fm = local_loss(shard, CoefVector((a + b) / 2.0), fam);
    CHECK(fm <= 0.5 * fa + 0.5 * fb + 1e-12);
  }
}

TEST_CASE("shard validation checks responses per family") {
  DataShard s;
  s.X = Eigen::MatrixXd::Ones(3, 2);
  s.y.resize(3);
  s.y << 0.0, 1.0, 2.0;
  CHECK_NOTHROW(validate_shard(s, GlmFamily{Family::Gaussian}));
  CHECK_NOTHROW(validate_shard(s, GlmFamily{Family::Poisson}));
  CHECK_THROWS_AS(validate_shard(s, GlmFamily{Family::Bernoulli}), DataError);
  s.y << 0.0, 1.0, -1.0;
  CHECK_THROWS_AS(validate_shard(s, GlmFamily{Family::Poisson}), DataError);
  s.y << 0.0, 1.5, 1.0;
  CHECK_THROWS_AS(validate_shard(s, GlmFamily{Family::Poisson}), DataError);
}

TEST_SUITE_END();
