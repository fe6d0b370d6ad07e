#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dvs/glm.hpp"
#include "dvs/types.hpp"

namespace dvs {

// The six synthetic designs. Linear11 hides covariate 1 behind a shared
// factor so its marginal correlation with y is far weaker than that of
// the inactive covariates; Linear12/Logistic22/Poisson22 draw a per-
// machine AR(1) correlation level from U(0.2, 0.3).
enum class Scenario {
  Linear11,
  Linear12,
  Logistic21,
  Logistic22,
  Poisson21,
  Poisson22,
};

Scenario parse_scenario(const std::string& label);  // "1.1" .. "3.2"
std::string scenario_label(Scenario s);

GlmFamily scenario_family(Scenario s);
CoefVector scenario_truth(Scenario s, int p);

struct ScenarioSpec {
  Scenario example = Scenario::Linear11;
  long N = 0;
  int p = 0;
  int m = 1;
  std::uint64_t seed = 0;
};

struct GeneratedDataset {
  std::vector<DataShard> shards;
  CoefVector truth;
  std::vector<int> support;
};

// Pre-sharded dataset with known truth; shard i consumes PRNG substream i
// so regeneration with the same seed is bit-identical for any m-parallel
// schedule. N must divide by m and p must be >= 6.
GeneratedDataset generate(const ScenarioSpec& spec);

// Lower-triangular L with L L' = (upsilon^|s-t|). Requires |upsilon| < 1.
Eigen::MatrixXd ar1_cholesky(int p, double upsilon);

}  // namespace dvs
