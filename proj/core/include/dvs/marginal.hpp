#pragma once

#include <string>
#include <vector>

#include "dvs/cluster.hpp"
#include "dvs/glm.hpp"

namespace dvs {

enum class MarginalMethod { Pearson, Kendall, Sirs, Dcor };

std::string marginal_method_name(MarginalMethod m);

// Per-covariate association utilities between column j and the response.
// Degenerate (zero-variance) columns score 0.
double pearson_utility(const DataShard& shard, int j);
// Kendall tau-a, (concordant - discordant) / (n(n-1)/2); ties shrink |tau|.
double kendall_utility(const DataShard& shard, int j);
// Mean squared indicator-weighted average of the standardized column.
double sirs_utility(const DataShard& shard, int j);
// Sample distance correlation (V-statistic), in [0, 1].
double dcor_utility(const DataShard& shard, int j);

double marginal_utility(MarginalMethod m, const DataShard& shard, int j);

struct MarginalUtility {
  MarginalMethod method = MarginalMethod::Pearson;
  Eigen::VectorXd scores;            // aggregated across machines
  std::vector<int> ranking;          // covariates by descending |score|
  std::vector<int> degenerate_cols;  // zero-variance on some machine
};

struct MarginalSelection {
  MarginalUtility utility;
  std::vector<int> selected;  // top-d indices, ascending
};

// Per machine compute the p utilities, average them unweighted across
// machines, rank by |score| descending (ties to the smaller index) and
// keep the top d.
MarginalSelection aggregate_and_rank(const ClusterSpec& cluster,
                                     MarginalMethod method, int d);

}  // namespace dvs
