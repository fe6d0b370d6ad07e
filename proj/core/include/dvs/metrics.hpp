#pragma once

#include <string>
#include <vector>

#include "dvs/screening.hpp"
#include "dvs/simgen.hpp"

namespace dvs {

// SC/PSR/FDR/AMS/CF over T Monte Carlo replications. An empty selection
// contributes 0 to the FDR sum (0/0 := 0).
struct ReplicationReport {
  std::string method;
  int T = 0;         // replications included
  int failures = 0;  // replications excluded after a method failure
  double sc = 0.0;
  double psr = 0.0;
  double fdr = 0.0;
  double ams = 0.0;
  double cf = 0.0;
};

ReplicationReport compute_metrics(const std::string& method,
                                  const std::vector<std::vector<int>>& selected,
                                  const std::vector<int>& truth);

inline const std::vector<std::string> kCampaignMethods = {
    "dvs", "pearson", "kendall", "sirs", "dcor"};

struct CampaignConfig {
  ScenarioSpec scenario;  // scenario.seed is the campaign base seed
  std::vector<std::string> methods = {"dvs"};
  int T = 1;
  // Baseline model size. 0 reports each baseline at d = ceil(N / ln N)
  // and, when DVS runs too, at the per-replication DVS model size.
  int baseline_d = 0;
  ScreeningOptions screening;
  int jobs = 1;
};

struct CampaignResult {
  std::vector<ReplicationReport> reports;
};

// Replication t uses dataset seed base + t; each replication is fully
// independent, so reports are identical for any jobs value. Per-
// replication method failures are counted and excluded, not fatal.
CampaignResult run_campaign(const CampaignConfig& cfg);

}  // namespace dvs
