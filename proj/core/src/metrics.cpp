#include "dvs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <set>

#include "dvs/marginal.hpp"

namespace dvs {

ReplicationReport compute_metrics(const std::string& method,
                                  const std::vector<std::vector<int>>& selected,
                                  const std::vector<int>& truth) {
  if (selected.empty()) throw ConfigError("metrics: need T >= 1");
  if (truth.empty()) throw ConfigError("metrics: empty true support");

  const std::set<int> s_star(truth.begin(), truth.end());
  const int T = static_cast<int>(selected.size());

  long contain = 0, exact = 0, size_sum = 0, hit_sum = 0;
  double fdr_sum = 0.0;
  for (const auto& raw : selected) {
    std::set<int> s(raw.begin(), raw.end());
    long hits = 0;
    for (int j : s_star) hits += s.count(j);
    const bool contains = hits == long(s_star.size());
    contain += contains;
    exact += contains && s.size() == s_star.size();
    hit_sum += hits;
    size_sum += long(s.size());
    if (!s.empty()) {
      fdr_sum += double(long(s.size()) - hits) / double(s.size());
    }
  }

  ReplicationReport r;
  r.method = method;
  r.T = T;
  r.sc = double(contain) / T;
  r.psr = double(hit_sum) / (double(T) * double(s_star.size()));
  r.fdr = fdr_sum / T;
  r.ams = double(size_sum) / T;
  r.cf = double(exact) / T;
  return r;
}

namespace {

struct RepOutcome {
  // selections[row_label] for this replication; nullopt = method failed
  std::vector<std::optional<std::vector<int>>> selections;
};

MarginalMethod parse_marginal(const std::string& name) {
  if (name == "pearson") return MarginalMethod::Pearson;
  if (name == "kendall") return MarginalMethod::Kendall;
  if (name == "sirs") return MarginalMethod::Sirs;
  return MarginalMethod::Dcor;
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& cfg) {
  if (cfg.T < 1) throw ConfigError("campaign: T must be >= 1");
  for (const auto& mth : cfg.methods) {
    if (std::find(kCampaignMethods.begin(), kCampaignMethods.end(), mth) ==
        kCampaignMethods.end()) {
      std::string valid;
      for (const auto& v : kCampaignMethods) valid += (valid.empty() ? "" : ", ") + v;
      throw ConfigError("campaign: unknown method '" + mth +
                        "' (valid: " + valid + ")");
    }
  }

  const bool with_dvs = std::find(cfg.methods.begin(), cfg.methods.end(),
                                  "dvs") != cfg.methods.end();
  const int d_rate = static_cast<int>(std::min<double>(
      cfg.scenario.p,
      std::ceil(double(cfg.scenario.N) / std::log(double(cfg.scenario.N)))));

  // One report row per method variant, in a stable order.
  struct Row {
    std::string label;
    std::string method;  // "" = dvs
    int d = 0;           // 0 = per-replication DVS size
  };
  std::vector<Row> rows;
  for (const auto& mth : cfg.methods) {
    if (mth == "dvs") {
      rows.push_back({"dvs", "", -1});
    } else if (cfg.baseline_d > 0) {
      rows.push_back({mth, mth, cfg.baseline_d});
    } else {
      rows.push_back({mth + "[d=" + std::to_string(d_rate) + "]", mth, d_rate});
      if (with_dvs) rows.push_back({mth + "[d=dvs]", mth, 0});
    }
  }

  auto run_replication = [&](int t) {
    ScenarioSpec spec = cfg.scenario;
    spec.seed = cfg.scenario.seed + std::uint64_t(t);
    GeneratedDataset data = generate(spec);
    const GlmFamily family = scenario_family(spec.example);
    ClusterSpec cluster(std::move(data.shards), Transport::InProcess);

    RepOutcome out;
    out.selections.resize(rows.size());

    std::optional<std::vector<int>> dvs_support;
    if (with_dvs) {
      try {
        ScreeningOptions opts = cfg.screening;
        opts.jobs = 1;  // parallelism lives at the replication level
        dvs_support = run_screening(cluster, family, opts).run.support;
      } catch (const std::exception&) {
        dvs_support = std::nullopt;
      }
    }

    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].method.empty()) {
        out.selections[r] = dvs_support;
        continue;
      }
      int d = rows[r].d;
      if (d == 0) {  // track the DVS model size of this replication
        if (!dvs_support) continue;
        d = std::max<int>(1, static_cast<int>(dvs_support->size()));
      }
      try {
        out.selections[r] =
            aggregate_and_rank(cluster, parse_marginal(rows[r].method), d)
                .selected;
      } catch (const std::exception&) {
        out.selections[r] = std::nullopt;
      }
    }
    return out;
  };

  std::vector<RepOutcome> outcomes(cfg.T);
  if (cfg.jobs <= 1) {
    for (int t = 1; t <= cfg.T; ++t) outcomes[t - 1] = run_replication(t);
  } else {
    for (int start = 1; start <= cfg.T; start += cfg.jobs) {
      const int end = std::min(cfg.T, start + cfg.jobs - 1);
      std::vector<std::future<RepOutcome>> batch;
      for (int t = start; t <= end; ++t) {
        batch.push_back(std::async(std::launch::async, run_replication, t));
      }
      for (int t = start; t <= end; ++t) {
        outcomes[t - 1] = batch[t - start].get();
      }
    }
  }

  const std::vector<int> truth =
      scenario_truth(cfg.scenario.example, cfg.scenario.p).support();

  CampaignResult result;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::vector<int>> sets;
    int failures = 0;
    for (const auto& o : outcomes) {
      if (o.selections[r]) {
        sets.push_back(*o.selections[r]);
      } else {
        ++failures;
      }
    }
    ReplicationReport rep =
        sets.empty() ? ReplicationReport{rows[r].label, 0, 0, 0, 0, 0, 0, 0}
                     : compute_metrics(rows[r].label, sets, truth);
    rep.failures = failures;
    result.reports.push_back(std::move(rep));
  }
  return result;
}

}  // namespace dvs
