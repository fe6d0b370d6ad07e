// dvs: distributed variable screening for generalized linear models.
// Subcommands: simulate (synthetic sharded datasets), screen (one
// screening run over sharded data), bench (Monte Carlo method comparison).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dvs/cluster.hpp"
#include "dvs/diht.hpp"
#include "dvs/io.hpp"
#include "dvs/lasso.hpp"
#include "dvs/metrics.hpp"
#include "dvs/model_select.hpp"
#include "dvs/screening.hpp"
#include "dvs/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

// Config-file support: values fill any option the user did not pass
// explicitly; explicit flags always win. A result JSON is accepted too
// (its "config" object is used), so outputs round-trip back in.
class ConfigBinder {
 public:
  template <typename T>
  void bind(CLI::Option* opt, T& var, const std::string& key) {
    appliers_.push_back([opt, &var, key](const json& j) {
      if (opt->count() == 0 && j.contains(key)) {
        var = j.at(key).get<T>();
      }
    });
  }
  void apply(const json& j) const {
    for (const auto& f : appliers_) f(j);
  }

 private:
  std::vector<std::function<void(const json&)>> appliers_;
};

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dvs::IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw dvs::ConfigError("config '" + path + "': " + e.what());
  }
  if (j.contains("config")) j = j.at("config");
  if (!j.is_object()) throw dvs::ConfigError("config must be a JSON object");
  return j;
}

dvs::GlmFamily parse_family(const std::string& name) {
  if (name == "gaussian") return {dvs::Family::Gaussian};
  if (name == "logistic") return {dvs::Family::Bernoulli};
  if (name == "poisson") return {dvs::Family::Poisson};
  throw dvs::ConfigError("unknown family '" + name +
                         "' (expected gaussian, logistic or poisson)");
}

std::string family_flag_name(dvs::Family kind) {
  switch (kind) {
    case dvs::Family::Gaussian:
      return "gaussian";
    case dvs::Family::Bernoulli:
      return "logistic";
    case dvs::Family::Poisson:
      return "poisson";
  }
  return "?";
}

std::optional<double> parse_lambda(const std::string& s) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    if (v < 0) throw dvs::ConfigError("lambda must be >= 0");
    return v;
  } catch (const std::invalid_argument&) {
    throw dvs::ConfigError("--lambda expects a number or 'auto', got '" + s +
                           "'");
  }
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string tok =
        s.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) out.push_back(tok);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

json support_to_json(const std::vector<int>& support) {
  json arr = json::array();
  for (int j : support) arr.push_back(j + 1);  // 1-based outside
  return arr;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string example;
  long N = 0;
  int p = 0;
  int m = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  std::string config;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.example.empty() || a.out.empty() || a.N <= 0 || a.p <= 0) {
    throw dvs::ConfigError(
        "simulate requires --example, --N, --p and --out");
  }
  if (a.format != "csv" && a.format != "bin") {
    throw dvs::ConfigError("--format must be csv or bin");
  }
  dvs::ScenarioSpec spec;
  spec.example = dvs::parse_scenario(a.example);
  spec.N = a.N;
  spec.p = a.p;
  spec.m = a.m;
  spec.seed = a.seed;
  const dvs::GeneratedDataset data = dvs::generate(spec);

  fs::create_directories(a.out);
  if (a.format == "csv") {
    char name[32];
    for (int i = 0; i < a.m; ++i) {
      std::snprintf(name, sizeof name, "shard_%04d.csv", i);
      dvs::write_csv_shard((fs::path(a.out) / name).string(), data.shards[i]);
    }
  } else {
    dvs::write_binary_cache((fs::path(a.out) / "data.bin").string(),
                            dvs::scenario_family(spec.example).kind,
                            data.shards);
  }
  dvs::write_truth_json((fs::path(a.out) / "truth.json").string(), data.truth);

  std::cout << "wrote " << (a.format == "csv" ? a.m : 1) << " "
            << a.format << " shard file(s) + truth.json to " << a.out << "\n";
  return 0;
}

// ---- screen ---------------------------------------------------------------

struct ScreenArgs {
  std::string data;
  int m = 1;
  std::string family;
  std::string lambda = "auto";
  int k = 0;
  int k_max = 0;
  double epsilon = 1e-6;
  int max_iter = 500;
  double vartheta0 = 1.0;
  double lasso_tol = 1e-7;
  int lasso_max_iter = 1000;
  std::string trace;
  std::string out;
  std::string transport = "inprocess";
  bool header = false;
  std::int64_t shuffle_seed = -1;
  std::string standardize = "auto";  // on | off | auto
  int jobs = 0;
  std::string config;
};

json screen_config_json(const ScreenArgs& a) {
  return json{{"data", a.data},
              {"m", a.m},
              {"family", a.family},
              {"lambda", a.lambda},
              {"k", a.k},
              {"k-max", a.k_max},
              {"epsilon", a.epsilon},
              {"max-iter", a.max_iter},
              {"vartheta0", a.vartheta0},
              {"lasso-tol", a.lasso_tol},
              {"lasso-max-iter", a.lasso_max_iter},
              {"trace", a.trace},
              {"out", a.out},
              {"transport", a.transport},
              {"header", a.header},
              {"shuffle-seed", a.shuffle_seed},
              {"standardize", a.standardize},
              {"jobs", a.jobs}};
}

struct LoadedData {
  std::vector<dvs::DataShard> shards;
  std::optional<dvs::Family> cache_family;
  bool from_binary_cache = false;
};

LoadedData load_screen_data(const ScreenArgs& a) {
  LoadedData out;
  if (fs::is_directory(a.data)) {
    out.shards = dvs::read_shard_dir(a.data, a.header);
  } else if (!fs::exists(a.data)) {
    throw dvs::IoError("cannot open '" + a.data + "'");
  } else if (dvs::is_binary_cache(a.data)) {
    dvs::BinaryCache cache = dvs::read_binary_cache(a.data);
    out.shards = std::move(cache.shards);
    out.cache_family = cache.family.kind;
    out.from_binary_cache = true;
  } else {
    const dvs::DataShard pooled = dvs::read_csv_shard(a.data, 0, a.header);
    std::optional<std::uint64_t> shuffle;
    if (a.shuffle_seed >= 0) shuffle = std::uint64_t(a.shuffle_seed);
    out.shards = dvs::split_rows(pooled.X, pooled.y, a.m, shuffle);
  }
  return out;
}

int cmd_screen(const ScreenArgs& a) {
  if (a.data.empty()) throw dvs::ConfigError("screen requires --data");
  if (a.transport != "inprocess" && a.transport != "tcp") {
    throw dvs::ConfigError("--transport must be inprocess or tcp");
  }
  if (a.standardize != "auto" && a.standardize != "on" &&
      a.standardize != "off") {
    throw dvs::ConfigError("--standardize must be on, off or auto");
  }

  LoadedData loaded = load_screen_data(a);
  dvs::GlmFamily family{dvs::Family::Gaussian};
  if (!a.family.empty()) {
    family = parse_family(a.family);
    if (loaded.cache_family && *loaded.cache_family != family.kind) {
      std::cerr << "dvs: warning: --family overrides the binary cache tag ("
                << dvs::family_name(*loaded.cache_family) << ")\n";
    }
  } else if (loaded.cache_family) {
    family.kind = *loaded.cache_family;
  } else {
    throw dvs::ConfigError("screen requires --family for CSV data");
  }

  for (const auto& shard : loaded.shards) validate_shard(shard, family);

  // Scale-only standardization with pooled column scales; default on for
  // CSV ingestion, off for simulated binary caches.
  const bool standardize = a.standardize == "on" ||
                           (a.standardize == "auto" &&
                            !loaded.from_binary_cache);
  const int p = loaded.shards.front().p();
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(p);
  if (standardize) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(p);
    long N = 0;
    for (const auto& s : loaded.shards) {
      sum += s.X.colwise().sum().transpose();
      sumsq += s.X.array().square().colwise().sum().matrix().transpose();
      N += s.n();
    }
    for (int j = 0; j < p; ++j) {
      const double var = sumsq[j] / N - (sum[j] / N) * (sum[j] / N);
      if (var > 0) scales[j] = std::sqrt(var);
    }
    for (auto& s : loaded.shards) {
      for (int j = 0; j < p; ++j) s.X.col(j) /= scales[j];
    }
  }

  dvs::ClusterSpec cluster(std::move(loaded.shards),
                           a.transport == "tcp" ? dvs::Transport::Tcp
                                                : dvs::Transport::InProcess);

  dvs::ScreeningOptions opts;
  opts.lambda = parse_lambda(a.lambda);
  opts.k = a.k;
  opts.k_max = a.k_max;
  opts.epsilon = a.epsilon;
  opts.max_iter = a.max_iter;
  opts.vartheta0 = a.vartheta0;
  opts.lasso_tol = a.lasso_tol;
  opts.lasso_max_iter = a.lasso_max_iter;
  opts.jobs = a.jobs > 0 ? a.jobs
                         : int(std::thread::hardware_concurrency());
  const dvs::ScreeningOutcome outcome =
      dvs::run_screening(cluster, family, opts);

  json result;
  result["schema"] = "dvs-result-v1";
  result["command"] = "screen";
  result["config"] = screen_config_json(a);
  result["family"] = family_flag_name(family.kind);
  result["N"] = cluster.total_n();
  result["p"] = p;
  result["m"] = cluster.m();
  result["standardized"] = standardize;
  result["lambda"] = outcome.lambda;
  result["k_star"] = outcome.trace.chosen_k;
  result["support"] = support_to_json(outcome.run.support);
  json beta = json::array();
  for (int j : outcome.run.support) {
    beta.push_back(outcome.run.beta[j] / scales[j]);
  }
  result["beta"] = beta;
  result["beta_tilde_nnz"] = outcome.beta_tilde.nnz();
  result["lasso_converged"] = outcome.lasso_converged;
  json trace_rows = json::array();
  for (const auto& row : outcome.trace.rows) {
    trace_rows.push_back(json{{"k", row.k},
                              {"loss", row.loss},
                              {"ebic", row.ebic},
                              {"support", support_to_json(row.support)},
                              {"converged", row.converged}});
  }
  result["ebic_trace"] = trace_rows;
  result["iterations"] = outcome.run.iterations;
  result["converged"] = outcome.run.converged;
  result["doubling_events"] = outcome.run.log.doubling_events;
  result["comm_rounds"] = dvs::communication_rounds(outcome.run);
  result["timings"] = json{{"lasso_s", outcome.timings.lasso_s},
                           {"aggregate_s", outcome.timings.aggregate_s},
                           {"scan_s", outcome.timings.scan_s}};

  if (!a.trace.empty()) {
    dvs::write_text_file(a.trace, dvs::to_json_lines(outcome.run.log));
  }
  const std::string text = result.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    dvs::write_text_file(a.out, text);
  }
  return 0;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::string scenario;
  long N = 0;
  int p = 0;
  int m = 1;
  int T = 1;
  std::uint64_t seed = 1;
  std::string methods = "dvs";
  int baseline_d = 0;
  std::string lambda = "auto";
  int k = 0;
  int k_max = 0;
  double epsilon = 1e-6;
  int max_iter = 500;
  int jobs = 0;
  std::string out;
  std::string json_out;
  std::string scores_dir;
  std::string config;
};

json bench_config_json(const BenchArgs& a) {
  return json{{"scenario", a.scenario}, {"N", a.N},
              {"p", a.p},               {"m", a.m},
              {"T", a.T},               {"seed", a.seed},
              {"methods", a.methods},   {"baseline-d", a.baseline_d},
              {"lambda", a.lambda},     {"k", a.k},
              {"k-max", a.k_max},       {"epsilon", a.epsilon},
              {"max-iter", a.max_iter}, {"jobs", a.jobs},
              {"out", a.out},           {"json", a.json_out},
              {"scores-dir", a.scores_dir}};
}

// Aggregated per-covariate utilities of the first replication, one CSV
// per baseline method.
void dump_marginal_scores(const dvs::CampaignConfig& cfg,
                          const std::string& dir) {
  fs::create_directories(dir);
  dvs::ScenarioSpec spec = cfg.scenario;
  spec.seed = cfg.scenario.seed + 1;
  dvs::GeneratedDataset data = dvs::generate(spec);
  dvs::ClusterSpec cluster(std::move(data.shards));
  for (const auto& name : cfg.methods) {
    if (name == "dvs") continue;
    dvs::MarginalMethod method = name == "pearson" ? dvs::MarginalMethod::Pearson
                                 : name == "kendall" ? dvs::MarginalMethod::Kendall
                                 : name == "sirs"    ? dvs::MarginalMethod::Sirs
                                                     : dvs::MarginalMethod::Dcor;
    const dvs::MarginalSelection sel = aggregate_and_rank(cluster, method, 1);
    dvs::write_text_file((fs::path(dir) / ("scores_" + name + ".csv")).string(),
                         dvs::scores_csv(sel.utility));
  }
}

int cmd_bench(const BenchArgs& a) {
  if (a.scenario.empty() || a.N <= 0 || a.p <= 0) {
    throw dvs::ConfigError("bench requires --scenario, --N and --p");
  }
  dvs::CampaignConfig cfg;
  cfg.scenario.example = dvs::parse_scenario(a.scenario);
  cfg.scenario.N = a.N;
  cfg.scenario.p = a.p;
  cfg.scenario.m = a.m;
  cfg.scenario.seed = a.seed;
  cfg.methods = split_csv_list(a.methods);
  if (cfg.methods.empty()) throw dvs::ConfigError("--methods list is empty");
  cfg.T = a.T;
  cfg.baseline_d = a.baseline_d;
  cfg.screening.lambda = parse_lambda(a.lambda);
  cfg.screening.k = a.k;
  cfg.screening.k_max = a.k_max;
  cfg.screening.epsilon = a.epsilon;
  cfg.screening.max_iter = a.max_iter;
  cfg.jobs = a.jobs > 0 ? a.jobs
                        : int(std::thread::hardware_concurrency());

  const dvs::CampaignResult result = dvs::run_campaign(cfg);
  const std::string csv = dvs::report_csv(result.reports);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    dvs::write_text_file(a.out, csv);
  }
  if (!a.json_out.empty()) {
    json j;
    j["schema"] = "dvs-bench-v1";
    j["command"] = "bench";
    j["config"] = bench_config_json(a);
    json rows = json::array();
    for (const auto& r : result.reports) {
      rows.push_back(json{{"method", r.method},
                          {"SC", r.sc},
                          {"CF", r.cf},
                          {"AMS", r.ams},
                          {"PSR", r.psr},
                          {"FDR", r.fdr},
                          {"T", r.T},
                          {"failures", r.failures}});
    }
    j["reports"] = rows;
    dvs::write_text_file(a.json_out, j.dump(2) + "\n");
  }
  if (!a.scores_dir.empty()) dump_marginal_scores(cfg, a.scores_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed variable screening for generalized linear models"};
  app.require_subcommand(1);

  SimulateArgs sim;
  ConfigBinder sim_binder;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "generate a synthetic sharded dataset");
  sim_binder.bind(sim_cmd->add_option("--example", sim.example,
                                      "scenario: 1.1 1.2 2.1 2.2 3.1 3.2"),
                  sim.example, "example");
  sim_binder.bind(sim_cmd->add_option("--N", sim.N, "total sample size"),
                  sim.N, "N");
  sim_binder.bind(sim_cmd->add_option("--p", sim.p, "covariate count"), sim.p,
                  "p");
  sim_binder.bind(sim_cmd->add_option("--m", sim.m, "machine count"), sim.m,
                  "m");
  sim_binder.bind(sim_cmd->add_option("--seed", sim.seed, "PRNG seed"),
                  sim.seed, "seed");
  sim_binder.bind(sim_cmd->add_option("--out", sim.out, "output directory"),
                  sim.out, "out");
  sim_binder.bind(
      sim_cmd->add_option("--format", sim.format, "csv or bin"), sim.format,
      "format");
  sim_cmd->add_option("--config", sim.config, "JSON config file");

  ScreenArgs scr;
  ConfigBinder scr_binder;
  CLI::App* scr_cmd = app.add_subcommand(
      "screen", "run one distributed screening pass over sharded data");
  scr_binder.bind(
      scr_cmd->add_option("--data", scr.data,
                          "shard directory, binary cache, or single CSV"),
      scr.data, "data");
  scr_binder.bind(
      scr_cmd->add_option("--m", scr.m, "machines for single-CSV sharding"),
      scr.m, "m");
  scr_binder.bind(scr_cmd->add_option("--family", scr.family,
                                      "gaussian | logistic | poisson"),
                  scr.family, "family");
  scr_binder.bind(
      scr_cmd->add_option("--lambda", scr.lambda, "penalty or 'auto'"),
      scr.lambda, "lambda");
  scr_binder.bind(scr_cmd->add_option("--k", scr.k, "fixed sparsity budget"),
                  scr.k, "k");
  scr_binder.bind(
      scr_cmd->add_option("--k-max", scr.k_max, "EBIC scan bound K"),
      scr.k_max, "k-max");
  scr_binder.bind(
      scr_cmd->add_option("--epsilon", scr.epsilon, "stopping tolerance"),
      scr.epsilon, "epsilon");
  scr_binder.bind(
      scr_cmd->add_option("--max-iter", scr.max_iter, "iteration cap"),
      scr.max_iter, "max-iter");
  scr_binder.bind(scr_cmd->add_option("--vartheta0", scr.vartheta0,
                                      "initial step scale"),
                  scr.vartheta0, "vartheta0");
  scr_binder.bind(
      scr_cmd->add_option("--lasso-tol", scr.lasso_tol, "initializer tol"),
      scr.lasso_tol, "lasso-tol");
  scr_binder.bind(scr_cmd->add_option("--lasso-max-iter", scr.lasso_max_iter,
                                      "initializer iteration cap"),
                  scr.lasso_max_iter, "lasso-max-iter");
  scr_binder.bind(
      scr_cmd->add_option("--trace", scr.trace, "iteration log JSONL path"),
      scr.trace, "trace");
  scr_binder.bind(
      scr_cmd->add_option("--out", scr.out, "result JSON path (default stdout)"),
      scr.out, "out");
  scr_binder.bind(scr_cmd->add_option("--transport", scr.transport,
                                      "inprocess | tcp"),
                  scr.transport, "transport");
  scr_binder.bind(
      scr_cmd->add_flag("--header", scr.header, "skip one CSV header line"),
      scr.header, "header");
  scr_binder.bind(scr_cmd->add_option("--shuffle-seed", scr.shuffle_seed,
                                      "shuffle rows before sharding"),
                  scr.shuffle_seed, "shuffle-seed");
  scr_binder.bind(scr_cmd->add_option("--standardize", scr.standardize,
                                      "on | off | auto"),
                  scr.standardize, "standardize");
  scr_binder.bind(
      scr_cmd->add_option("--jobs", scr.jobs, "parallel scan width"),
      scr.jobs, "jobs");
  scr_cmd->add_option("--config", scr.config, "JSON config file");

  BenchArgs ben;
  ConfigBinder ben_binder;
  CLI::App* ben_cmd = app.add_subcommand(
      "bench", "Monte Carlo comparison of screening methods");
  ben_binder.bind(
      ben_cmd->add_option("--scenario", ben.scenario, "1.1 .. 3.2"),
      ben.scenario, "scenario");
  ben_binder.bind(ben_cmd->add_option("--N", ben.N, "total sample size"),
                  ben.N, "N");
  ben_binder.bind(ben_cmd->add_option("--p", ben.p, "covariate count"), ben.p,
                  "p");
  ben_binder.bind(ben_cmd->add_option("--m", ben.m, "machine count"), ben.m,
                  "m");
  ben_binder.bind(ben_cmd->add_option("--T", ben.T, "replications"), ben.T,
                  "T");
  ben_binder.bind(ben_cmd->add_option("--seed", ben.seed, "base seed"),
                  ben.seed, "seed");
  ben_binder.bind(ben_cmd->add_option("--methods", ben.methods,
                                      "comma list: dvs,pearson,kendall,sirs,dcor"),
                  ben.methods, "methods");
  ben_binder.bind(ben_cmd->add_option("--baseline-d", ben.baseline_d,
                                      "fixed baseline model size"),
                  ben.baseline_d, "baseline-d");
  ben_binder.bind(
      ben_cmd->add_option("--lambda", ben.lambda, "penalty or 'auto'"),
      ben.lambda, "lambda");
  ben_binder.bind(ben_cmd->add_option("--k", ben.k, "fixed sparsity budget"),
                  ben.k, "k");
  ben_binder.bind(
      ben_cmd->add_option("--k-max", ben.k_max, "EBIC scan bound K"),
      ben.k_max, "k-max");
  ben_binder.bind(
      ben_cmd->add_option("--epsilon", ben.epsilon, "stopping tolerance"),
      ben.epsilon, "epsilon");
  ben_binder.bind(
      ben_cmd->add_option("--max-iter", ben.max_iter, "iteration cap"),
      ben.max_iter, "max-iter");
  ben_binder.bind(
      ben_cmd->add_option("--jobs", ben.jobs, "parallel replications"),
      ben.jobs, "jobs");
  ben_binder.bind(
      ben_cmd->add_option("--out", ben.out, "report CSV path (default stdout)"),
      ben.out, "out");
  ben_binder.bind(
      ben_cmd->add_option("--json", ben.json_out, "also write a JSON report"),
      ben.json_out, "json");
  ben_binder.bind(ben_cmd->add_option("--scores-dir", ben.scores_dir,
                                      "dump aggregated marginal score CSVs"),
                  ben.scores_dir, "scores-dir");
  ben_cmd->add_option("--config", ben.config, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) {
      if (!sim.config.empty()) sim_binder.apply(load_config_file(sim.config));
      return cmd_simulate(sim);
    }
    if (scr_cmd->parsed()) {
      if (!scr.config.empty()) scr_binder.apply(load_config_file(scr.config));
      return cmd_screen(scr);
    }
    if (ben_cmd->parsed()) {
      if (!ben.config.empty()) ben_binder.apply(load_config_file(ben.config));
      return cmd_bench(ben);
    }
  } catch (const dvs::ConfigError& e) {
    std::cerr << "dvs: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dvs::IoError& e) {
    std::cerr << "dvs: " << e.what() << "\n";
    return kExitIo;
  } catch (const dvs::DataError& e) {
    std::cerr << "dvs: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "dvs: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
