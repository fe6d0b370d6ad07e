#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dvs/glm.hpp"
#include "dvs/marginal.hpp"
#include "dvs/metrics.hpp"

namespace dvs {

// Shard CSV: column 1 = response, columns 2..p+1 = covariates, no header
// unless told otherwise, '.' decimal separator.
DataShard read_csv_shard(const std::string& path, int machine_id,
                         bool header = false);
void write_csv_shard(const std::string& path, const DataShard& shard);

// All *.csv files in a directory, one shard each, in sorted name order.
std::vector<DataShard> read_shard_dir(const std::string& dir,
                                      bool header = false);

// Splits pooled rows into m contiguous equal blocks, optionally after a
// seeded Fisher-Yates shuffle. N % m != 0 is a ConfigError.
std::vector<DataShard> split_rows(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, int m,
                                  std::optional<std::uint64_t> shuffle_seed);

// Binary cache: magic "DVS1"; family tag, N, p, m as 8-byte little-endian
// unsigned; then shard 0..m-1, each row stored as p+1 little-endian
// doubles [y, x_1..x_p].
struct BinaryCache {
  GlmFamily family;
  std::vector<DataShard> shards;
};
void write_binary_cache(const std::string& path, Family family,
                        const std::vector<DataShard>& shards);
BinaryCache read_binary_cache(const std::string& path);
bool is_binary_cache(const std::string& path);

// truth.json for simulated datasets: dense beta plus 1-based support.
void write_truth_json(const std::string& path, const CoefVector& truth);

// Campaign table in the benchmark column order.
std::string report_csv(const std::vector<ReplicationReport>& reports);

// Marginal scores: method, 1-based covariate index, score, rank.
std::string scores_csv(const MarginalUtility& utility);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dvs
