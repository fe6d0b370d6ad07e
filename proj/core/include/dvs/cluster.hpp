#pragma once

#include <vector>

#include "dvs/glm.hpp"
#include "dvs/types.hpp"

namespace dvs {

enum class Transport { InProcess, Tcp };

// One worker's answer to a beta broadcast.
struct GradientReply {
  int machine_id = 0;
  Eigen::VectorXd grad;
  int n_local = 0;
};

struct ClusterStats {
  long rounds = 0;      // logical broadcast/aggregate rounds
  long broadcasts = 0;  // messages coordinator -> workers
  long replies = 0;     // messages workers -> coordinator
};

// m machines; machine 0 is the coordinator and holds the shard the
// surrogate loss is built on. Shards are immutable once the cluster is
// constructed.
class ClusterSpec {
 public:
  explicit ClusterSpec(std::vector<DataShard> shards,
                       Transport transport = Transport::InProcess);

  int m() const { return static_cast<int>(shards_.size()); }
  int p() const { return shards_.front().p(); }
  long total_n() const;
  Transport transport() const { return transport_; }
  const DataShard& shard(int i) const { return shards_[i]; }
  const std::vector<DataShard>& shards() const { return shards_; }
  bool equal_shard_sizes() const { return equal_sizes_; }
  const ClusterStats& stats() const { return stats_; }

  friend Eigen::VectorXd broadcast_and_aggregate(const ClusterSpec&,
                                                 const CoefVector&,
                                                 const GlmFamily&);

 private:
  std::vector<DataShard> shards_;
  Transport transport_;
  bool equal_sizes_ = true;
  mutable ClusterStats stats_;
};

// One broadcast/aggregate round: every machine evaluates its local
// gradient at beta_tilde, the coordinator averages the m replies in
// ascending machine_id order and returns m^-1 sum_i grad_i. The
// coordinator evaluates its own shard without self-messaging. Worker
// timeout (Tcp) comes from DVS_WORKER_TIMEOUT_MS, default 30000.
Eigen::VectorXd broadcast_and_aggregate(const ClusterSpec& cluster,
                                        const CoefVector& beta_tilde,
                                        const GlmFamily& family);

int worker_timeout_ms();

namespace tcp {

// Coordinator side of one round trip: connect to a worker endpoint, send
// the beta broadcast, block for the gradient reply. Exposed for protocol
// tests; broadcast_and_aggregate drives it for Transport::Tcp.
GradientReply request_gradient(int port, int machine_id,
                               const Eigen::VectorXd& beta, int timeout_ms);

}  // namespace tcp

}  // namespace dvs
