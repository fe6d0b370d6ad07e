#include "dvs/cluster.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <future>
#include <iostream>
#include <string>
#include <thread>

#include "dvs/wire.hpp"

namespace dvs {

ClusterSpec::ClusterSpec(std::vector<DataShard> shards, Transport transport)
    : shards_(std::move(shards)), transport_(transport) {
  if (shards_.empty()) throw ConfigError("cluster: need at least one shard");
  const int p0 = shards_.front().p();
  for (std::size_t i = 0; i < shards_.size(); ++i) {
    auto& s = shards_[i];
    if (s.n() < 1 || s.p() < 1) throw ShapeError("cluster: empty shard");
    if (s.p() != p0) {
      throw ShapeError("cluster: shard " + std::to_string(i) + " has p = " +
                       std::to_string(s.p()) + ", expected " +
                       std::to_string(p0));
    }
    s.machine_id = static_cast<int>(i);
    if (s.n() != shards_.front().n()) equal_sizes_ = false;
  }
}

long ClusterSpec::total_n() const {
  long n = 0;
  for (const auto& s : shards_) n += s.n();
  return n;
}

int worker_timeout_ms() {
  if (const char* v = std::getenv("DVS_WORKER_TIMEOUT_MS")) {
    const long ms = std::strtol(v, nullptr, 10);
    if (ms > 0) return static_cast<int>(ms);
  }
  return 30000;
}

namespace {

[[noreturn]] void fail_machine(int machine_id, const std::string& what) {
  throw AggregationError("machine " + std::to_string(machine_id) + ": " +
                         what);
}

void check_reply(const GradientReply& r, int expected_id, int p) {
  if (r.machine_id != expected_id) {
    fail_machine(expected_id, "reply claims machine_id " +
                                  std::to_string(r.machine_id));
  }
  if (r.grad.size() != p) {
    fail_machine(expected_id,
                 "gradient has length " + std::to_string(r.grad.size()) +
                     ", expected p = " + std::to_string(p));
  }
  if (!r.grad.allFinite()) {
    fail_machine(expected_id, "gradient has non-finite coordinates");
  }
}

// ---- raw socket helpers -------------------------------------------------

struct Fd {
  int fd = -1;
  Fd() = default;
  explicit Fd(int f) : fd(f) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd(o.fd) { o.fd = -1; }
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      if (fd >= 0) ::close(fd);
      fd = o.fd;
      o.fd = -1;
    }
    return *this;
  }
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

bool wait_readable(int fd, int timeout_ms) {
  pollfd pf{fd, POLLIN, 0};
  const int rc = ::poll(&pf, 1, timeout_ms);
  return rc > 0 && (pf.revents & POLLIN);
}

bool read_exact(int fd, std::uint8_t* buf, std::size_t len, int timeout_ms) {
  std::size_t got = 0;
  while (got < len) {
    if (!wait_readable(fd, timeout_ms)) return false;
    const ssize_t n = ::recv(fd, buf + got, len - got, 0);
    if (n <= 0) return false;
    got += static_cast<std::size_t>(n);
  }
  return true;
}

bool write_all(int fd, const std::uint8_t* buf, std::size_t len) {
  std::size_t sent = 0;
  while (sent < len) {
    const ssize_t n = ::send(fd, buf + sent, len - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

// Reads one length-prefixed frame; empty optional on timeout/eof.
bool read_frame(int fd, wire::Frame& out, int timeout_ms) {
  std::uint8_t lenbuf[4];
  if (!read_exact(fd, lenbuf, 4, timeout_ms)) return false;
  const std::uint32_t len = wire::read_be32(lenbuf);
  if (len < 9 || len > (1u << 28)) return false;
  std::vector<std::uint8_t> payload(len);
  if (!read_exact(fd, payload.data(), len, timeout_ms)) return false;
  out = wire::decode_payload(payload.data(), payload.size());
  return true;
}

struct Listener {
  Fd sock;
  int port = 0;
};

Listener listen_ephemeral() {
  Listener l;
  l.sock = Fd(::socket(AF_INET, SOCK_STREAM, 0));
  if (l.sock.fd < 0) throw AggregationError("tcp: socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(l.sock.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(l.sock.fd, 1) != 0) {
    throw AggregationError("tcp: bind/listen failed");
  }
  socklen_t alen = sizeof addr;
  ::getsockname(l.sock.fd, reinterpret_cast<sockaddr*>(&addr), &alen);
  l.port = ntohs(addr.sin_port);
  return l;
}

// Worker side: accept one connection, answer one gradient request.
void serve_gradient_once(const Listener& l, const DataShard& shard,
                         const GlmFamily& family, int timeout_ms) {
  if (!wait_readable(l.sock.fd, timeout_ms)) return;
  Fd conn(::accept(l.sock.fd, nullptr, nullptr));
  if (conn.fd < 0) return;
  wire::Frame req;
  if (!read_frame(conn.fd, req, timeout_ms)) return;
  if (req.tag != wire::kTagBroadcastBeta ||
      req.payload.size() != shard.p()) {
    return;  // coordinator will report the missing reply
  }
  const Eigen::VectorXd g =
      local_gradient(shard, CoefVector(req.payload), family);
  const auto frame = wire::encode_frame(
      wire::kTagGradientReply, std::uint32_t(shard.machine_id), g);
  write_all(conn.fd, frame.data(), frame.size());
}

Eigen::VectorXd aggregate_in_process(const ClusterSpec& cluster,
                                     const CoefVector& beta,
                                     const GlmFamily& family) {
  const int m = cluster.m();
  std::vector<std::future<GradientReply>> pending;
  pending.reserve(m - 1);
  for (int i = 1; i < m; ++i) {
    const DataShard& shard = cluster.shard(i);
    pending.push_back(std::async(std::launch::async, [&shard, &beta, &family] {
      return GradientReply{shard.machine_id,
                           local_gradient(shard, beta, family), shard.n()};
    }));
  }
  std::vector<GradientReply> replies(m - 1);
  for (int i = 1; i < m; ++i) {
    try {
      replies[i - 1] = pending[i - 1].get();
    } catch (const std::exception& e) {
      fail_machine(i, e.what());
    }
  }
  const int p = cluster.p();
  Eigen::VectorXd sum = local_gradient(cluster.shard(0), beta, family);
  for (const auto& r : replies) {  // already in ascending machine_id order
    check_reply(r, r.machine_id, p);
    sum += r.grad;
  }
  return sum / m;
}

Eigen::VectorXd aggregate_tcp(const ClusterSpec& cluster,
                              const CoefVector& beta,
                              const GlmFamily& family) {
  const int m = cluster.m();
  const int p = cluster.p();
  const int timeout = worker_timeout_ms();

  std::vector<Listener> listeners;
  listeners.reserve(m - 1);
  for (int i = 1; i < m; ++i) listeners.push_back(listen_ephemeral());

  std::vector<std::thread> workers;
  workers.reserve(m - 1);
  for (int i = 1; i < m; ++i) {
    workers.emplace_back([&, i] {
      serve_gradient_once(listeners[i - 1], cluster.shard(i), family, timeout);
    });
  }

  Eigen::VectorXd sum = local_gradient(cluster.shard(0), beta, family);
  std::exception_ptr failure;
  for (int i = 1; i < m; ++i) {
    try {
      const GradientReply r =
          tcp::request_gradient(listeners[i - 1].port, i, beta.values(),
                                timeout);
      check_reply(r, i, p);
      sum += r.grad;  // ascending machine_id order
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
  return sum / m;
}

}  // namespace

namespace tcp {

GradientReply request_gradient(int port, int machine_id,
                               const Eigen::VectorXd& beta, int timeout_ms) {
  Fd conn(::socket(AF_INET, SOCK_STREAM, 0));
  if (conn.fd < 0) fail_machine(machine_id, "socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(std::uint16_t(port));
  if (::connect(conn.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) !=
      0) {
    fail_machine(machine_id, std::string("connect failed: ") +
                                 std::strerror(errno));
  }
  const auto frame = wire::encode_frame(wire::kTagBroadcastBeta,
                                        std::uint32_t(machine_id), beta);
  if (!write_all(conn.fd, frame.data(), frame.size())) {
    fail_machine(machine_id, "broadcast send failed");
  }
  wire::Frame reply;
  if (!read_frame(conn.fd, reply, timeout_ms)) {
    fail_machine(machine_id, "timeout or malformed gradient reply");
  }
  if (reply.tag != wire::kTagGradientReply) {
    fail_machine(machine_id, "unexpected message tag " +
                                 std::to_string(int(reply.tag)));
  }
  return GradientReply{int(reply.machine_id), reply.payload, 0};
}

}  // namespace tcp

Eigen::VectorXd broadcast_and_aggregate(const ClusterSpec& cluster,
                                        const CoefVector& beta_tilde,
                                        const GlmFamily& family) {
  if (beta_tilde.size() != cluster.p()) {
    throw ShapeError("aggregate: beta has length " +
                     std::to_string(beta_tilde.size()) + ", cluster has p = " +
                     std::to_string(cluster.p()));
  }
  if (!cluster.equal_shard_sizes()) {
    std::cerr << "dvs: warning: unequal shard sizes; the aggregate is the "
                 "unweighted mean of per-machine gradients, not the pooled "
                 "gradient\n";
  }
  Eigen::VectorXd agg =
      cluster.m() == 1
          ? local_gradient(cluster.shard(0), beta_tilde, family)
          : (cluster.transport() == Transport::Tcp
                 ? aggregate_tcp(cluster, beta_tilde, family)
                 : aggregate_in_process(cluster, beta_tilde, family));
  cluster.stats_.rounds += 1;
  cluster.stats_.broadcasts += cluster.m() - 1;
  cluster.stats_.replies += cluster.m() - 1;
  return agg;
}

}  // namespace dvs
