#pragma once

#include <cstdint>
#include <random>

namespace dvs {

// Reproducibility contract for all seeded data in this project:
//   engine     mt19937_64, seeded with splitmix64(base + GOLDEN*(stream+1))
//   uniform    top 53 bits of one draw, (x >> 11) * 2^-53, in [0, 1)
//   normal     Marsaglia polar transform (one spare cached per pair)
//   poisson    unit-exponential waiting times, exact for any rate
// Shard i and replication t consume disjoint substreams, so regenerating
// with the same seed is bit-identical regardless of thread count.
std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from a base seed (one per machine or
  // replication).
  static Rng substream(std::uint64_t base_seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // N(0, 1)
  bool bernoulli(double prob);
  long poisson(double rate);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dvs
