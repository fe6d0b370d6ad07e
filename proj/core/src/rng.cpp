#include "dvs/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dvs {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::substream(std::uint64_t base_seed, std::uint64_t stream) {
  return Rng(base_seed + kGolden * (stream + 1));
}

double Rng::uniform() {
  return (engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

bool Rng::bernoulli(double prob) {
  return uniform() < prob;
}

long Rng::poisson(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("rng: poisson rate must be finite and >= 0");
  }
  if (rate == 0.0) return 0;
  // Count unit-exponential arrivals before the rate is exhausted. O(rate)
  // draws but exact, and immune to the exp(-rate) underflow of the
  // product-of-uniforms method.
  long k = 0;
  double acc = 0.0;
  for (;;) {
    acc += -std::log1p(-uniform());  // Exp(1)
    if (acc >= rate) return k;
    ++k;
  }
}

}  // namespace dvs
