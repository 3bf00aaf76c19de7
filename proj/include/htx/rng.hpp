#pragma once

#include <array>
#include <cstdint>

namespace htx {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
// Stateless: block(key, ctr_hi, ctr_lo) -> 128 random bits. Streams are
// separated through ctr_hi, so (seed, stream, index) addresses any block
// without sequencing, and results are identical across platforms.
std::array<std::uint32_t, 4> philox_block(std::uint64_t key,
                                          std::uint64_t ctr_hi,
                                          std::uint64_t ctr_lo);

// Deterministic N(0,1) sequence: Box-Muller over successive Philox blocks.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_(seed), stream_(stream_id) {}
  double next();

 private:
  std::uint64_t key_, stream_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Inverse standard normal CDF (Acklam's rational approximation polished with
// one Halley step through erfc); |error| < 1e-13 on (1e-300, 1-1e-16).
double normal_quantile(double p);

}  // namespace htx
