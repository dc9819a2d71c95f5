#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace spotvol {

// Selects one reproducible random stream. Identical (master_seed, stream_id)
// pairs yield bit-identical draw sequences regardless of thread scheduling;
// distinct stream_ids select disjoint counter ranges of the same keyed
// generator and are statistically independent.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

// Counter-based generator (Philox-4x32-10). The key carries the master seed,
// the upper counter words carry the stream id, so each stream owns its own
// 2^64 block of counters.
class RngStream {
 public:
  explicit RngStream(SeedSpec seed);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on (0,1), 53-bit resolution.
  double next_u01();
  // Uniform on (0,1], safe as a log() argument.
  double next_u01_pos();
  // Standard normal via Box-Muller; the paired draw is cached.
  double next_normal();
  // Exact Poisson draw (multiplicative inversion, split for large means).
  std::uint64_t next_poisson(double mean);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// count i.i.d. standard normal draws from the given stream.
std::vector<double> sample_normal(SeedSpec seed, std::size_t count);

}  // namespace spotvol
