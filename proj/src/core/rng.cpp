#include "core/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace spotvol {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> philox_round(
    const std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t prod0 = static_cast<std::uint64_t>(kMult0) * c[0];
  const std::uint64_t prod1 = static_cast<std::uint64_t>(kMult1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(prod0);
  const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(prod1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> c,
                                             std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    c = philox_round(c, k);
  }
  return c;
}

}  // namespace

RngStream::RngStream(SeedSpec seed)
    : key_{static_cast<std::uint32_t>(seed.master_seed),
           static_cast<std::uint32_t>(seed.master_seed >> 32)},
      counter_{0u, 0u, static_cast<std::uint32_t>(seed.stream_id),
               static_cast<std::uint32_t>(seed.stream_id >> 32)} {}

void RngStream::refill() {
  block_ = philox10(counter_, key_);
  block_pos_ = 0;
  if (++counter_[0] == 0) ++counter_[1];  // 2^64 counters per stream
}

std::uint32_t RngStream::next_u32() {
  if (block_pos_ >= 4) refill();
  return block_[block_pos_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RngStream::next_u01() {
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::next_u01_pos() {
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double radius = std::sqrt(-2.0 * std::log(next_u01_pos()));
  const double angle = 2.0 * M_PI * next_u01();
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RngStream::next_poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson mean must be finite and nonnegative");
  std::uint64_t total = 0;
  // Poisson(a+b) = Poisson(a) + Poisson(b); keep exp(-chunk) away from underflow.
  while (mean > 500.0) {
    mean -= 500.0;
    const double limit = std::exp(-500.0);
    double prod = next_u01_pos();
    std::uint64_t k = 0;
    while (prod > limit) {
      ++k;
      prod *= next_u01_pos();
    }
    total += k;
  }
  const double limit = std::exp(-mean);
  double prod = next_u01_pos();
  std::uint64_t k = 0;
  while (prod > limit) {
    ++k;
    prod *= next_u01_pos();
  }
  return total + k;
}

std::vector<double> sample_normal(SeedSpec seed, std::size_t count) {
  if (count == 0) throw std::invalid_argument("sample_normal: count must be >= 1");
  RngStream rng(seed);
  std::vector<double> out(count);
  for (auto& value : out) value = rng.next_normal();
  return out;
}

}  // namespace spotvol
