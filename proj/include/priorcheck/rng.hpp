#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace priorcheck {

// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// Deterministic random stream keyed by (seed, stream_id).
//
// The seed is the Philox key and the counter is (block index, stream_id), so
// the k-th 64-bit output is a pure function of (seed, stream_id, k). Distinct
// stream ids never share a counter value. Satisfies
// UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next_u64(); }
  std::uint64_t next_u64() noexcept;

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  // Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  // Number of 64-bit words consumed so far.
  std::uint64_t position() const noexcept { return word_index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t word_index_ = 0;
  std::array<std::uint64_t, 2> block_{};
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Stream ids for a check stage: 2^60 * stage_index + replicate_index.
constexpr std::uint64_t kStageStride = std::uint64_t{1} << 60;
constexpr std::uint64_t stage_stream(std::uint64_t stage_index,
                                     std::uint64_t replicate) noexcept {
  return kStageStride * stage_index + replicate;
}

// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace priorcheck
