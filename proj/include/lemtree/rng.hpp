#pragma once

#include <array>
#include <cstdint>

namespace lemtree::rng {

/// Philox-4x64 block cipher, 10 rounds. Stateless: maps a 256-bit counter and
/// a 128-bit key to 256 bits of output. Matches the widely used reference
/// implementation; the tests pin it against numpy.random.Philox blocks.
struct Philox4x64 {
  static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> counter,
                                            std::array<std::uint64_t, 2> key);
};

/// Deterministic random stream keyed by (master_seed, stream_id).
///
/// Streams with distinct ids are statistically independent, and every draw is
/// a pure function of (master_seed, stream_id, draw index). This is what makes
/// Monte Carlo runs reproducible under any parallel schedule: trial t always
/// uses Stream(master_seed, t) regardless of which thread executes it.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53 random bits.
  double next_double();

  /// Unbiased uniform integer in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n);

  /// Standard normal via Box-Muller (pairs generated, one cached).
  double next_gaussian();

  std::uint64_t master_seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return counter_[2]; }

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_;  // [0],[1]: draw block index; [2]: stream id
  std::array<std::uint64_t, 4> buf_{};
  int buf_pos_ = 4;  // empty
  double spare_gaussian_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lemtree::rng
