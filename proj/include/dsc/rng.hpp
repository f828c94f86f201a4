#pragma once

#include "dsc/types.hpp"

#include <array>
#include <cstdint>

namespace dsc {

namespace detail {

/// One Philox4x32-10 block: 128-bit counter + 64-bit key -> 128 bits.
std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& counter,
                                           const std::array<std::uint32_t, 2>& key);

/// splitmix64 finalizer, used to derive substream labels.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace detail

/// Counter-based deterministic generator (Philox4x32-10). A stream is
/// identified by (seed, stream label); draws advance a 64-bit block counter,
/// so distinct labels never overlap and streams can be consumed in parallel.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  /// Child stream with a label derived from (this stream's label, salt).
  /// Same key, disjoint counter space; does not advance this stream.
  RngStream derive(std::uint64_t salt) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  /// Unbiased uniform integer in [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform k-subset of {0, ..., n-1}, sorted ascending (partial Fisher-Yates).
  IndexSet sample_indices(Index k, Index n);

  /// Uniform permutation of {0, ..., n-1}.
  std::vector<Index> permutation(Index n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;  // empty
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace dsc
