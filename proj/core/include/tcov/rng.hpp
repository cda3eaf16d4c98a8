#pragma once

#include <cstdint>
#include <string_view>

namespace tcov {

// Splittable pseudo-random stream addressed by (master_seed, stream_id).
//
// Two streams with the same address produce identical draw sequences; streams
// with different addresses are statistically independent for simulation
// purposes.  derive() is a pure function of the parent's address (not of how
// many draws were consumed), so any worker can rebuild the stream for
// replication r without coordination -- that is what makes Monte Carlo output
// independent of the worker count.
//
// Internals: xoshiro256++ state filled from a splitmix64 chain over the
// address; child ids come from FNV-1a over (parent id, label, lane).
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  // Child stream for an integer lane (replication index, grid slot, ...).
  RngStream derive(std::uint64_t lane) const;
  // Child stream for a named purpose, e.g. derive("calibrate", 0).
  RngStream derive(std::string_view label, std::uint64_t lane = 0) const;

  std::uint64_t next_u64();
  double uniform01();                         // in [0, 1)
  std::uint64_t uniform_below(std::uint64_t bound);  // unbiased in [0, bound)
  double normal();                            // N(0,1), Marsaglia polar

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  std::uint64_t master_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t state_[4] = {0, 0, 0, 0};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stable 64-bit hash used for lane derivation and calibration memo keys.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64(std::uint64_t value, std::uint64_t seed);

}  // namespace tcov
