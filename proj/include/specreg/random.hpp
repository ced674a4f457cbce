#pragma once

#include <cstdint>
#include <vector>

namespace specreg {

/// Counter-based pseudo random stream.
///
/// The n-th raw output is a SplitMix64 finalizer applied to `key + n * golden`,
/// where the key is derived from (master seed, stream index). Streams with
/// different indices are statistically independent and a stream's output never
/// depends on how other streams were consumed, so replications can run in any
/// order and still reproduce bit for bit.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master_seed, std::uint64_t stream_index = 0);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();
  // Standard normal draw (Marsaglia polar method, spare value cached).
  double normal();
  std::vector<double> normals(std::size_t count);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace specreg
