#pragma once

#include <cstdint>
#include <random>

namespace remest {

// Single-owner random stream. Substreams are keyed by (seed, index) so a
// trial's draws do not depend on how trials are scheduled.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eedu};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1); consumes exactly one engine output.
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  /// Zero-mean Gaussian with the given standard deviation.
  double normal(double stddev) { return stddev * normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace remest
