#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace ifdpg {

// Seeded generator with distribution helpers defined here rather than through
// <random> distributions, whose output differs between standard library
// implementations. Streams are reproducible on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform_open();

  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  // Standard normal variate (Box-Muller, one variate per call).
  double normal();

  // k distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ifdpg
