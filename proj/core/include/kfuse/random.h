#pragma once

#include <cstdint>
#include <random>

namespace kfuse {

// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t value);

// Seed of sub-stream `index` of `master`; frames and views draw from
// derived streams so parallel generation never changes output.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Portable random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; every distribution below is written
// out here instead of using <random> distributions, whose algorithms are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Box-Muller; draws exactly two uniforms per call.
  double normal(double mean, double sigma);
  // Knuth's product-of-uniforms method; fine for the small rates used here.
  std::uint64_t poisson(double rate);

 private:
  std::mt19937_64 engine_;
};

}  // namespace kfuse
