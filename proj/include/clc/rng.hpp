#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace clc {

// Deterministic random source. The engine is a 64-bit Mersenne twister
// seeded from (seed, stream_id); all distributions are implemented here
// rather than through <random>'s distributions, whose output is
// implementation-defined. Single owner: never share an instance between
// threads.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::string_view stream_id);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; the second variate of each pair is kept.
  double normal();
  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);
  // Index drawn from an unnormalized non-negative weight vector.
  std::size_t categorical(std::span<const double> weights);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }
  const std::string& stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::string stream_id_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Mixes a master seed and a stream label into an engine seed.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view stream_id);

}  // namespace clc
