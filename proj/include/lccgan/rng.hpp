#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lccgan/types.hpp"

namespace lccgan {

// xoshiro256** seeded through splitmix64. The bit stream and the derived
// uniform/normal variates are identical on every platform, which
// std::normal_distribution does not guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  /// Standard normal via the Marsaglia polar method.
  double normal();

  Matrix normal_matrix(Index rows, Index cols, double stddev = 1.0);
  Matrix uniform_matrix(Index rows, Index cols, double lo, double hi);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<Index> permutation(Index n);

  /// Independent stream for a sub-task; does not advance this generator.
  Rng derive(std::uint64_t stream) const;

  const std::array<std::uint64_t, 4>& state() const { return s_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lccgan
