#pragma once

// Portable seeded sampling. The standard distributions are implementation
// defined, so uniform draws and shuffles are built directly on mt19937_64 to
// keep sweep output byte-identical across toolchains.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace tullock {

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

  template <typename T>
  void shuffle(std::vector<T>& v)
  {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace tullock
