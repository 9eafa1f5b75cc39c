#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace vln {

// Deterministic random source. The mt19937_64 sequence is fixed by the
// standard, and the helpers below avoid std distributions, whose output is
// implementation-defined. Identical seeds yield identical streams on every
// toolchain, which golden-file and replay tests rely on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, n); n must be > 0. Modulo bias is negligible at the
  // small ranges used here.
  std::uint64_t next_below(std::uint64_t n) { return engine_() % n; }

  // Uniform integer in [lo, hi], inclusive.
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double next_real(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[next_below(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vln
