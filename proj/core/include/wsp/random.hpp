#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wsp {

/// Identifier recorded in output metadata so runs can be reproduced.
inline constexpr std::string_view kRngName = "mt19937_64+splitmix64-streams+polar-normal";

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under base `seed`. Streams for different indices
/// (replications, samplers) never share state.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Seedable generator with portable output.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the
/// standard); the distributions are implemented here because the
/// std:: distribution algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal();

  /// Gamma(shape, 1) by Marsaglia–Tsang.
  double gamma(double shape);

  double chi_square(double nu) { return 2.0 * gamma(0.5 * nu); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wsp
