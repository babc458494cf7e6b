#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pwdlab {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and a list of counters, so results never depend on the order
/// in which streams are consumed.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = mix64(base);
  for (std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
  return s;
}

// Stage tags for derive_seed. Values are part of the reproducibility contract.
namespace stream {
inline constexpr std::uint64_t trial = 1;
inline constexpr std::uint64_t cn_learn = 2;
inline constexpr std::uint64_t separate = 3;
inline constexpr std::uint64_t direct = 4;
inline constexpr std::uint64_t selection = 5;
inline constexpr std::uint64_t mixture = 6;
inline constexpr std::uint64_t mixture_sample = 7;
inline constexpr std::uint64_t verify = 8;
}  // namespace stream

/// Seeded random stream. Thin wrapper over mt19937_64 with the handful of
/// draws the simulator needs.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  double normal() { return normal_(engine_); }
  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace pwdlab
