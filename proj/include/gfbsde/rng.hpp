#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gfbsde {

/**
 * Deterministic splittable RNG.
 *
 * All randomness flows from one 64-bit master seed. Stream seeds derive as
 *   stream(master, tag, index) = mix(mix(master ^ fnv1a(tag)) + index * GOLDEN)
 * so adding paths never perturbs existing ones and distinct subcommands
 * draw from disjoint streams. The generator itself is the splitmix64
 * sequence, which is more than adequate for the ensemble statistics here.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ull;
    }
    return h;
  }

  /// Seed for stream `index` of the subsystem named `tag`.
  static std::uint64_t stream_seed(std::uint64_t master, std::string_view tag,
                                   std::uint64_t index) {
    return mix(mix(master ^ fnv1a(tag)) + index * 0x9E3779B97F4A7C15ull);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1), 53-bit resolution.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Fair +-1.
  double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Standard normal via Box-Muller (deterministic across platforms).
  double next_gaussian() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace gfbsde
