// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace chemotx {

/// SplitMix64 output function (Steele, Lea & Flood finalizer).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/**
 * Seed of trial `k` under top-level seed `seed`.
 *
 * This is the k-th output of a SplitMix64 stream started at `seed`, so every
 * trial's stream is a pure function of (seed, k) and trials may be evaluated
 * in any order or on any worker.
 */
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) noexcept {
  return splitmix64_mix(seed + (k + 1) * kGoldenGamma);
}

class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t operator()() noexcept { return splitmix64_mix(state_ += kGoldenGamma); }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna). State is filled from SplitMix64.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// Uniform double on [0, 1) with 53 random bits.
template <class Engine>
inline double uniform01(Engine& eng) noexcept {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/**
 * Standard normal variates by the ziggurat method (Marsaglia & Tsang, 2000;
 * 256 layers, 32-bit layer coordinate, 8-bit layer index per 64-bit draw).
 *
 * Implemented here rather than through std::normal_distribution because the
 * standard leaves that algorithm unspecified, and sample streams must be
 * identical across standard libraries.
 */
class NormalSampler {
 public:
  template <class Engine>
  double operator()(Engine& eng) noexcept {
    const Tables& t = tables();
    const std::uint64_t u = eng();
    const auto hz = static_cast<std::int32_t>(u >> 32);
    const auto iz = static_cast<unsigned>(u & 0xffU);
    if (magnitude(hz) < t.kn[iz]) return hz * t.wn[iz];
    return tail_or_wedge(eng, hz, iz);
  }

 private:
  static constexpr double kR = 3.654152885361008796;  // start of the tail
  static constexpr double kV = 4.92867323399e-3;      // area of each layer

  struct Tables {
    std::array<std::uint32_t, 256> kn{};
    std::array<double, 256> wn{};
    std::array<double, 256> fn{};

    Tables() {
      const double m1 = 2147483648.0;  // 2^31
      double dn = kR;
      double tn = dn;
      const double q = kV / std::exp(-0.5 * dn * dn);
      kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
      kn[1] = 0;
      wn[0] = q / m1;
      wn[255] = dn / m1;
      fn[0] = 1.0;
      fn[255] = std::exp(-0.5 * dn * dn);
      for (int i = 254; i >= 1; --i) {
        dn = std::sqrt(-2.0 * std::log(kV / dn + std::exp(-0.5 * dn * dn)));
        kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
        tn = dn;
        fn[i] = std::exp(-0.5 * dn * dn);
        wn[i] = dn / m1;
      }
    }
  };

  static const Tables& tables() {
    static const Tables t;
    return t;
  }

  static std::uint32_t magnitude(std::int32_t v) noexcept {
    const auto w = static_cast<std::int64_t>(v);
    return static_cast<std::uint32_t>(w < 0 ? -w : w);
  }

  template <class Engine>
  static double open_uniform(Engine& eng) noexcept {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
  }

  template <class Engine>
  double tail_or_wedge(Engine& eng, std::int32_t hz, unsigned iz) noexcept {
    const Tables& t = tables();
    for (;;) {
      double x = hz * t.wn[iz];
      if (iz == 0) {
        double y;
        do {
          x = -std::log(open_uniform(eng)) / kR;
          y = -std::log(open_uniform(eng));
        } while (y + y < x * x);
        return hz > 0 ? kR + x : -kR - x;
      }
      if (t.fn[iz] + open_uniform(eng) * (t.fn[iz - 1] - t.fn[iz]) < std::exp(-0.5 * x * x)) {
        return x;
      }
      const std::uint64_t u = eng();
      hz = static_cast<std::int32_t>(u >> 32);
      iz = static_cast<unsigned>(u & 0xffU);
      if (magnitude(hz) < t.kn[iz]) return hz * t.wn[iz];
    }
  }
};

}  // namespace chemotx
