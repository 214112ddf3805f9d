// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random number generation (Philox 4x32-10, Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11).  Streams are
// addressed by (seed, stream) pairs, so simulation chunks can be dispatched
// to any number of workers and still produce bit-identical draws.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace thzharq {

// Raw Philox 4x32 block cipher, 10 rounds.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> x = counter;
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * x[0];
      const std::uint64_t p1 = 0xCD9E8D57ull * x[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
      k0 += 0x9E3779B9u;  // golden-ratio Weyl constants
      k1 += 0xBB67AE85u;
    }
    return x;
  }
};

// Sequential view of one Philox stream.  The 128-bit counter is
// (block_lo, block_hi, stream_lo, stream_hi) with the key taken from the
// user seed, so distinct (seed, stream) pairs give independent sequences.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint64_t bits64() {
    if (avail_ == 0) refill();
    avail_ -= 2;
    const std::uint64_t hi = buf_[avail_ + 1];
    return (hi << 32) | buf_[avail_];
  }

  // Uniform on the open interval (0, 1); never returns an endpoint, so
  // log/pow transforms are safe.
  double uniform() { return (static_cast<double>(bits64() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform()); }

  double normal() {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    // Box-Muller on two fresh uniforms.
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double c = std::cos(6.283185307179586476925286766559 * u2);
    const double s = std::sin(6.283185307179586476925286766559 * u2);
    cached_normal_ = r * s;
    have_cached_normal_ = true;
    return r * c;
  }

  // Unit-scale gamma variate, Marsaglia & Tsang squeeze method, boosted to
  // shapes below one via G(a) = G(a+1) * U^(1/a).
  double gamma(double shape) {
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  void refill() {
    buf_ = Philox4x32::block({static_cast<std::uint32_t>(block_),
                              static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_},
                             key_);
    ++block_;
    avail_ = 4;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int avail_ = 0;
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

}  // namespace thzharq
