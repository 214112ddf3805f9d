// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include <vector>

#include "thzharq/rng.hpp"

using namespace thzharq;

TEST_CASE("philox 4x32-10 known-answer vectors") {
  // Reference vectors from the Random123 distribution (kat_vectors).
  const auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  const auto ones = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                      {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("identical (seed, stream) pairs replay the same sequence") {
  CounterRng a(7, 3), b(7, 3);
  for (int i = 0; i < 200; ++i) CHECK(a.bits64() == b.bits64());
}

TEST_CASE("distinct streams of one seed diverge immediately") {
  CounterRng a(7, 3), b(7, 4);
  bool any_diff = false;
  for (int i = 0; i < 8; ++i) any_diff |= (a.bits64() != b.bits64());
  CHECK(any_diff);
}

TEST_CASE("uniform stays inside the open unit interval with mean 1/2") {
  CounterRng rng(11, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  const double se = 1.0 / std::sqrt(12.0 * n);
  CHECK(std::abs(sum / n - 0.5) < 4.0 * se);
}

TEST_CASE("exponential and normal moments") {
  CounterRng rng(13, 1);
  const int n = 200000;
  double se_sum = 0.0, n_sum = 0.0, n_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    se_sum += rng.exponential();
    const double g = rng.normal();
    n_sum += g;
    n_sq += g * g;
  }
  CHECK(std::abs(se_sum / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(n_sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(n_sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gamma variates match the target mean and variance") {
  for (double shape : {0.6, 2.3}) {
    CounterRng rng(17, static_cast<std::uint64_t>(shape * 10));
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      REQUIRE(g > 0.0);
      sum += g;
      sq += g * g;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    // sd of the sample mean is sqrt(shape/n); of the sample variance,
    // roughly sqrt((mu4 - sigma^4)/n) with mu4 = 3 shape^2 + 6 shape.
    CHECK(std::abs(mean - shape) < 4.0 * std::sqrt(shape / n));
    CHECK(std::abs(var - shape) <
          4.0 * std::sqrt((2.0 * shape * shape + 6.0 * shape) / n));
  }
}
