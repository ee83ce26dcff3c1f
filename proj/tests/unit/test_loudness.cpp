// Copyright 2026 The cdxkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cdx/error.hpp"
#include "cdx/loudness.hpp"
#include "oracles.hpp"

namespace cdx {
namespace {

using testing::bs1770_48k;
using testing::gaussian_noise;
using testing::sine;

TEST(KWeighting, ReproducesTabulatedCoefficientsAt48k) {
  const KWeighting k = k_weighting(48000);
  const double shelf_b[] = {1.53512485958697, -2.69169618940638, 1.19839281085285};
  const double shelf_a[] = {1.0, -1.69065929318241, 0.73248077421585};
  const double hp_b[] = {1.0, -2.0, 1.0};
  const double hp_a[] = {1.0, -1.99004745483398, 0.99007225036621};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(k.shelf_b[i], shelf_b[i], 1e-7);
    EXPECT_NEAR(k.shelf_a[i], shelf_a[i], 1e-7);
    EXPECT_NEAR(k.highpass_b[i], hp_b[i], 1e-7);
    EXPECT_NEAR(k.highpass_a[i], hp_a[i], 1e-7);
  }
}

TEST(Loudness, MatchesReferenceMeterOnVariedSignals) {
  std::mt19937_64 gen(31);
  const int rate = 48000;
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t n = 6 * static_cast<std::size_t>(rate);
    auto l = gaussian_noise(gen, n, 0.02 * (trial + 1));
    auto r = sine(300.0 + 500.0 * trial, 0.1, n, rate);
    // A quiet stretch that the relative gate should discard.
    for (std::size_t i = 2 * rate; i < 4 * static_cast<std::size_t>(rate); ++i) {
      l[i] *= 0.001;
      r[i] *= 0.001;
    }
    const double expected = bs1770_48k(l, r);
    const auto got = integrated_loudness(Waveform(l, r, rate));
    ASSERT_TRUE(got.has_value());
    EXPECT_NEAR(*got, expected, 1e-5) << "trial " << trial;
  }
}

TEST(Loudness, LeftOnlyFullScaleTone) {
  const std::size_t n = 5 * 48000;
  const auto got = integrated_loudness(Waveform(sine(997.0, 1.0, n, 48000), std::vector<double>(n, 0.0), 48000));
  EXPECT_NEAR(*got, -3.01, 0.02);
}

TEST(Loudness, RateIndependentForTheSameTone) {
  const auto a = integrated_loudness(Waveform::from_mono(sine(1000.0, 0.3, 3 * 44100, 44100), 44100));
  const auto b = integrated_loudness(Waveform::from_mono(sine(1000.0, 0.3, 3 * 48000, 48000), 48000));
  EXPECT_NEAR(*a, *b, 0.02);
}

TEST(Loudness, SilenceIsUnmeasurable) {
  EXPECT_FALSE(integrated_loudness(Waveform::silence(48000, 48000)).has_value());
  // Below the absolute gate.
  EXPECT_FALSE(integrated_loudness(Waveform::from_mono(sine(1000, 1e-5, 48000, 48000), 48000)).has_value());
}

TEST(Loudness, TooShortThrows) {
  EXPECT_THROW(integrated_loudness(Waveform::silence(19199, 48000)), DataError);
  EXPECT_NO_THROW(integrated_loudness(Waveform::silence(19200, 48000)));
}

TEST(Loudness, NormalizeHitsTarget) {
  std::mt19937_64 gen(32);
  const Waveform w = testing::noise_waveform(gen, 3 * 44100, 0.1);
  const LoudnessNormalized n = normalize_loudness(w, -24.0);
  EXPECT_NEAR(*integrated_loudness(n.waveform), -24.0, 1e-9);
  EXPECT_NEAR(n.gain_db, -24.0 - *integrated_loudness(w), 1e-12);
  EXPECT_THROW(normalize_loudness(Waveform::silence(44100), -24.0), DataError);
}

}  // namespace
}  // namespace cdx
