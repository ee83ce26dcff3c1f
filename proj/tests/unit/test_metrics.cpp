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
#include "cdx/metrics.hpp"
#include "oracles.hpp"

namespace cdx {
namespace {

using testing::brute_sdr;
using testing::noise_waveform;

TEST(Sdr, MatchesBruteForce) {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 20; ++i) {
    const Waveform t = noise_waveform(gen, 5000, 0.3);
    const Waveform e = t + noise_waveform(gen, 5000, 0.05 * (i + 1));
    EXPECT_NEAR(*sdr_source(t, e), brute_sdr(t, e), 1e-10);
  }
}

TEST(Sdr, ErrorIsPooledOverChannels) {
  // All the error sits in the right channel: energy ratio 4 / 1.
  const Waveform t({1.0, 1.0}, {1.0, 1.0});
  const Waveform e({1.0, 1.0}, {1.0, 0.0});
  EXPECT_NEAR(*sdr_source(t, e), 10.0 * std::log10(4.0), 1e-12);
}

TEST(Sdr, PerfectEstimateHitsTheCeiling) {
  const Waveform t({0.1, -0.2}, {0.3, 0.0});
  EXPECT_EQ(*sdr_source(t, t), kSdrClampDb);
}

TEST(Sdr, HugeErrorHitsTheFloor) {
  const Waveform t({1e-6, 0.0}, {0.0, 0.0});
  const Waveform e({1e3, 0.0}, {0.0, 0.0});
  EXPECT_EQ(*sdr_source(t, e), -kSdrClampDb);
}

TEST(Sdr, SilentEstimateIsZeroDb) {
  const Waveform t({0.5, -0.5}, {0.25, 0.0});
  EXPECT_DOUBLE_EQ(*sdr_source(t, Waveform::silence(2)), 0.0);
}

TEST(Sdr, SilentTargetIsUndefined) {
  EXPECT_FALSE(sdr_source(Waveform::silence(4), Waveform({1, 0, 0, 0}, {0, 0, 0, 0})).has_value());
}

TEST(Sdr, MisalignedInputsThrow) {
  EXPECT_THROW(sdr_source(Waveform::silence(4), Waveform::silence(5)), std::invalid_argument);
}

TEST(ClipScoreTest, MeanOfPublishedTriples) {
  EXPECT_NEAR(ClipScore::from_sources(7.321, -1.049, 1.200).mean, 2.491, 5e-4);
  EXPECT_NEAR(ClipScore::from_sources(1.562, -1.236, -0.383).mean, -0.019, 5e-4);
  EXPECT_EQ(ClipScore::floor().mean, -kSdrClampDb);
  const ClipScore s = ClipScore::from_sources(1, 2, 3);
  EXPECT_EQ(s[Stem::kEffects], 2.0);
}

TEST(ClipScoreTest, GlobalClipIsUndefinedWithASilentReference) {
  StemSet refs;
  refs.dx = Waveform({0.1, 0.2}, {0.1, 0.2});
  refs.fx = Waveform::silence(2);
  refs.mx = Waveform({0.3, 0.0}, {0.0, 0.3});
  refs.mixture = sum_sources(refs.sources());
  EXPECT_FALSE(global_sdr_clip(refs, refs.sources()).has_value());
}

TEST(Aggregate, FieldWiseMean) {
  const std::vector<ClipScore> v = {ClipScore::from_sources(1, 2, 3), ClipScore::from_sources(3, 4, 5)};
  const ClipScore a = aggregate(v);
  EXPECT_DOUBLE_EQ(a.sdr_dx, 2.0);
  EXPECT_DOUBLE_EQ(a.sdr_mx, 4.0);
  EXPECT_DOUBLE_EQ(a.mean, 3.0);
  EXPECT_THROW(aggregate(std::vector<ClipScore>{}), DataError);
}

TEST(Rms, PooledNorm) {
  const Waveform w({3.0, 0.0}, {4.0, 0.0});
  EXPECT_DOUBLE_EQ(rms(w), std::sqrt(25.0 / 2.0));
  EXPECT_THROW(rms(Waveform()), DataError);
}

StemSet constant_stems(std::size_t n, double dx, double fx, double mx, int rate) {
  StemSet s;
  s.dx = Waveform(std::vector<double>(n, dx), std::vector<double>(n, 0.0), rate);
  s.fx = Waveform(std::vector<double>(n, fx), std::vector<double>(n, 0.0), rate);
  s.mx = Waveform(std::vector<double>(n, mx), std::vector<double>(n, 0.0), rate);
  s.mixture = sum_sources(s.sources());
  return s;
}

TEST(Segments, ThresholdsApplyPerClass) {
  const RmsThresholds th;
  EXPECT_TRUE(segment_accepted(0.022, 0.005, 0.003, th));
  EXPECT_FALSE(segment_accepted(0.0219, 0.5, 0.5, th));
  EXPECT_FALSE(segment_accepted(0.5, 0.0049, 0.5, th));
  EXPECT_FALSE(segment_accepted(0.5, 0.5, 0.0029, th));
  EXPECT_THROW((RmsThresholds{0.0, 0.1, 0.1}.validate()), std::invalid_argument);
}

TEST(Segments, SlidingWindowMatchesDirectComputation) {
  const int rate = 100;
  std::mt19937_64 gen(22);
  StemSet s = constant_stems(30 * rate, 0.0, 0.0, 0.0, rate);
  // Dialogue active only in [5 s, 20 s); effects and music throughout.
  std::vector<double> dl(30 * rate, 0.0);
  for (int i = 5 * rate; i < 20 * rate; ++i) dl[i] = 0.1;
  s.dx = Waveform(dl, std::vector<double>(dl.size(), 0.0), rate);
  s.fx = testing::noise_waveform(gen, 30 * rate, 0.02, rate);
  s.mx = testing::noise_waveform(gen, 30 * rate, 0.02, rate);
  s.mixture = sum_sources(s.sources());
  const auto segs = select_segments(s, RmsThresholds{});
  std::vector<Segment> expected;
  for (std::size_t b = 0; b + 11 * rate <= 30u * rate; b += rate) {
    const Segment seg{b, b + 11 * rate};
    const StemSet part{slice(s.mixture, seg.begin, seg.end), slice(s.dx, seg.begin, seg.end),
                       slice(s.fx, seg.begin, seg.end), slice(s.mx, seg.begin, seg.end)};
    if (segment_accepted(rms(part.dx), rms(part.fx), rms(part.mx), RmsThresholds{})) {
      expected.push_back(seg);
    }
  }
  EXPECT_EQ(segs, expected);
  ASSERT_FALSE(segs.empty());
  EXPECT_EQ(segs.front().begin, 0u);  // dx rms over [0,11) is 0.1*sqrt(6/11)
}

TEST(Segments, ShortClipIsOneSegment) {
  const StemSet s = constant_stems(300, 0.1, 0.1, 0.1, 100);
  const auto segs = select_segments(s, RmsThresholds{});
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], (Segment{0, 300}));
  EXPECT_TRUE(select_segments(constant_stems(300, 0.01, 0.1, 0.1, 100), RmsThresholds{}).empty());
}

}  // namespace
}  // namespace cdx
