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
#include <limits>
#include <stdexcept>

#include "cdx/error.hpp"
#include "cdx/waveform.hpp"
#include "oracles.hpp"

namespace cdx {
namespace {

TEST(Waveform, RejectsMismatchedChannels) {
  EXPECT_THROW(Waveform({1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST(Waveform, RejectsNonFiniteSamples) {
  EXPECT_THROW(Waveform({1.0, std::numeric_limits<double>::quiet_NaN()}, {0.0, 0.0}),
               std::invalid_argument);
  EXPECT_THROW(Waveform({std::numeric_limits<double>::infinity()}, {0.0}), std::invalid_argument);
}

TEST(Waveform, RejectsBadRate) { EXPECT_THROW(Waveform({0.0}, {0.0}, 0), std::invalid_argument); }

TEST(Waveform, MonoIsDuplicated) {
  const Waveform w = Waveform::from_mono({0.1, -0.2, 0.3}, 48000);
  EXPECT_EQ(w.frames(), 3u);
  EXPECT_EQ(w.sample_rate(), 48000);
  EXPECT_EQ(testing::vec(w.left()), testing::vec(w.right()));
  EXPECT_DOUBLE_EQ(w.duration_s(), 3.0 / 48000.0);
}

TEST(Waveform, ArithmeticIsSampleWise) {
  const Waveform a({1.0, 2.0}, {3.0, 4.0});
  const Waveform b({0.5, 0.25}, {-1.0, 2.0});
  const Waveform s = a + b;
  EXPECT_EQ(testing::vec(s.left()), (std::vector<double>{1.5, 2.25}));
  EXPECT_EQ(testing::vec((a - b).right()), (std::vector<double>{4.0, 2.0}));
  EXPECT_EQ(testing::vec(scaled(a, 2.0).right()), (std::vector<double>{6.0, 8.0}));
  EXPECT_DOUBLE_EQ(peak_abs(b), 2.0);
  EXPECT_DOUBLE_EQ(energy(a), 1.0 + 4.0 + 9.0 + 16.0);
}

TEST(Waveform, ArithmeticRequiresAlignment) {
  const Waveform a({1.0, 2.0}, {3.0, 4.0});
  EXPECT_THROW(a + Waveform({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(a + Waveform({1.0, 2.0}, {1.0, 2.0}, 48000), std::invalid_argument);
}

TEST(Waveform, SumSourcesAddsInFixedOrder) {
  const SourceEstimates s{Waveform({0.1}, {0.2}), Waveform({0.7}, {1e-17}), Waveform({0.3}, {-0.2})};
  const Waveform m = sum_sources(s);
  EXPECT_EQ(m.left()[0], (0.1 + 0.7) + 0.3);
  EXPECT_EQ(m.right()[0], (0.2 + 1e-17) + -0.2);
}

TEST(Waveform, SliceAndSilence) {
  const Waveform w({1, 2, 3, 4}, {5, 6, 7, 8});
  const Waveform s = slice(w, 1, 3);
  EXPECT_EQ(testing::vec(s.left()), (std::vector<double>{2, 3}));
  EXPECT_EQ(testing::vec(s.right()), (std::vector<double>{6, 7}));
  EXPECT_THROW(slice(w, 3, 5), std::out_of_range);
  const Waveform z = Waveform::silence(5, 8000);
  EXPECT_EQ(energy(z), 0.0);
  EXPECT_EQ(z.frames(), 5u);
}

TEST(Waveform, StemNames) {
  for (Stem s : kAllStems) EXPECT_EQ(stem_from_name(stem_name(s)), s);
  EXPECT_EQ(stem_name(Stem::kDialogue), "dx");
  EXPECT_THROW(stem_from_name("vocals"), std::invalid_argument);
}

TEST(StemSet, ConsistencyErrorAndAlignment) {
  StemSet s;
  s.dx = Waveform({0.1, 0.2}, {0.0, 0.0});
  s.fx = Waveform({0.3, 0.0}, {0.0, 0.1});
  s.mx = Waveform({0.0, 0.0}, {0.5, 0.0});
  s.mixture = sum_sources(s.sources());
  EXPECT_NO_THROW(s.check_aligned());
  EXPECT_EQ(s.consistency_error(), 0.0);
  s.mixture = scaled(s.mixture, 2.0);
  EXPECT_GT(s.consistency_error(), 0.0);
  s.mx = Waveform({0.0}, {0.0});
  EXPECT_THROW(s.check_aligned(), std::invalid_argument);
}

TEST(Waveform, DecibelHelpers) {
  EXPECT_NEAR(db_to_gain(20.0), 10.0, 1e-12);
  EXPECT_NEAR(gain_to_db(0.5), -6.0206, 1e-4);
}

}  // namespace
}  // namespace cdx
