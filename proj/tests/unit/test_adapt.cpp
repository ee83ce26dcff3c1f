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
#include <fstream>
#include <random>

#include "cdx/adapt.hpp"
#include "cdx/error.hpp"
#include "cdx/loudness.hpp"
#include "cdx/sigstats.hpp"
#include "cdx/wav_io.hpp"
#include "oracles.hpp"

namespace cdx {
namespace {

namespace fs = std::filesystem;
using testing::noise_waveform;

EqCurve flat_curve(double db, std::size_t bins = 2049, int rate = 44100, std::size_t fft = 4096) {
  EqCurve c;
  for (std::size_t k = 0; k < bins; ++k) c.frequencies.push_back(static_cast<double>(k) * rate / fft);
  c.mean_db.assign(bins, db);
  c.std_db.assign(bins, 0.0);
  c.clip_count = 1;
  return c;
}

TEST(Fir, IdentityAndValidation) {
  const FirFilter id = FirFilter::identity(101);
  EXPECT_NO_THROW(id.validate());
  EXPECT_EQ(id.taps[50], 1.0);
  EXPECT_NEAR(id.amplitude(1234.0, 44100), 1.0, 1e-15);
  FirFilter even{{0.5, 0.5}, "", ""};
  EXPECT_THROW(even.validate(), std::invalid_argument);
  FirFilter skew{{0.1, 0.8, 0.2}, "", ""};
  EXPECT_THROW(skew.validate(), std::invalid_argument);
}

TEST(Fir, AmplitudeOfThreeTapAverager) {
  const FirFilter f{{0.25, 0.5, 0.25}, "", ""};
  // 0.5 + 0.5 cos(w)
  EXPECT_NEAR(f.amplitude(0.0, 48000), 1.0, 1e-15);
  EXPECT_NEAR(f.amplitude(12000.0, 48000), 0.5, 1e-15);
  EXPECT_NEAR(f.amplitude(24000.0, 48000), 0.0, 1e-15);
}

TEST(LoudnessOffset, IsTargetMinusSource) {
  EXPECT_DOUBLE_EQ(loudness_match_offset(-24.4, -28.4), -4.0);
  EXPECT_DOUBLE_EQ(loudness_match_offset(-31.4, -24.0), 7.4);
}

TEST(EqDesign, EqualCurvesGiveIdentity) {
  const EqCurve c = flat_curve(-40.0);
  const FirFilter f = design_eq_match_filter(c, c);
  EXPECT_NO_THROW(f.validate());
  EXPECT_EQ(f.taps.size(), 101u);
  for (double hz : {0.0, 100.0, 1000.0, 10000.0, 22050.0}) EXPECT_NEAR(f.amplitude(hz, 44100), 1.0, 1e-12);
}

TEST(EqDesign, ConstantDifferenceSplitsOverBothPasses) {
  const FirFilter f = design_eq_match_filter(flat_curve(-40.0), flat_curve(-34.0));
  for (double hz : {100.0, 3000.0, 15000.0}) {
    EXPECT_NEAR(20.0 * std::log10(f.amplitude(hz, 44100)), 3.0, 1e-9);
  }
}

TEST(EqDesign, HoldsResponseOutsideTheBand) {
  EqCurve target = flat_curve(-40.0);
  for (std::size_t k = 0; k < target.bins(); ++k) {
    if (target.frequencies[k] > 17000.0 || target.frequencies[k] < 30.0) target.mean_db[k] += 12.0;
  }
  const FirFilter f = design_eq_match_filter(flat_curve(-40.0), target);
  for (double hz : {0.0, 1000.0, 18000.0, 22050.0}) EXPECT_NEAR(f.amplitude(hz, 44100), 1.0, 1e-9);
}

TEST(EqDesign, RejectsMismatchedGrids) {
  EXPECT_THROW(design_eq_match_filter(flat_curve(0.0, 2049), flat_curve(0.0, 1025, 44100, 2048)),
               std::invalid_argument);
  EqMatchOptions even;
  even.taps = 100;
  EXPECT_THROW(design_eq_match_filter(flat_curve(0.0), flat_curve(0.0), even), std::invalid_argument);
}

TEST(ZeroPhase, IdentityFilterIsTransparent) {
  std::mt19937_64 gen(71);
  const Waveform x = noise_waveform(gen, 1000, 0.2);
  const Waveform y = zero_phase_apply(x, FirFilter::identity(31));
  EXPECT_LT(peak_abs(y - x), 1e-15);
  EXPECT_THROW(zero_phase_apply(Waveform::silence(92), FirFilter::identity(31)), std::invalid_argument);
}

TEST(ZeroPhase, SineIsScaledWithoutPhaseShift) {
  const int rate = 44100;
  const FirFilter f{{0.1, 0.2, 0.4, 0.2, 0.1}, "", ""};
  const double hz = 3000.0;
  const Waveform x = Waveform::from_mono(testing::sine(hz, 0.5, 4000, rate, 0.4), rate);
  const Waveform y = zero_phase_apply(x, f);
  const double g = f.amplitude(hz, rate) * f.amplitude(hz, rate);
  for (std::size_t i = 100; i < 3900; ++i) EXPECT_NEAR(y.left()[i], g * x.left()[i], 1e-12);
}

TEST(Plan, RequiresSomeAdaptation) {
  EXPECT_THROW(AdaptationPlan({}), std::invalid_argument);
  EXPECT_THROW(AdaptationPlan({{Stem::kDialogue, ClassAdaptation{}}}), std::invalid_argument);
}

TEST(Plan, JsonRoundTrip) {
  testing::TempDir dir;
  FirFilter f{{0.1, 0.8, 0.1}, "dnr_fx", "cdx_fx"};
  const AdaptationPlan plan({{Stem::kDialogue, {-4.0, std::nullopt}}, {Stem::kEffects, {std::nullopt, f}}});
  save_adaptation_plan(plan, dir.path() / "plan.json");
  const AdaptationPlan back = load_adaptation_plan(dir.path() / "plan.json");
  ASSERT_NE(back.find(Stem::kDialogue), nullptr);
  EXPECT_EQ(*back.find(Stem::kDialogue)->loudness_offset_lu, -4.0);
  EXPECT_EQ(back.find(Stem::kEffects)->eq->taps, f.taps);
  EXPECT_EQ(back.find(Stem::kEffects)->eq->target_id, "cdx_fx");
  EXPECT_EQ(back.find(Stem::kMusic), nullptr);

  std::ofstream(dir.path() / "bad.json") << R"({"vocals": {"loudness_offset_lu": 1}})";
  EXPECT_THROW(load_adaptation_plan(dir.path() / "bad.json"), FormatError);
  std::ofstream(dir.path() / "even.json") << R"({"dx": {"eq_filter_taps": [0.5, 0.5]}})";
  EXPECT_THROW(load_adaptation_plan(dir.path() / "even.json"), FormatError);
}

TEST(AdaptStem, EqThenGain) {
  std::mt19937_64 gen(72);
  const Waveform x = noise_waveform(gen, 2000, 0.1);
  const FirFilter f{{0.25, 0.5, 0.25}, "", ""};
  const Waveform y = adapt_stem(x, {2.0, f});
  EXPECT_LT(peak_abs(y - apply_gain_db(zero_phase_apply(x, f), 2.0)), 1e-15);
  EXPECT_EQ(adapt_stem(x, {-3.0, std::nullopt}), apply_gain_db(x, -3.0));
}

TEST(AdaptDataset, WritesMirroredClipsAndReportsFailures) {
  testing::TempDir dir;
  std::mt19937_64 gen(73);
  DatasetManifest m;
  m.base_dir = dir.path() / "in";
  for (int i = 0; i < 3; ++i) {
    const std::string id = "clip" + std::to_string(i);
    const fs::path sub = fs::path("clips") / id;
    fs::create_directories(m.base_dir / sub);
    StemSet s;
    s.dx = noise_waveform(gen, 44100, 0.1);
    s.fx = noise_waveform(gen, 44100, 0.05);
    s.mx = noise_waveform(gen, 44100, 0.02);
    s.mixture = sum_sources(s.sources());
    ClipEntry e{id, "movie", sub / "mix.wav", sub / "dx.wav", sub / "fx.wav", sub / "mx.wav"};
    save_wav(s.mixture, m.base_dir / e.mixture);
    for (Stem st : kAllStems) save_wav(s[st], m.base_dir / e.stem_path(st));
    m.clips.push_back(e);
  }
  fs::remove(m.base_dir / "clips" / "clip1" / "fx.wav");

  const AdaptationPlan plan({{Stem::kDialogue, {-4.0, std::nullopt}}});
  const fs::path out = dir.path() / "out";
  const AdaptResult r = adapt_dataset(m, plan, out);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].clip_id, "clip1");
  ASSERT_EQ(r.manifest.clips.size(), 2u);

  const DatasetManifest back = load_manifest(out / "manifest.json");
  ASSERT_EQ(back.clips.size(), 2u);
  for (const auto& clip : back.clips) {
    const StemSet in = m.load_clip(*std::find_if(m.clips.begin(), m.clips.end(),
                                                 [&](const ClipEntry& c) { return c.clip_id == clip.clip_id; }));
    const StemSet adapted = back.load_clip(clip);
    EXPECT_NEAR(*integrated_loudness(adapted.dx) - *integrated_loudness(in.dx), -4.0, 1e-4);
    EXPECT_EQ(adapted.fx, in.fx);
    EXPECT_LT(peak_abs(adapted.mixture - sum_sources(adapted.sources())), 1e-6);
    EXPECT_TRUE(fs::exists(out / "clips" / clip.clip_id / "dx.wav"));
  }
}

}  // namespace
}  // namespace cdx
