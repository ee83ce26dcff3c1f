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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "cdx/error.hpp"
#include "cdx/loudness.hpp"
#include "cdx/mixer.hpp"
#include "cdx/wav_io.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace cdx {
namespace {

namespace fs = std::filesystem;

class MixerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cdx-mixer");
    catalog_ = new AssetCatalog(testing::make_corpus(dir_->path(), 5));
  }
  static void TearDownTestSuite() {
    delete catalog_;
    delete dir_;
  }
  static testing::TempDir* dir_;
  static AssetCatalog* catalog_;
};
testing::TempDir* MixerTest::dir_ = nullptr;
AssetCatalog* MixerTest::catalog_ = nullptr;

TEST(AssetClassTest, NamesAndStems) {
  for (AssetClass c : kAllAssetClasses) EXPECT_EQ(asset_class_from_name(asset_class_name(c)), c);
  EXPECT_EQ(stem_of(AssetClass::kSpeech), Stem::kDialogue);
  EXPECT_EQ(stem_of(AssetClass::kMusic), Stem::kMusic);
  EXPECT_EQ(stem_of(AssetClass::kForegroundEffects), Stem::kEffects);
  EXPECT_EQ(stem_of(AssetClass::kBackgroundEffects), Stem::kEffects);
  EXPECT_THROW(asset_class_from_name("foley"), std::invalid_argument);
}

TEST(Ztp, PmfIsNormalizedWithKnownMean) {
  for (double lambda : {0.1, 0.5, 3.0, 12.0}) {
    double total = 0.0, mean = 0.0;
    for (std::size_t k = 0; k < 400; ++k) {
      total += ztp_pmf(k, lambda);
      mean += static_cast<double>(k) * ztp_pmf(k, lambda);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(mean, ztp_mean(lambda), 1e-10);
  }
  EXPECT_EQ(ztp_pmf(0, 1.0), 0.0);
  EXPECT_NEAR(ztp_pmf(1, 1.0), std::exp(-1.0) / (1.0 - std::exp(-1.0)), 1e-15);
}

TEST(Ztp, SampleMeanAndSupport) {
  for (double lambda : {0.01, 4.0, 40.0}) {
    Rng rng(3);
    double sum = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      const std::size_t k = sample_count_ztp(lambda, rng);
      ASSERT_GE(k, 1u);
      sum += static_cast<double>(k);
    }
    EXPECT_NEAR(sum / n, ztp_mean(lambda), 0.02 * ztp_mean(lambda) + 0.01);
  }
  Rng rng(1);
  EXPECT_THROW(sample_count_ztp(0.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_count_ztp(-1.0, rng), std::invalid_argument);
}

TEST_F(MixerTest, CatalogRoundTrip) {
  const AssetCatalog back = load_catalog(dir_->path() / "catalog.json");
  for (AssetClass c : kAllAssetClasses) {
    ASSERT_EQ(back.of(c).size(), catalog_->of(c).size());
    for (std::size_t i = 0; i < back.of(c).size(); ++i) {
      EXPECT_EQ(back.of(c)[i].path, catalog_->of(c)[i].path);
      EXPECT_DOUBLE_EQ(back.of(c)[i].duration_s, catalog_->of(c)[i].duration_s);
    }
  }
  std::ofstream(dir_->path() / "bad.json") << R"({"foley": []})";
  EXPECT_THROW(load_catalog(dir_->path() / "bad.json"), FormatError);
}

TEST_F(MixerTest, RecipeFromJson) {
  const fs::path p = dir_->path() / "recipe.json";
  std::ofstream(p) << R"({"duration_s": 8, "seed": 9, "trim_to_level": false,
    "events": {"music": {"lambda": 0.5, "gain_db": [-3, 3]}},
    "levels": {"dx": {"mean_lufs": -20, "std_lu": 0}}})";
  const MixRecipe r = load_recipe(p);
  EXPECT_EQ(r.duration_s, 8.0);
  EXPECT_EQ(r.seed, 9u);
  EXPECT_FALSE(r.trim_to_level);
  EXPECT_EQ(r.events.at(AssetClass::kMusic).lambda, 0.5);
  EXPECT_EQ(r.events.at(AssetClass::kMusic).gain_max_db, 3.0);
  EXPECT_EQ(r.events.at(AssetClass::kSpeech).lambda, 2.0);
  EXPECT_EQ(r.levels.at(Stem::kDialogue).mean_lufs, -20.0);
  EXPECT_EQ(r.levels.at(Stem::kMusic).mean_lufs, -31.4);
  std::ofstream(p) << R"({"events": {"music": {"gain_db": [3, -3]}}})";
  EXPECT_THROW(load_recipe(p), std::invalid_argument);
}

TEST_F(MixerTest, SceneStructure) {
  AssetLoader loader(*catalog_);
  MixRecipe recipe = testing::short_recipe(5.0, 1);
  for (auto& [stem, level] : recipe.levels) level.std_lu = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    const Scene scene = compose_scene(*catalog_, recipe, rng, loader);
    const auto& st = scene.stems;
    EXPECT_EQ(st.mixture.frames(), 5u * 44100u);
    EXPECT_EQ(st.mixture, sum_sources(st.sources()));

    std::vector<std::pair<double, double>> speech;
    for (const auto& e : scene.annotation.events) {
      EXPECT_GE(e.start_s, 0.0);
      EXPECT_LE(e.end_s, 5.0 + 1e-12);
      EXPECT_GE(e.gain_db, -10.0);
      EXPECT_LE(e.gain_db, 10.0);
      if (e.asset_class == AssetClass::kSpeech) speech.emplace_back(e.start_s, e.end_s);
    }
    ASSERT_FALSE(speech.empty());
    std::sort(speech.begin(), speech.end());
    for (std::size_t i = 1; i < speech.size(); ++i) EXPECT_LE(speech[i - 1].second, speech[i].first);

    for (Stem stem : kAllStems) {
      const auto l = integrated_loudness(st[stem]);
      if (l && scene.annotation.trim_db.count(stem)) {
        EXPECT_NEAR(*l, recipe.levels.at(stem).mean_lufs, 1e-6);
      }
    }
  }
}

TEST_F(MixerTest, LongUtteranceIsDroppedWithWarning) {
  AssetCatalog cat = *catalog_;
  cat.assets[AssetClass::kSpeech] = {catalog_->of(AssetClass::kMusic).front()};  // 6 s "utterance"
  AssetLoader loader(cat);
  MixRecipe recipe = testing::short_recipe(3.0, 1);
  Rng rng(1);
  const Scene scene = compose_scene(cat, recipe, rng, loader);
  EXPECT_EQ(energy(scene.stems.dx), 0.0);
  EXPECT_FALSE(scene.annotation.warnings.empty());
  EXPECT_FALSE(scene.annotation.trim_db.count(Stem::kDialogue));
}

TEST_F(MixerTest, DisabledClassAndMissingAssets) {
  AssetLoader loader(*catalog_);
  MixRecipe recipe = testing::short_recipe(3.0, 1);
  recipe.events[AssetClass::kMusic].lambda = 0.0;
  Rng rng(2);
  EXPECT_EQ(energy(compose_scene(*catalog_, recipe, rng, loader).stems.mx), 0.0);

  AssetCatalog no_music = *catalog_;
  no_music.assets.erase(AssetClass::kMusic);
  AssetLoader loader2(no_music);
  recipe.events[AssetClass::kMusic].lambda = 1.0;
  EXPECT_THROW(compose_scene(no_music, recipe, rng, loader2), DataError);
}

TEST_F(MixerTest, UnreadableAssetIsSkipped) {
  AssetCatalog cat = *catalog_;
  cat.assets[AssetClass::kBackgroundEffects] = {{"assets/missing.wav", 3.0, {}}};
  AssetLoader loader(cat);
  Rng rng(3);
  const Scene scene = compose_scene(cat, testing::short_recipe(3.0, 1), rng, loader);
  EXPECT_EQ(loader.warnings().size(), 1u);
  EXPECT_FALSE(scene.annotation.warnings.empty());
  EXPECT_EQ(scene.stems.mixture, sum_sources(scene.stems.sources()));
}

TEST_F(MixerTest, ScenesDoNotDependOnThreadCount) {
  AssetLoader loader(*catalog_);
  const MixRecipe recipe = testing::short_recipe(2.0, 99);
  const auto a = compose_scenes(*catalog_, recipe, 6, loader, 1);
  const auto b = compose_scenes(*catalog_, recipe, 6, loader, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a[i].stems.mixture, b[i].stems.mixture);
    EXPECT_EQ(a[i].annotation.scene_id, "scene_" + std::to_string(i));
  }
  EXPECT_FALSE(a[0].stems.mixture == a[1].stems.mixture);
}

TEST_F(MixerTest, WriteSceneProducesStemsAndAnnotation) {
  AssetLoader loader(*catalog_);
  Rng rng(4);
  const Scene scene = compose_scene(*catalog_, testing::short_recipe(2.0, 1), rng, loader, "demo");
  const fs::path out = dir_->path() / "scenes";
  write_scene(scene, out);
  for (const char* f : {"mix.wav", "dx.wav", "fx.wav", "mx.wav", "annotation.json"}) {
    EXPECT_TRUE(fs::exists(out / "demo" / f)) << f;
  }
  std::ifstream in(out / "demo" / "annotation.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["scene_id"], "demo");
  EXPECT_EQ(j["events"].size(), scene.annotation.events.size());
  const Waveform dx = load_wav(out / "demo" / "dx.wav");
  EXPECT_EQ(dx.frames(), scene.stems.dx.frames());
}

TEST_F(MixerTest, OnTheFlyBatch) {
  AssetLoader loader(*catalog_);
  OnTheFlyConfig cfg;
  Rng a(5), b(5);
  const auto batch = onthefly_batch(*catalog_, cfg, 20, a, loader);
  const auto again = onthefly_batch(*catalog_, cfg, 20, b, loader);
  ASSERT_EQ(batch.size(), 20u);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& ex = batch[i];
    EXPECT_EQ(ex.stems.mixture.frames(), static_cast<std::size_t>(3.0 * 44100));
    EXPECT_EQ(ex.stems.mixture, sum_sources(ex.stems.sources()));
    EXPECT_LE(ex.n_speech, 1);
    EXPECT_LE(ex.n_music, 2);
    EXPECT_LE(ex.n_effects, 3);
    EXPECT_EQ(ex.gains_db.size(), static_cast<std::size_t>(ex.n_speech + ex.n_music + ex.n_effects));
    for (double g : ex.gains_db) {
      EXPECT_GE(g, -10.0);
      EXPECT_LE(g, 10.0);
    }
    EXPECT_EQ(ex.stems.mixture, again[i].stems.mixture);
  }
  cfg.max_music = -1;
  EXPECT_THROW(onthefly_batch(*catalog_, cfg, 1, a, loader), std::invalid_argument);
}

}  // namespace
}  // namespace cdx
