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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdx/random.hpp"
#include "cdx/waveform.hpp"

namespace cdx {

/// Source material categories. Foreground and background effects are merged
/// into the FX stem.
enum class AssetClass { kSpeech, kMusic, kForegroundEffects, kBackgroundEffects };
inline constexpr std::array<AssetClass, 4> kAllAssetClasses = {
    AssetClass::kSpeech, AssetClass::kMusic, AssetClass::kForegroundEffects,
    AssetClass::kBackgroundEffects};

std::string_view asset_class_name(AssetClass c);  // speech, music, fg_effects, bg_effects
AssetClass asset_class_from_name(std::string_view name);
Stem stem_of(AssetClass c);

struct Asset {
  std::filesystem::path path;
  double duration_s = 0.0;
  std::vector<std::string> tags;
};

struct AssetCatalog {
  std::map<AssetClass, std::vector<Asset>> assets;
  std::filesystem::path base_dir;

  const std::vector<Asset>& of(AssetClass c) const;
  /// Throws DataError on non-positive durations.
  void validate() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

// JSON: {"speech": [{"path", "duration_s", "tags"?}], "music": [...],
//        "fg_effects": [...], "bg_effects": [...]}
AssetCatalog load_catalog(const std::filesystem::path& path);
void save_catalog(const AssetCatalog& catalog,
                  const std::filesystem::path& path);

/// Loads assets on demand, resampled to the scene rate and cached. Unreadable
/// assets are reported once and then skipped. Thread-safe.
class AssetLoader {
 public:
  explicit AssetLoader(const AssetCatalog& catalog) : catalog_(catalog) {}

  std::optional<Waveform> load(const Asset& asset, int sample_rate);
  std::vector<std::string> warnings() const;

 private:
  const AssetCatalog& catalog_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, int>, std::optional<Waveform>> cache_;
  std::vector<std::string> warnings_;
};

/// Zero-truncated Poisson draw, P(k) = lambda^k e^-lambda / (k! (1 - e^-lambda))
/// for k >= 1, by inversion. Throws std::invalid_argument for lambda <= 0.
std::size_t sample_count_ztp(double lambda, Rng& rng);
double ztp_pmf(std::size_t k, double lambda);
double ztp_mean(double lambda);

struct EventRecipe {
  /// Mean parameter of the event-count distribution; 0 disables the class.
  double lambda = 1.0;
  double gain_min_db = -10.0;
  double gain_max_db = 10.0;
};

struct LevelTarget {
  double mean_lufs = -24.0;
  double std_lu = 0.0;
};

/// Scene simulation parameters. Defaults: 60 s scenes, invented event rates
/// (speech 2.0, music 1.5, foreground effects 3.0, background effects 1.5)
/// and per-stem level targets of -24.4 / -29.7 / -31.4 LUFS (std 1.3 / 1.9 /
/// 1.8) for DX / FX / MX.
struct MixRecipe {
  double duration_s = 60.0;
  int sample_rate = kCanonicalSampleRate;
  std::map<AssetClass, EventRecipe> events = {
      {AssetClass::kSpeech, {2.0, -10.0, 10.0}},
      {AssetClass::kMusic, {1.5, -10.0, 10.0}},
      {AssetClass::kForegroundEffects, {3.0, -10.0, 10.0}},
      {AssetClass::kBackgroundEffects, {1.5, -10.0, 10.0}}};
  std::map<Stem, LevelTarget> levels = {{Stem::kDialogue, {-24.4, 1.3}},
                                        {Stem::kEffects, {-29.7, 1.9}},
                                        {Stem::kMusic, {-31.4, 1.8}}};
  /// Trim each rendered stem to a level drawn from its LevelTarget.
  bool trim_to_level = true;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on non-positive duration or rate, negative
  /// lambda or inverted gain ranges.
  void validate() const;
};

MixRecipe load_recipe(const std::filesystem::path& path);

struct SceneEvent {
  AssetClass asset_class = AssetClass::kSpeech;
  std::string asset_id;
  double start_s = 0.0;
  double end_s = 0.0;
  /// Offset into the asset where the excerpt starts.
  double source_offset_s = 0.0;
  double gain_db = 0.0;
};

struct SceneAnnotation {
  std::string scene_id;
  double duration_s = 0.0;
  std::vector<SceneEvent> events;
  /// Level trim applied to each rendered stem after the event gains.
  std::map<Stem, double> trim_db;
  std::vector<std::string> warnings;
};

struct Scene {
  StemSet stems;
  SceneAnnotation annotation;
};

/// Samples and renders one scene. Event counts follow the zero-truncated
/// Poisson law, assets are drawn uniformly, gains uniformly within the class
/// range. Speech utterances are placed whole and without overlap; other
/// events may overlap and are cropped to the scene when longer than it. The
/// mixture is the exact sample-wise sum dx + fx + mx.
///
/// Throws DataError when a class with lambda > 0 has no assets.
Scene compose_scene(const AssetCatalog& catalog, const MixRecipe& recipe,
                    Rng& rng, AssetLoader& loader,
                    std::string scene_id = "scene");

/// Scene i uses the stream Rng(recipe.seed).derive(i), so output does not
/// depend on scheduling. Scenes are rendered on up to `threads` workers.
std::vector<Scene> compose_scenes(const AssetCatalog& catalog,
                                  const MixRecipe& recipe, std::size_t count,
                                  AssetLoader& loader,
                                  std::size_t threads = 1);

/// Writes {dir}/{scene_id}/mix.wav, dx.wav, fx.wav, mx.wav (float32) and
/// annotation.json.
void write_scene(const Scene& scene, const std::filesystem::path& dir);
std::string annotation_json(const SceneAnnotation& annotation);

/// Fixed-length training examples built from random excerpts.
struct OnTheFlyConfig {
  int max_speech = 1;
  int max_music = 2;
  int max_effects = 3;
  double clip_s = 3.0;
  double gain_min_db = -10.0;
  double gain_max_db = 10.0;
  int sample_rate = kCanonicalSampleRate;
};

struct OnTheFlyExample {
  StemSet stems;
  int n_speech = 0;
  int n_music = 0;
  int n_effects = 0;
  std::vector<double> gains_db;
};

/// Each example draws 0..max_speech speech, 0..max_music music and
/// 0..max_effects effect signals (effects from both effect pools), crops or
/// zero-pads each to clip_s, applies a uniform gain and sums them per class.
std::vector<OnTheFlyExample> onthefly_batch(const AssetCatalog& catalog,
                                            const OnTheFlyConfig& config,
                                            std::size_t batch_size, Rng& rng,
                                            AssetLoader& loader);

}  // namespace cdx
