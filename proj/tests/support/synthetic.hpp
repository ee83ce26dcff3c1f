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

// Small on-disk corpora for mixer and harness tests.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "cdx/manifest.hpp"
#include "cdx/mixer.hpp"
#include "cdx/wav_io.hpp"
#include "oracles.hpp"

namespace cdx::testing {

inline Waveform speech_like(std::mt19937_64& gen, double seconds, int rate) {
  std::uniform_real_distribution<double> f0d(110.0, 230.0);
  const double f0 = f0d(gen);
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double env = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * 4.0 * t);
    double s = 0.0;
    for (int h = 1; h <= 8; ++h) s += std::sin(2.0 * std::numbers::pi * f0 * h * t) / h;
    v[i] = 0.08 * env * s;
  }
  return Waveform::from_mono(std::move(v), rate);
}

inline Waveform music_like(std::mt19937_64& gen, double seconds, int rate) {
  std::uniform_int_distribution<int> root(48, 60);
  const int r = root(gen);
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::vector<double> l(n, 0.0);
  std::vector<double> rr(n, 0.0);
  const int chord[] = {0, 4, 7, 12};
  for (int k = 0; k < 4; ++k) {
    const double f = 440.0 * std::pow(2.0, (r + chord[k] - 69) / 12.0);
    const double pan = 0.25 * k;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = 0.03 * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate);
      l[i] += (1.0 - pan) * s;
      rr[i] += pan * s;
    }
  }
  return Waveform(std::move(l), std::move(rr), rate);
}

inline Waveform burst_like(std::mt19937_64& gen, double seconds, int rate) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  auto l = gaussian_noise(gen, n, 0.2);
  auto r = gaussian_noise(gen, n, 0.2);
  for (std::size_t i = 0; i < n; ++i) {
    const double env = std::exp(-static_cast<double>(i) / (0.08 * rate));
    l[i] *= env;
    r[i] *= env;
  }
  return Waveform(std::move(l), std::move(r), rate);
}

inline Waveform ambience_like(std::mt19937_64& gen, double seconds, int rate) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  return lowpass(800.0, 0.7, rate).run(noise_waveform(gen, n, 0.02, rate));
}

// Writes a handful of assets per class below dir and returns the catalog
// (also saved as dir/catalog.json).
inline AssetCatalog make_corpus(const std::filesystem::path& dir, std::uint64_t seed,
                                int rate = kCanonicalSampleRate) {
  std::mt19937_64 gen(seed);
  AssetCatalog catalog;
  catalog.base_dir = dir;
  auto add = [&](AssetClass cls, const Waveform& w, int index) {
    const std::string name = std::string(asset_class_name(cls)) + "_" + std::to_string(index) + ".wav";
    std::filesystem::create_directories(dir / "assets");
    save_wav(w, dir / "assets" / name);
    catalog.assets[cls].push_back({std::filesystem::path("assets") / name, w.duration_s(), {}});
  };
  std::uniform_real_distribution<double> len(0.8, 1.6);
  for (int i = 0; i < 5; ++i) add(AssetClass::kSpeech, speech_like(gen, len(gen), rate), i);
  for (int i = 0; i < 3; ++i) add(AssetClass::kMusic, music_like(gen, 6.0, rate), i);
  for (int i = 0; i < 4; ++i) add(AssetClass::kForegroundEffects, burst_like(gen, 0.5 * len(gen), rate), i);
  for (int i = 0; i < 2; ++i) add(AssetClass::kBackgroundEffects, ambience_like(gen, 6.0, rate), i);
  save_catalog(catalog, dir / "catalog.json");
  return catalog;
}

inline MixRecipe short_recipe(double seconds, std::uint64_t seed) {
  MixRecipe recipe;
  recipe.duration_s = seconds;
  recipe.seed = seed;
  return recipe;
}

// Renders n_clips scenes from the catalog and writes them under dir/clips,
// assigning clip i to movie "movie_{i % n_movies}". Saves dir/manifest.json.
inline DatasetManifest make_scene_manifest(const std::filesystem::path& dir,
                                           const AssetCatalog& catalog, std::size_t n_clips,
                                           std::size_t n_movies, std::uint64_t seed,
                                           double seconds = 4.0) {
  AssetLoader loader(catalog);
  const auto scenes = compose_scenes(catalog, short_recipe(seconds, seed), n_clips, loader);
  DatasetManifest manifest;
  manifest.base_dir = dir;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    write_scene(scenes[i], dir / "clips");
    const auto sdir = dir / "clips" / scenes[i].annotation.scene_id;
    char clip_id[32];
    std::snprintf(clip_id, sizeof clip_id, "clip_%03zu", i);
    char movie_id[32];
    std::snprintf(movie_id, sizeof movie_id, "movie_%02zu", i % n_movies);
    manifest.clips.push_back({clip_id, movie_id, sdir / "mix.wav", sdir / "dx.wav",
                              sdir / "fx.wav", sdir / "mx.wav"});
  }
  save_manifest(manifest, dir / "manifest.json");
  return manifest;
}

}  // namespace cdx::testing
