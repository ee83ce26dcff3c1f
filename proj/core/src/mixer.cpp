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

#include "cdx/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <json.hpp>
#include <stdexcept>

#include "cdx/error.hpp"
#include "cdx/loudness.hpp"
#include "cdx/resample.hpp"
#include "cdx/wav_io.hpp"

namespace cdx {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view asset_class_name(AssetClass c) {
  switch (c) {
    case AssetClass::kSpeech:
      return "speech";
    case AssetClass::kMusic:
      return "music";
    case AssetClass::kForegroundEffects:
      return "fg_effects";
    case AssetClass::kBackgroundEffects:
      return "bg_effects";
  }
  return "?";
}

AssetClass asset_class_from_name(std::string_view name) {
  for (AssetClass c : kAllAssetClasses) {
    if (asset_class_name(c) == name) return c;
  }
  throw std::invalid_argument("unknown asset class '" + std::string(name) + "'");
}

Stem stem_of(AssetClass c) {
  switch (c) {
    case AssetClass::kSpeech:
      return Stem::kDialogue;
    case AssetClass::kMusic:
      return Stem::kMusic;
    case AssetClass::kForegroundEffects:
    case AssetClass::kBackgroundEffects:
      break;
  }
  return Stem::kEffects;
}

const std::vector<Asset>& AssetCatalog::of(AssetClass c) const {
  static const std::vector<Asset> kEmpty;
  const auto it = assets.find(c);
  return it == assets.end() ? kEmpty : it->second;
}

void AssetCatalog::validate() const {
  for (const auto& [cls, list] : assets) {
    for (const auto& a : list) {
      if (!(a.duration_s > 0.0)) {
        throw DataError("catalog: asset '" + a.path.string() + "' in " +
                        std::string(asset_class_name(cls)) +
                        " has non-positive duration");
      }
    }
  }
}

fs::path AssetCatalog::resolve(const fs::path& p) const {
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

AssetCatalog load_catalog(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read catalog '" + path.string() + "'");
  AssetCatalog catalog;
  catalog.base_dir = path.parent_path();
  try {
    const json j = json::parse(in);
    for (const auto& [name, list] : j.items()) {
      const AssetClass cls = asset_class_from_name(name);
      auto& dst = catalog.assets[cls];
      for (const auto& item : list) {
        Asset a;
        a.path = item.at("path").get<std::string>();
        a.duration_s = item.at("duration_s").get<double>();
        if (item.contains("tags")) {
          a.tags = item["tags"].get<std::vector<std::string>>();
        }
        dst.push_back(std::move(a));
      }
    }
  } catch (const json::exception& e) {
    throw FormatError("bad catalog '" + path.string() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError("bad catalog '" + path.string() + "': " + e.what());
  }
  catalog.validate();
  return catalog;
}

void save_catalog(const AssetCatalog& catalog, const fs::path& path) {
  json j = json::object();
  for (const auto& [cls, list] : catalog.assets) {
    json arr = json::array();
    for (const auto& a : list) {
      json item = {{"path", a.path.generic_string()},
                   {"duration_s", a.duration_s}};
      if (!a.tags.empty()) item["tags"] = a.tags;
      arr.push_back(std::move(item));
    }
    j[std::string(asset_class_name(cls))] = std::move(arr);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write catalog '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::optional<Waveform> AssetLoader::load(const Asset& asset, int sample_rate) {
  const auto key = std::make_pair(asset.path.generic_string(), sample_rate);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  std::optional<Waveform> loaded;
  std::string warning;
  try {
    Waveform w = load_wav(catalog_.resolve(asset.path));
    loaded = resample(w, sample_rate);
  } catch (const std::exception& e) {
    warning = "skipping asset '" + asset.path.string() + "': " + e.what();
  }
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(loaded));
  if (inserted && !warning.empty()) warnings_.push_back(warning);
  return it->second;
}

std::vector<std::string> AssetLoader::warnings() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return warnings_;
}

double ztp_pmf(std::size_t k, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ztp_pmf: lambda must be > 0");
  if (k == 0) return 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0) -
                  std::log(-std::expm1(-lambda)));
}

double ztp_mean(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ztp_mean: lambda must be > 0");
  return lambda / -std::expm1(-lambda);
}

std::size_t sample_count_ztp(double lambda, Rng& rng) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("sample_count_ztp: lambda must be finite and > 0");
  }
  const double u = rng.uniform();
  const double log_lambda = std::log(lambda);
  double log_p = log_lambda - lambda - std::log(-std::expm1(-lambda));
  const auto k_max = static_cast<std::size_t>(
      lambda + 50.0 * std::sqrt(lambda) + 50.0);
  double cdf = 0.0;
  for (std::size_t k = 1;; ++k) {
    cdf += std::exp(log_p);
    if (u < cdf || k >= k_max) return k;
    log_p += log_lambda - std::log(static_cast<double>(k + 1));
  }
}

void MixRecipe::validate() const {
  if (!(duration_s > 0.0)) throw std::invalid_argument("recipe: duration must be > 0");
  if (sample_rate <= 0) throw std::invalid_argument("recipe: sample rate must be > 0");
  for (const auto& [cls, e] : events) {
    const std::string name(asset_class_name(cls));
    if (!(e.lambda >= 0.0) || !std::isfinite(e.lambda)) {
      throw std::invalid_argument("recipe: bad lambda for " + name);
    }
    if (!(e.gain_min_db <= e.gain_max_db)) {
      throw std::invalid_argument("recipe: gain range of " + name + " is not ordered");
    }
  }
  for (const auto& [stem, l] : levels) {
    if (!std::isfinite(l.mean_lufs) || !(l.std_lu >= 0.0)) {
      throw std::invalid_argument("recipe: bad level target for " +
                                  std::string(stem_name(stem)));
    }
  }
}

MixRecipe load_recipe(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read recipe '" + path.string() + "'");
  MixRecipe r;
  try {
    const json j = json::parse(in);
    r.duration_s = j.value("duration_s", r.duration_s);
    r.sample_rate = j.value("sample_rate", r.sample_rate);
    r.seed = j.value("seed", r.seed);
    r.trim_to_level = j.value("trim_to_level", r.trim_to_level);
    if (j.contains("events")) {
      for (const auto& [name, e] : j["events"].items()) {
        EventRecipe& dst = r.events[asset_class_from_name(name)];
        dst.lambda = e.value("lambda", dst.lambda);
        if (e.contains("gain_db")) {
          const auto range = e["gain_db"].get<std::vector<double>>();
          if (range.size() != 2) throw FormatError("gain_db must be [min, max]");
          dst.gain_min_db = range[0];
          dst.gain_max_db = range[1];
        }
      }
    }
    if (j.contains("levels")) {
      for (const auto& [name, l] : j["levels"].items()) {
        LevelTarget& dst = r.levels[stem_from_name(name)];
        dst.mean_lufs = l.value("mean_lufs", dst.mean_lufs);
        dst.std_lu = l.value("std_lu", dst.std_lu);
      }
    }
  } catch (const json::exception& e) {
    throw FormatError("bad recipe '" + path.string() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError("bad recipe '" + path.string() + "': " + e.what());
  }
  r.validate();
  return r;
}

namespace {

using Channels = std::array<std::vector<double>, 2>;

Channels zeros(std::size_t n) {
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

void add_excerpt(Channels& dst, const Waveform& src, std::size_t src_offset,
                 std::size_t dst_start, std::size_t length, double gain) {
  for (std::size_t c = 0; c < 2; ++c) {
    auto s = src.channel(c);
    for (std::size_t i = 0; i < length; ++i) {
      dst[c][dst_start + i] += gain * s[src_offset + i];
    }
  }
}

struct Drawn {
  const Asset* asset;
  Waveform audio;
};

}  // namespace

Scene compose_scene(const AssetCatalog& catalog, const MixRecipe& recipe,
                    Rng& rng, AssetLoader& loader, std::string scene_id) {
  recipe.validate();
  const int rate = recipe.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(recipe.duration_s * rate));

  Scene scene;
  auto& ann = scene.annotation;
  ann.scene_id = std::move(scene_id);
  ann.duration_s = static_cast<double>(n) / rate;

  std::map<Stem, Channels> stems;
  for (Stem s : kAllStems) stems[s] = zeros(n);

  auto seconds = [rate](std::size_t samples) {
    return static_cast<double>(samples) / rate;
  };

  for (AssetClass cls : kAllAssetClasses) {
    const auto rec_it = recipe.events.find(cls);
    if (rec_it == recipe.events.end() || rec_it->second.lambda == 0.0) continue;
    const EventRecipe& rec = rec_it->second;
    const auto& pool = catalog.of(cls);
    if (pool.empty()) {
      throw DataError("compose_scene: no assets for class " +
                      std::string(asset_class_name(cls)) + " with lambda > 0");
    }

    const std::size_t count = sample_count_ztp(rec.lambda, rng);
    std::vector<Drawn> drawn;
    for (std::size_t i = 0; i < count; ++i) {
      const Asset& a = pool[rng.uniform_index(pool.size())];
      auto audio = loader.load(a, rate);
      if (!audio || audio->empty()) {
        ann.warnings.push_back("asset '" + a.path.string() + "' unreadable or empty; event skipped");
        continue;
      }
      drawn.push_back({&a, std::move(*audio)});
    }
    Channels& dst = stems[stem_of(cls)];

    if (cls == AssetClass::kSpeech) {
      // Whole utterances, no overlap: drop what cannot fit, then spread the
      // free time over the gaps using sorted uniform cut points.
      std::vector<Drawn> fitted;
      std::size_t used = 0;
      for (auto& d : drawn) {
        if (used + d.audio.frames() > n) {
          ann.warnings.push_back("utterance '" + d.asset->path.string() +
                                 "' does not fit in the scene; dropped");
          continue;
        }
        used += d.audio.frames();
        fitted.push_back(std::move(d));
      }
      const std::size_t free = n - used;
      std::vector<std::size_t> cuts(fitted.size());
      for (auto& c : cuts) {
        c = static_cast<std::size_t>(std::floor(rng.uniform() * static_cast<double>(free + 1)));
        c = std::min(c, free);
      }
      std::sort(cuts.begin(), cuts.end());
      std::size_t before = 0;
      for (std::size_t i = 0; i < fitted.size(); ++i) {
        const std::size_t start = cuts[i] + before;
        const std::size_t len = fitted[i].audio.frames();
        const double gain_db = rng.uniform(rec.gain_min_db, rec.gain_max_db);
        add_excerpt(dst, fitted[i].audio, 0, start, len, db_to_gain(gain_db));
        ann.events.push_back({cls, fitted[i].asset->path.generic_string(),
                              seconds(start), seconds(start + len), 0.0, gain_db});
        before += len;
      }
      continue;
    }

    for (auto& d : drawn) {
      const std::size_t len_in = d.audio.frames();
      std::size_t offset = 0;
      std::size_t start = 0;
      std::size_t len = len_in;
      if (len_in >= n) {
        offset = rng.uniform_index(len_in - n + 1);
        len = n;
      } else {
        start = rng.uniform_index(n - len_in + 1);
      }
      const double gain_db = rng.uniform(rec.gain_min_db, rec.gain_max_db);
      add_excerpt(dst, d.audio, offset, start, len, db_to_gain(gain_db));
      ann.events.push_back({cls, d.asset->path.generic_string(), seconds(start),
                            seconds(start + len), seconds(offset), gain_db});
    }
  }

  std::map<Stem, Waveform> rendered;
  for (Stem s : kAllStems) {
    Channels& ch = stems[s];
    Waveform w(std::move(ch[0]), std::move(ch[1]), rate);
    const auto level = recipe.levels.find(s);
    if (recipe.trim_to_level && level != recipe.levels.end() &&
        w.frames() >= static_cast<std::size_t>(std::llround(0.4 * rate))) {
      const double target = level->second.mean_lufs + level->second.std_lu * rng.normal();
      if (const auto measured = integrated_loudness(w)) {
        const double trim = target - *measured;
        w = apply_gain_db(w, trim);
        ann.trim_db[s] = trim;
      }
    }
    rendered.emplace(s, std::move(w));
  }

  scene.stems.dx = std::move(rendered.at(Stem::kDialogue));
  scene.stems.fx = std::move(rendered.at(Stem::kEffects));
  scene.stems.mx = std::move(rendered.at(Stem::kMusic));
  scene.stems.mixture = sum_sources(scene.stems.sources());
  return scene;
}

std::vector<Scene> compose_scenes(const AssetCatalog& catalog,
                                  const MixRecipe& recipe, std::size_t count,
                                  AssetLoader& loader, std::size_t threads) {
  const Rng root(recipe.seed);
  auto render = [&](std::size_t i) {
    Rng rng = root.derive(i);
    return compose_scene(catalog, recipe, rng, loader,
                         "scene_" + std::to_string(i));
  };
  std::vector<Scene> scenes(count);
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) scenes[i] = render(i);
    return scenes;
  }
  std::vector<std::future<void>> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < count; i += threads) scenes[i] = render(i);
    }));
  }
  for (auto& w : workers) w.get();
  return scenes;
}

std::string annotation_json(const SceneAnnotation& annotation) {
  json events = json::array();
  for (const auto& e : annotation.events) {
    events.push_back({{"class", asset_class_name(e.asset_class)},
                      {"stem", stem_name(stem_of(e.asset_class))},
                      {"asset", e.asset_id},
                      {"start_s", e.start_s},
                      {"end_s", e.end_s},
                      {"source_offset_s", e.source_offset_s},
                      {"gain_db", e.gain_db}});
  }
  json trims = json::object();
  for (const auto& [stem, t] : annotation.trim_db) trims[std::string(stem_name(stem))] = t;
  return json{{"scene_id", annotation.scene_id},
              {"duration_s", annotation.duration_s},
              {"events", events},
              {"trim_db", trims},
              {"warnings", annotation.warnings}}
      .dump(2);
}

void write_scene(const Scene& scene, const fs::path& dir) {
  const fs::path out = dir / scene.annotation.scene_id;
  fs::create_directories(out);
  save_wav(scene.stems.mixture, out / "mix.wav", SampleFormat::kFloat32);
  save_wav(scene.stems.dx, out / "dx.wav", SampleFormat::kFloat32);
  save_wav(scene.stems.fx, out / "fx.wav", SampleFormat::kFloat32);
  save_wav(scene.stems.mx, out / "mx.wav", SampleFormat::kFloat32);
  std::ofstream ann(out / "annotation.json", std::ios::trunc);
  if (!ann) throw IoError("cannot write annotation in '" + out.string() + "'");
  ann << annotation_json(scene.annotation) << '\n';
}

std::vector<OnTheFlyExample> onthefly_batch(const AssetCatalog& catalog,
                                            const OnTheFlyConfig& config,
                                            std::size_t batch_size, Rng& rng,
                                            AssetLoader& loader) {
  if (config.max_speech < 0 || config.max_music < 0 || config.max_effects < 0) {
    throw std::invalid_argument("onthefly_batch: negative source bounds");
  }
  if (!(config.clip_s > 0.0) || config.sample_rate <= 0) {
    throw std::invalid_argument("onthefly_batch: bad clip length or rate");
  }
  if (!(config.gain_min_db <= config.gain_max_db)) {
    throw std::invalid_argument("onthefly_batch: gain range is not ordered");
  }
  std::vector<const Asset*> speech;
  std::vector<const Asset*> music;
  std::vector<const Asset*> effects;
  for (const auto& a : catalog.of(AssetClass::kSpeech)) speech.push_back(&a);
  for (const auto& a : catalog.of(AssetClass::kMusic)) music.push_back(&a);
  for (const auto& a : catalog.of(AssetClass::kForegroundEffects)) effects.push_back(&a);
  for (const auto& a : catalog.of(AssetClass::kBackgroundEffects)) effects.push_back(&a);
  auto require = [](const std::vector<const Asset*>& pool, int max, const char* name) {
    if (max > 0 && pool.empty()) {
      throw DataError(std::string("onthefly_batch: no ") + name + " assets");
    }
  };
  require(speech, config.max_speech, "speech");
  require(music, config.max_music, "music");
  require(effects, config.max_effects, "effect");

  const int rate = config.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(config.clip_s * rate));
  std::vector<OnTheFlyExample> batch;
  batch.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    OnTheFlyExample ex;
    ex.n_speech = rng.uniform_int(0, config.max_speech);
    ex.n_music = rng.uniform_int(0, config.max_music);
    ex.n_effects = rng.uniform_int(0, config.max_effects);

    auto render = [&](const std::vector<const Asset*>& pool, int count) {
      Channels acc = zeros(n);
      for (int i = 0; i < count; ++i) {
        const Asset& a = *pool[rng.uniform_index(pool.size())];
        const double gain_db = rng.uniform(config.gain_min_db, config.gain_max_db);
        const auto audio = loader.load(a, rate);
        if (!audio || audio->empty()) continue;
        const std::size_t len_in = audio->frames();
        const std::size_t offset = len_in > n ? rng.uniform_index(len_in - n + 1) : 0;
        add_excerpt(acc, *audio, offset, 0, std::min(n, len_in), db_to_gain(gain_db));
        ex.gains_db.push_back(gain_db);
      }
      return Waveform(std::move(acc[0]), std::move(acc[1]), rate);
    };
    ex.stems.dx = render(speech, ex.n_speech);
    ex.stems.mx = render(music, ex.n_music);
    ex.stems.fx = render(effects, ex.n_effects);
    ex.stems.mixture = sum_sources(ex.stems.sources());
    batch.push_back(std::move(ex));
  }
  return batch;
}

}  // namespace cdx
