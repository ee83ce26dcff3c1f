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

#include "cdx/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <set>
#include <utility>

#include "cdx/error.hpp"
#include "cdx/wav_io.hpp"

namespace cdx {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path& ClipEntry::stem_path(Stem s) const {
  switch (s) {
    case Stem::kDialogue:
      return dx;
    case Stem::kEffects:
      return fx;
    case Stem::kMusic:
      break;
  }
  return mx;
}

fs::path& ClipEntry::stem_path(Stem s) {
  return const_cast<fs::path&>(std::as_const(*this).stem_path(s));
}

void DatasetManifest::validate() const {
  std::set<std::string> seen;
  for (const auto& c : clips) {
    if (c.clip_id.empty()) throw DataError("manifest: clip with empty clip_id");
    if (!seen.insert(c.clip_id).second) {
      throw DataError("manifest: duplicate clip_id '" + c.clip_id + "'");
    }
  }
}

std::vector<std::string> DatasetManifest::movie_ids() const {
  std::set<std::string> ids;
  for (const auto& c : clips) ids.insert(c.movie_id);
  for (const auto& m : movies) ids.insert(m.movie_id);
  return {ids.begin(), ids.end()};
}

fs::path DatasetManifest::resolve(const fs::path& p) const {
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

StemSet DatasetManifest::load_clip(const ClipEntry& clip) const {
  StemSet s{load_wav(resolve(clip.mixture)), load_wav(resolve(clip.dx)),
            load_wav(resolve(clip.fx)), load_wav(resolve(clip.mx))};
  try {
    s.check_aligned();
  } catch (const std::invalid_argument& e) {
    throw DataError("clip '" + clip.clip_id + "': " + e.what());
  }
  return s;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest '" + path.string() + "'");
  DatasetManifest m;
  m.base_dir = path.parent_path();
  try {
    const json j = json::parse(in);
    for (const auto& c : j.at("clips")) {
      ClipEntry e;
      e.clip_id = c.at("clip_id").get<std::string>();
      e.movie_id = c.at("movie_id").get<std::string>();
      e.mixture = c.at("mixture").get<std::string>();
      e.dx = c.at("dx").get<std::string>();
      e.fx = c.at("fx").get<std::string>();
      e.mx = c.at("mx").get<std::string>();
      m.clips.push_back(std::move(e));
    }
    if (j.contains("movies")) {
      for (const auto& v : j.at("movies")) {
        MovieInfo info;
        info.movie_id = v.at("movie_id").get<std::string>();
        if (v.contains("genre") && !v["genre"].is_null()) {
          info.genre = v["genre"].get<std::string>();
        }
        if (v.contains("year") && !v["year"].is_null()) {
          info.year = v["year"].get<int>();
        }
        m.movies.push_back(std::move(info));
      }
    }
  } catch (const json::exception& e) {
    throw FormatError("bad manifest '" + path.string() + "': " + e.what());
  }
  m.validate();
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  const fs::path dir = fs::absolute(path).parent_path();
  auto portable = [&](const fs::path& p) {
    const fs::path abs = fs::absolute(manifest.resolve(p)).lexically_normal();
    const fs::path rel = abs.lexically_relative(dir);
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return abs.generic_string();
  };
  json clips = json::array();
  for (const auto& c : manifest.clips) {
    clips.push_back({{"clip_id", c.clip_id},
                     {"movie_id", c.movie_id},
                     {"mixture", portable(c.mixture)},
                     {"dx", portable(c.dx)},
                     {"fx", portable(c.fx)},
                     {"mx", portable(c.mx)}});
  }
  json movies = json::array();
  for (const auto& m : manifest.movies) {
    json v = {{"movie_id", m.movie_id}};
    if (m.genre) v["genre"] = *m.genre;
    if (m.year) v["year"] = *m.year;
    movies.push_back(std::move(v));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << json{{"clips", clips}, {"movies", movies}}.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace cdx
