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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdx/waveform.hpp"

namespace cdx {

struct ClipEntry {
  std::string clip_id;
  std::string movie_id;
  std::filesystem::path mixture;
  std::filesystem::path dx;
  std::filesystem::path fx;
  std::filesystem::path mx;

  const std::filesystem::path& stem_path(Stem s) const;
  std::filesystem::path& stem_path(Stem s);
};

struct MovieInfo {
  std::string movie_id;
  std::optional<std::string> genre;
  std::optional<int> year;
};

/// Clip inventory grouped by movie. Relative paths are resolved against
/// base_dir, the directory holding the manifest file.
struct DatasetManifest {
  std::vector<ClipEntry> clips;
  std::vector<MovieInfo> movies;
  std::filesystem::path base_dir;

  /// Throws DataError on duplicate or empty clip ids.
  void validate() const;
  /// Sorted, de-duplicated movie ids of all clips and movie entries.
  std::vector<std::string> movie_ids() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
  /// Loads mixture and references of one clip.
  StemSet load_clip(const ClipEntry& clip) const;
};

// JSON: {"clips": [{clip_id, movie_id, mixture, dx, fx, mx}],
//        "movies": [{movie_id, genre?, year?}]}
DatasetManifest load_manifest(const std::filesystem::path& path);
/// Writes the manifest; paths under the file's directory are stored relative.
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

}  // namespace cdx
