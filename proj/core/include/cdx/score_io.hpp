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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdx/metrics.hpp"

namespace cdx {

/// One scored clip as stored in per-clip score files.
struct ClipRecord {
  std::string clip_id;
  std::string movie_id;
  ClipScore score;

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

// JSON-lines encoding: {"clip_id", "movie_id", "sdr_dx", "sdr_fx", "sdr_mx",
// "mean"} one object per line.
std::string to_json_line(const ClipRecord& record);
ClipRecord clip_record_from_json(std::string_view line);

void write_score_jsonl(std::span<const ClipRecord> records,
                       const std::filesystem::path& path);
std::vector<ClipRecord> read_score_jsonl(const std::filesystem::path& path);

}  // namespace cdx
