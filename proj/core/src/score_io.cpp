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

#include "cdx/score_io.hpp"

#include <fstream>
#include <json.hpp>

#include "cdx/error.hpp"

namespace cdx {

using nlohmann::json;

std::string to_json_line(const ClipRecord& record) {
  json j = {{"clip_id", record.clip_id},     {"movie_id", record.movie_id},
            {"sdr_dx", record.score.sdr_dx}, {"sdr_fx", record.score.sdr_fx},
            {"sdr_mx", record.score.sdr_mx}, {"mean", record.score.mean}};
  return j.dump();
}

ClipRecord clip_record_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    ClipRecord r;
    r.clip_id = j.at("clip_id").get<std::string>();
    r.movie_id = j.value("movie_id", std::string{});
    r.score.sdr_dx = j.at("sdr_dx").get<double>();
    r.score.sdr_fx = j.at("sdr_fx").get<double>();
    r.score.sdr_mx = j.at("sdr_mx").get<double>();
    r.score.mean = j.contains("mean")
                       ? j.at("mean").get<double>()
                       : ClipScore::from_sources(r.score.sdr_dx, r.score.sdr_fx,
                                                 r.score.sdr_mx)
                             .mean;
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad score record: ") + e.what());
  }
}

void write_score_jsonl(std::span<const ClipRecord> records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<ClipRecord> read_score_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::vector<ClipRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(clip_record_from_json(line));
  }
  return records;
}

}  // namespace cdx
