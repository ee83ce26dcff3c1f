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

#include "cdx/error.hpp"
#include "cdx/score_io.hpp"
#include "oracles.hpp"

namespace cdx {
namespace {

TEST(ScoreIo, JsonLineRoundTrip) {
  const ClipRecord r{"clip_7", "movie_2", ClipScore::from_sources(1.25, -3.5, 0.1)};
  EXPECT_EQ(clip_record_from_json(to_json_line(r)), r);
  EXPECT_EQ(to_json_line(r).find('\n'), std::string::npos);
}

TEST(ScoreIo, FileRoundTrip) {
  testing::TempDir dir;
  const std::vector<ClipRecord> v = {{"a", "m1", ClipScore::from_sources(1, 2, 3)},
                                     {"b", "m2", ClipScore::floor()}};
  write_score_jsonl(v, dir.path() / "s.jsonl");
  EXPECT_EQ(read_score_jsonl(dir.path() / "s.jsonl"), v);
}

TEST(ScoreIo, MalformedLineIsAFormatError) {
  EXPECT_THROW(clip_record_from_json("{\"clip_id\": 3"), FormatError);
  EXPECT_THROW(clip_record_from_json("{\"movie_id\": \"x\"}"), FormatError);
}

}  // namespace
}  // namespace cdx
