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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdx/manifest.hpp"
#include "cdx/metrics.hpp"
#include "cdx/postprocess.hpp"
#include "cdx/score_io.hpp"

namespace cdx {

enum class ClipIssue { kMissingEstimate, kCorruptEstimate, kSilentReference, kUnreadableReference };
std::string_view clip_issue_name(ClipIssue issue);

struct ClipFlag {
  std::string clip_id;
  ClipIssue issue = ClipIssue::kMissingEstimate;
  std::string detail;
};

/// Scores of one submission. Clips with missing or corrupt estimates carry
/// the floor score; clips with a silent reference stem are left out.
struct SubmissionRecord {
  std::string submission_id;
  /// Seconds since the epoch; orders submissions and breaks ranking ties.
  std::int64_t timestamp = 0;
  std::string phase;
  /// Marked by the participant for final evaluation.
  bool selected = false;
  std::vector<ClipRecord> clips;  // sorted by clip_id
  std::vector<ClipFlag> flags;

  /// Mean over all scored clips. Throws DataError when there are none.
  ClipScore aggregate() const;
  /// Mean over the clips of the given movies, std::nullopt when none match.
  std::optional<ClipScore> aggregate_movies(std::span<const std::string> movies) const;
};

struct EvaluateOptions {
  std::string submission_id = "submission";
  std::int64_t timestamp = 0;
  std::string phase;
  std::size_t threads = 1;
};

/// Scores {estimates_root}/{clip_id}/{dx,fx,mx}.wav against every manifest
/// clip, optionally post-processing the estimates first. Unreadable
/// references throw DataError.
SubmissionRecord evaluate(const DatasetManifest& manifest,
                          const std::filesystem::path& estimates_root,
                          const PostChainConfig& post = {},
                          const EvaluateOptions& options = {});

// Report JSON: {"submission_id", "timestamp", "phase", "selected",
//   "aggregate": {sdr_dx, sdr_fx, sdr_mx, mean} | null,
//   "clips": [{clip_id, movie_id, sdr_dx, sdr_fx, sdr_mx, mean}],
//   "flags": [{clip_id, issue, detail}]}
std::string submission_json(const SubmissionRecord& record);
SubmissionRecord submission_from_json(std::string_view text);
void write_submission(const SubmissionRecord& record, const std::filesystem::path& path);
SubmissionRecord read_submission(const std::filesystem::path& path);
/// One row per clip: clip_id,movie_id,sdr_dx,sdr_fx,sdr_mx,mean.
void write_submission_csv(const SubmissionRecord& record, const std::filesystem::path& path);

struct PhasePartition {
  std::vector<std::vector<std::string>> groups;
  /// Movies left over when the group sizes add up to fewer than the movies.
  std::vector<std::string> unassigned;
};

/// Shuffles the sorted, de-duplicated movie ids with the seed and cuts them
/// into consecutive groups of the given sizes; any remaining movies are
/// returned as unassigned. Throws std::invalid_argument when the sizes are
/// empty, contain a zero or exceed the number of movies.
PhasePartition phase_partition(const DatasetManifest& manifest,
                               std::span<const std::size_t> sizes,
                               std::uint64_t seed);
PhasePartition phase_partition(std::vector<std::string> movie_ids,
                               std::span<const std::size_t> sizes,
                               std::uint64_t seed);

struct OverfitPoint {
  std::string submission_id;
  double hidden_minus_visible = 0.0;
};

struct OverfitTrace {
  std::vector<OverfitPoint> points;  // chronological
  /// Least-squares slope of the last last_k diffs against submission index;
  /// std::nullopt with fewer than two points.
  std::optional<double> slope;
};

/// Throws DataError on an empty history or when a record has no clips in
/// one of the groups.
OverfitTrace overfit_trace(std::span<const SubmissionRecord> history,
                           std::span<const std::string> visible_movies,
                           std::span<const std::string> hidden_movies,
                           std::size_t last_k = 0);  // 0 = all

struct LeaderboardEntry {
  std::string participant;
  std::string submission_id;
  ClipScore score;
  std::size_t rank = 0;  // 1-based
};

/// Per participant, considers the submissions marked selected or, when none
/// is marked, the select_n best ones by mean SDR over `ranking_movies` (all
/// clips when empty), and keeps the best of those by full-set mean SDR.
/// Ranked by mean descending; equal means go to the earlier timestamp, then
/// to the participant name. Throws DataError when nothing is scored.
std::vector<LeaderboardEntry> leaderboard(
    const std::map<std::string, std::vector<SubmissionRecord>>& submissions,
    std::size_t select_n = 3,
    std::span<const std::string> ranking_movies = {});

std::string leaderboard_json(std::span<const LeaderboardEntry> entries);
void write_leaderboard_csv(std::span<const LeaderboardEntry> entries,
                           const std::filesystem::path& path);

}  // namespace cdx
