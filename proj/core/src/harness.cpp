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

#include "cdx/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cdx/error.hpp"
#include "cdx/random.hpp"
#include "cdx/separator.hpp"

namespace cdx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::pair<ClipIssue, std::string_view>, 4> kIssueNames = {{
    {ClipIssue::kMissingEstimate, "missing_estimate"},
    {ClipIssue::kCorruptEstimate, "corrupt_estimate"},
    {ClipIssue::kSilentReference, "silent_reference"},
    {ClipIssue::kUnreadableReference, "unreadable_reference"},
}};

ClipIssue clip_issue_from_name(std::string_view name) {
  for (const auto& [issue, n] : kIssueNames) {
    if (n == name) return issue;
  }
  throw FormatError("unknown clip issue '" + std::string(name) + "'");
}

json score_json(const ClipScore& s) {
  return {{"sdr_dx", s.sdr_dx}, {"sdr_fx", s.sdr_fx}, {"sdr_mx", s.sdr_mx}, {"mean", s.mean}};
}

struct ClipOutcome {
  std::optional<ClipRecord> record;
  std::optional<ClipFlag> flag;
  std::string fatal;
};

ClipOutcome score_clip(const DatasetManifest& manifest, const ClipEntry& clip,
                       const fs::path& estimates_root, const PostChainConfig& post) {
  ClipOutcome out;
  StemSet refs;
  try {
    refs = manifest.load_clip(clip);
  } catch (const std::exception& e) {
    out.fatal = "clip '" + clip.clip_id + "': " + e.what();
    return out;
  }
  const fs::path dir = estimates_root / clip.clip_id;
  auto floored = [&](ClipIssue issue, std::string detail) {
    out.record = ClipRecord{clip.clip_id, clip.movie_id, ClipScore::floor()};
    out.flag = ClipFlag{clip.clip_id, issue, std::move(detail)};
  };

  for (Stem s : kAllStems) {
    const fs::path p = dir / (std::string(stem_name(s)) + ".wav");
    if (!fs::exists(p)) {
      floored(ClipIssue::kMissingEstimate, p.string());
      break;
    }
  }
  SourceEstimates est;
  if (!out.flag) {
    try {
      est = load_estimates(dir, refs.mixture);
    } catch (const std::exception& e) {
      floored(ClipIssue::kCorruptEstimate, e.what());
    }
  }
  if (!out.flag && !post.is_noop()) est = apply_post_chain(refs.mixture, std::move(est), post);

  // A silent reference makes the clip unscorable whatever the estimates are.
  const auto score = global_sdr_clip(refs, out.flag ? refs.sources() : est);
  if (!score) {
    out.record.reset();
    out.flag = ClipFlag{clip.clip_id, ClipIssue::kSilentReference, "reference stem is all zeros"};
    return out;
  }
  if (!out.flag) out.record = ClipRecord{clip.clip_id, clip.movie_id, *score};
  return out;
}

}  // namespace

std::string_view clip_issue_name(ClipIssue issue) {
  for (const auto& [i, n] : kIssueNames) {
    if (i == issue) return n;
  }
  return "?";
}

ClipScore SubmissionRecord::aggregate() const {
  std::vector<ClipScore> scores;
  scores.reserve(clips.size());
  for (const auto& c : clips) scores.push_back(c.score);
  return cdx::aggregate(scores);
}

std::optional<ClipScore> SubmissionRecord::aggregate_movies(std::span<const std::string> movies) const {
  const std::set<std::string> wanted(movies.begin(), movies.end());
  std::vector<ClipScore> scores;
  for (const auto& c : clips) {
    if (wanted.count(c.movie_id)) scores.push_back(c.score);
  }
  if (scores.empty()) return std::nullopt;
  return cdx::aggregate(scores);
}

SubmissionRecord evaluate(const DatasetManifest& manifest, const fs::path& estimates_root,
                          const PostChainConfig& post, const EvaluateOptions& options) {
  manifest.validate();
  const std::size_t n = manifest.clips.size();
  std::vector<ClipOutcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      outcomes[i] = score_clip(manifest, manifest.clips[i], estimates_root, post);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  SubmissionRecord rec;
  rec.submission_id = options.submission_id;
  rec.timestamp = options.timestamp;
  rec.phase = options.phase;
  for (auto& o : outcomes) {
    if (!o.fatal.empty()) throw DataError(o.fatal);
    if (o.record) rec.clips.push_back(std::move(*o.record));
    if (o.flag) rec.flags.push_back(std::move(*o.flag));
  }
  std::sort(rec.clips.begin(), rec.clips.end(),
            [](const ClipRecord& a, const ClipRecord& b) { return a.clip_id < b.clip_id; });
  std::sort(rec.flags.begin(), rec.flags.end(),
            [](const ClipFlag& a, const ClipFlag& b) { return a.clip_id < b.clip_id; });
  return rec;
}

std::string submission_json(const SubmissionRecord& record) {
  json clips = json::array();
  for (const auto& c : record.clips) {
    json j = score_json(c.score);
    j["clip_id"] = c.clip_id;
    j["movie_id"] = c.movie_id;
    clips.push_back(std::move(j));
  }
  json flags = json::array();
  for (const auto& f : record.flags) {
    flags.push_back({{"clip_id", f.clip_id}, {"issue", clip_issue_name(f.issue)}, {"detail", f.detail}});
  }
  json j = {{"submission_id", record.submission_id},
            {"timestamp", record.timestamp},
            {"phase", record.phase},
            {"selected", record.selected},
            {"aggregate", record.clips.empty() ? json(nullptr) : score_json(record.aggregate())},
            {"clips", std::move(clips)},
            {"flags", std::move(flags)}};
  return j.dump(2);
}

SubmissionRecord submission_from_json(std::string_view text) {
  SubmissionRecord rec;
  try {
    const json j = json::parse(text);
    rec.submission_id = j.at("submission_id").get<std::string>();
    rec.timestamp = j.value("timestamp", std::int64_t{0});
    rec.phase = j.value("phase", std::string());
    rec.selected = j.value("selected", false);
    for (const auto& c : j.at("clips")) {
      rec.clips.push_back(clip_record_from_json(c.dump()));
    }
    if (j.contains("flags")) {
      for (const auto& f : j["flags"]) {
        rec.flags.push_back({f.at("clip_id").get<std::string>(),
                             clip_issue_from_name(f.at("issue").get<std::string>()),
                             f.value("detail", std::string())});
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad submission record: ") + e.what());
  }
  return rec;
}

void write_submission(const SubmissionRecord& record, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << submission_json(record) << '\n';
}

SubmissionRecord read_submission(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return submission_from_json(ss.str());
}

void write_submission_csv(const SubmissionRecord& record, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "clip_id,movie_id,sdr_dx,sdr_fx,sdr_mx,mean\n";
  for (const auto& c : record.clips) {
    out << c.clip_id << ',' << c.movie_id << ',' << c.score.sdr_dx << ',' << c.score.sdr_fx
        << ',' << c.score.sdr_mx << ',' << c.score.mean << '\n';
  }
}

PhasePartition phase_partition(std::vector<std::string> movie_ids,
                               std::span<const std::size_t> sizes, std::uint64_t seed) {
  std::sort(movie_ids.begin(), movie_ids.end());
  movie_ids.erase(std::unique(movie_ids.begin(), movie_ids.end()), movie_ids.end());
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (sizes.empty() || std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) {
    throw std::invalid_argument("phase_partition: group sizes must be positive");
  }
  if (total > movie_ids.size()) {
    throw std::invalid_argument("phase_partition: group sizes sum to " + std::to_string(total) +
                                " but there are only " + std::to_string(movie_ids.size()) +
                                " movies");
  }
  Rng rng(seed);
  for (std::size_t i = movie_ids.size(); i > 1; --i) {
    std::swap(movie_ids[i - 1], movie_ids[rng.uniform_index(i)]);
  }
  PhasePartition out;
  auto it = movie_ids.begin();
  for (std::size_t s : sizes) {
    std::vector<std::string> g(it, it + static_cast<std::ptrdiff_t>(s));
    std::sort(g.begin(), g.end());
    out.groups.push_back(std::move(g));
    it += static_cast<std::ptrdiff_t>(s);
  }
  out.unassigned.assign(it, movie_ids.end());
  std::sort(out.unassigned.begin(), out.unassigned.end());
  return out;
}

PhasePartition phase_partition(const DatasetManifest& manifest,
                               std::span<const std::size_t> sizes, std::uint64_t seed) {
  return phase_partition(manifest.movie_ids(), sizes, seed);
}

OverfitTrace overfit_trace(std::span<const SubmissionRecord> history,
                           std::span<const std::string> visible_movies,
                           std::span<const std::string> hidden_movies, std::size_t last_k) {
  if (history.empty()) throw DataError("overfit_trace: empty history");
  std::vector<const SubmissionRecord*> ordered;
  for (const auto& r : history) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->timestamp < b->timestamp; });

  OverfitTrace trace;
  for (const auto* r : ordered) {
    const auto visible = r->aggregate_movies(visible_movies);
    const auto hidden = r->aggregate_movies(hidden_movies);
    if (!visible || !hidden) {
      throw DataError("overfit_trace: submission '" + r->submission_id +
                      "' has no clips in one of the movie groups");
    }
    trace.points.push_back({r->submission_id, hidden->mean - visible->mean});
  }
  const std::size_t n = trace.points.size();
  const std::size_t k = (last_k == 0 || last_k > n) ? n : last_k;
  if (k < 2) return trace;
  const std::size_t first = n - k;
  const double x_mean = static_cast<double>(first + n - 1) / 2.0;
  double y_mean = 0.0;
  for (std::size_t i = first; i < n; ++i) y_mean += trace.points[i].hidden_minus_visible;
  y_mean /= static_cast<double>(k);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    sxy += dx * (trace.points[i].hidden_minus_visible - y_mean);
    sxx += dx * dx;
  }
  trace.slope = sxy / sxx;
  return trace;
}

std::vector<LeaderboardEntry> leaderboard(
    const std::map<std::string, std::vector<SubmissionRecord>>& submissions, std::size_t select_n,
    std::span<const std::string> ranking_movies) {
  if (select_n == 0) throw std::invalid_argument("leaderboard: select_n must be > 0");
  struct Candidate {
    LeaderboardEntry entry;
    std::int64_t timestamp;
  };
  std::vector<Candidate> best;
  for (const auto& [participant, subs] : submissions) {
    std::vector<const SubmissionRecord*> pool;
    for (const auto& s : subs) {
      if (s.selected && !s.clips.empty()) pool.push_back(&s);
    }
    if (pool.empty()) {
      std::vector<std::pair<double, const SubmissionRecord*>> ranked;
      for (const auto& s : subs) {
        const auto score =
            ranking_movies.empty()
                ? (s.clips.empty() ? std::nullopt : std::optional<ClipScore>(s.aggregate()))
                : s.aggregate_movies(ranking_movies);
        if (score && !s.clips.empty()) ranked.emplace_back(score->mean, &s);
      }
      std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->timestamp < b.second->timestamp;
      });
      for (std::size_t i = 0; i < ranked.size() && i < select_n; ++i) {
        pool.push_back(ranked[i].second);
      }
    }
    std::optional<Candidate> top;
    for (const auto* s : pool) {
      const ClipScore score = s->aggregate();
      if (!top || score.mean > top->entry.score.mean ||
          (score.mean == top->entry.score.mean && s->timestamp < top->timestamp)) {
        top = Candidate{{participant, s->submission_id, score, 0}, s->timestamp};
      }
    }
    if (top) best.push_back(std::move(*top));
  }
  if (best.empty()) throw DataError("leaderboard: no scored submissions");
  std::sort(best.begin(), best.end(), [](const Candidate& a, const Candidate& b) {
    if (a.entry.score.mean != b.entry.score.mean) return a.entry.score.mean > b.entry.score.mean;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.entry.participant < b.entry.participant;
  });
  std::vector<LeaderboardEntry> out;
  for (std::size_t i = 0; i < best.size(); ++i) {
    best[i].entry.rank = i + 1;
    out.push_back(std::move(best[i].entry));
  }
  return out;
}

std::string leaderboard_json(std::span<const LeaderboardEntry> entries) {
  json arr = json::array();
  for (const auto& e : entries) {
    json j = score_json(e.score);
    j["rank"] = e.rank;
    j["participant"] = e.participant;
    j["submission_id"] = e.submission_id;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

void write_leaderboard_csv(std::span<const LeaderboardEntry> entries, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "rank,participant,submission_id,mean,sdr_dx,sdr_fx,sdr_mx\n";
  for (const auto& e : entries) {
    out << e.rank << ',' << e.participant << ',' << e.submission_id << ',' << e.score.mean << ','
        << e.score.sdr_dx << ',' << e.score.sdr_fx << ',' << e.score.sdr_mx << '\n';
  }
}

}  // namespace cdx
