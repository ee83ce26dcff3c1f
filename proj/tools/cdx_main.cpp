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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdx/adapt.hpp"
#include "cdx/error.hpp"
#include "cdx/harness.hpp"
#include "cdx/loudness.hpp"
#include "cdx/manifest.hpp"
#include "cdx/metrics.hpp"
#include "cdx/mixer.hpp"
#include "cdx/postprocess.hpp"
#include "cdx/separator.hpp"
#include "cdx/sigstats.hpp"
#include "cdx/wav_io.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Bad option values detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw cdx::IoError("cannot write '" + path + "'");
  out << text << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw cdx::IoError("cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw cdx::FormatError("bad JSON in '" + path.string() + "': " + e.what());
  }
}

std::vector<cdx::Stem> parse_stems(const std::vector<std::string>& names) {
  std::vector<cdx::Stem> out;
  for (const auto& n : names) {
    try {
      out.push_back(cdx::stem_from_name(n));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

cdx::PostChainConfig parse_post(const std::string& chain, const std::vector<double>& split) {
  try {
    cdx::PostChainConfig cfg = cdx::post_chain_from_string(chain);
    if (!split.empty()) {
      if (split.size() != 3) throw std::invalid_argument("--split takes three values: dx fx mx");
      cfg.split = {split[0], split[1], split[2]};
      cfg.split.validate();
    }
    return cfg;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

json score_json(const cdx::ClipScore& s) {
  return {{"sdr_dx", s.sdr_dx}, {"sdr_fx", s.sdr_fx}, {"sdr_mx", s.sdr_mx}, {"mean", s.mean}};
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  std::string manifest;
  std::string estimates;
  std::string post = "none";
  std::vector<double> split;
  std::size_t threads = 1;
  std::string submission_id = "submission";
  std::int64_t timestamp = 0;
  std::string phase;
  std::string out;
  std::string csv;
};

void run_eval(const EvalOptions& o) {
  const auto manifest = cdx::load_manifest(o.manifest);
  cdx::EvaluateOptions opts;
  opts.submission_id = o.submission_id;
  opts.timestamp = o.timestamp;
  opts.phase = o.phase;
  opts.threads = o.threads;
  const auto rec = cdx::evaluate(manifest, o.estimates, parse_post(o.post, o.split), opts);
  for (const auto& f : rec.flags) {
    spdlog::warn("{}: {} ({})", f.clip_id, cdx::clip_issue_name(f.issue), f.detail);
  }
  if (!rec.clips.empty()) {
    const auto agg = rec.aggregate();
    spdlog::info("{} clips: SDR dx {:.3f} fx {:.3f} mx {:.3f} mean {:.3f} dB", rec.clips.size(), agg.sdr_dx,
                 agg.sdr_fx, agg.sdr_mx, agg.mean);
  } else {
    spdlog::warn("no scorable clips");
  }
  write_text(cdx::submission_json(rec), o.out);
  if (!o.csv.empty()) cdx::write_submission_csv(rec, o.csv);
}

// ---------------------------------------------------------------- separate

struct SeparateOptions {
  std::string manifest;
  std::string command;
  std::string post = "none";
  std::vector<double> split;
  std::string out;
};

void run_separate(const SeparateOptions& o) {
  const auto manifest = cdx::load_manifest(o.manifest);
  const auto post = parse_post(o.post, o.split);
  cdx::SubprocessSeparator sep(o.command);
  std::size_t failed = 0;
  for (const auto& clip : manifest.clips) {
    try {
      const cdx::Waveform x = cdx::load_wav(manifest.resolve(clip.mixture));
      const cdx::SourceEstimates est = cdx::run_separation_chain(sep, x, post);
      const fs::path dir = fs::path(o.out) / clip.clip_id;
      fs::create_directories(dir);
      for (cdx::Stem s : cdx::kAllStems) {
        cdx::save_wav(est[s], dir / (std::string(cdx::stem_name(s)) + ".wav"));
      }
      spdlog::info("separated {}", clip.clip_id);
    } catch (const cdx::SeparatorError& e) {
      ++failed;
      spdlog::error("{}: {}", clip.clip_id, e.what());
    }
  }
  if (failed > 0) spdlog::warn("{} of {} clips failed", failed, manifest.clips.size());
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  std::string manifest;
  std::string command;
  std::vector<double> grid = {-36, -30, -24, -18, -12};
  std::string post = "none";
  std::vector<double> split;
  std::string out;
};

void run_sweep(const SweepOptions& o) {
  const auto manifest = cdx::load_manifest(o.manifest);
  const auto post = parse_post(o.post, o.split);
  cdx::SubprocessSeparator sep(o.command);
  json clips = json::array();
  std::map<double, std::vector<cdx::ClipScore>> by_level;
  for (const auto& clip : manifest.clips) {
    const cdx::StemSet refs = manifest.load_clip(clip);
    json points = json::array();
    for (const auto& p : cdx::loudness_sweep(sep, refs, o.grid, post)) {
      json jp = {{"input_lufs", p.input_lufs}};
      if (p.score) {
        jp.update(score_json(*p.score));
        by_level[p.input_lufs].push_back(*p.score);
      } else {
        jp["error"] = p.error;
      }
      points.push_back(std::move(jp));
    }
    clips.push_back({{"clip_id", clip.clip_id}, {"points", std::move(points)}});
  }
  json summary = json::array();
  for (const auto& [level, scores] : by_level) {
    json s = score_json(cdx::aggregate(scores));
    s["input_lufs"] = level;
    s["clips"] = scores.size();
    summary.push_back(std::move(s));
  }
  write_text(json{{"summary", summary}, {"clips", clips}}.dump(2), o.out);
}

// ---------------------------------------------------------------- stats

struct StatsOptions {
  std::string manifest;
  std::vector<std::string> stems = {"dx", "fx", "mx"};
  bool include_mixture = false;
  std::string out;
  std::string csv;
};

void run_stats(const StatsOptions& o) {
  const auto manifest = cdx::load_manifest(o.manifest);
  const auto stems = parse_stems(o.stems);
  std::map<std::string, std::vector<cdx::Waveform>> audio;
  for (const auto& clip : manifest.clips) {
    for (cdx::Stem s : stems) audio[std::string(cdx::stem_name(s))].push_back(cdx::load_wav(manifest.resolve(clip.stem_path(s))));
    if (o.include_mixture) audio["mixture"].push_back(cdx::load_wav(manifest.resolve(clip.mixture)));
  }
  std::map<std::string, cdx::ClassStatistics> by_class;
  for (const auto& [name, clips] : audio) {
    by_class[name] = cdx::analyze_class(clips);
    const auto& st = by_class[name];
    spdlog::info("{}: {:.2f} +/- {:.2f} LUFS over {} clips ({} unmeasurable)", name, st.loudness.mean_lufs,
                 st.loudness.std_lu, st.loudness.measured, st.loudness.unmeasurable);
  }
  write_text(cdx::statistics_report_json(by_class), o.out);
  if (!o.csv.empty()) cdx::write_curves_csv(by_class, o.csv);
}

// ---------------------------------------------------------------- adapt

struct AdaptDesignOptions {
  std::string source_stats;
  std::string target_stats;
  std::vector<std::string> stems = {"dx", "fx", "mx"};
  bool loudness = true;
  bool eq = true;
  std::size_t taps = 101;
  std::string out;
};

double report_loudness(const json& report, const std::string& cls, const std::string& file) {
  const auto& l = report.at(cls).at("loudness").at("mean");
  if (l.is_null()) throw cdx::DataError(file + ": class " + cls + " has no measurable loudness");
  return l.get<double>();
}

void run_adapt_design(const AdaptDesignOptions& o) {
  if (!o.loudness && !o.eq) throw UsageError("nothing to design: both --no-loudness and --no-eq given");
  const json src = read_json(o.source_stats);
  const json tgt = read_json(o.target_stats);
  std::map<cdx::Stem, cdx::ClassAdaptation> classes;
  for (cdx::Stem s : parse_stems(o.stems)) {
    const std::string name(cdx::stem_name(s));
    if (!src.contains(name) || !tgt.contains(name)) {
      throw cdx::DataError("class " + name + " missing from one of the statistics reports");
    }
    cdx::ClassAdaptation a;
    try {
      if (o.loudness) {
        a.loudness_offset_lu = cdx::loudness_match_offset(report_loudness(src, name, o.source_stats),
                                                          report_loudness(tgt, name, o.target_stats));
      }
      if (o.eq) {
        cdx::EqMatchOptions opts;
        opts.taps = o.taps;
        cdx::FirFilter f = cdx::design_eq_match_filter(cdx::eq_curve_from_report(o.source_stats, name),
                                                       cdx::eq_curve_from_report(o.target_stats, name), opts);
        f.source_id = o.source_stats;
        f.target_id = o.target_stats;
        a.eq = std::move(f);
      }
    } catch (const json::exception& e) {
      throw cdx::FormatError(std::string("statistics report: ") + e.what());
    }
    if (a.loudness_offset_lu) spdlog::info("{}: loudness offset {:+.2f} LU", name, *a.loudness_offset_lu);
    classes[s] = std::move(a);
  }
  const cdx::AdaptationPlan plan(std::move(classes));
  if (o.out.empty() || o.out == "-") {
    cdx::save_adaptation_plan(plan, "/dev/stdout");
  } else {
    cdx::save_adaptation_plan(plan, o.out);
  }
}

struct AdaptApplyOptions {
  std::string manifest;
  std::string plan;
  std::string out;
};

void run_adapt_apply(const AdaptApplyOptions& o) {
  const auto manifest = cdx::load_manifest(o.manifest);
  const auto plan = cdx::load_adaptation_plan(o.plan);
  const auto result = cdx::adapt_dataset(manifest, plan, o.out);
  for (const auto& f : result.failures) spdlog::error("{}: {}", f.clip_id, f.message);
  spdlog::info("adapted {} clips into {}", result.manifest.clips.size(), o.out);
  if (!result.failures.empty() && result.manifest.clips.empty()) {
    throw cdx::DataError("no clip could be adapted");
  }
}

// ---------------------------------------------------------------- mix

struct MixOptions {
  std::string catalog;
  std::string recipe;
  std::size_t count = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::size_t threads = 1;
  std::string out;
};

void run_mix(const MixOptions& o) {
  const auto catalog = cdx::load_catalog(o.catalog);
  cdx::MixRecipe recipe = o.recipe.empty() ? cdx::MixRecipe{} : cdx::load_recipe(o.recipe);
  if (o.seed) recipe.seed = *o.seed;
  if (o.duration) recipe.duration_s = *o.duration;
  try {
    recipe.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cdx::AssetLoader loader(catalog);
  const auto scenes = cdx::compose_scenes(catalog, recipe, o.count, loader, o.threads);
  for (const auto& w : loader.warnings()) spdlog::warn("{}", w);
  cdx::DatasetManifest manifest;
  manifest.base_dir = o.out;
  for (const auto& scene : scenes) {
    cdx::write_scene(scene, o.out);
    for (const auto& w : scene.annotation.warnings) spdlog::warn("{}: {}", scene.annotation.scene_id, w);
    const fs::path dir = scene.annotation.scene_id;
    manifest.clips.push_back({scene.annotation.scene_id, scene.annotation.scene_id, dir / "mix.wav",
                              dir / "dx.wav", dir / "fx.wav", dir / "mx.wav"});
  }
  cdx::save_manifest(manifest, fs::path(o.out) / "manifest.json");
  spdlog::info("wrote {} scenes to {}", scenes.size(), o.out);
}

// ---------------------------------------------------------------- rank

struct RankOptions {
  std::string submissions;
  std::size_t select_n = 3;
  std::vector<std::string> ranking_movies;
  std::string out;
  std::string csv;
};

// Participant directories holding submission record files.
std::map<std::string, std::vector<cdx::SubmissionRecord>> load_participants(const fs::path& root) {
  if (!fs::is_directory(root)) throw cdx::IoError("'" + root.string() + "' is not a directory");
  std::map<std::string, std::vector<cdx::SubmissionRecord>> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    auto& list = out[entry.path().filename().string()];
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(entry.path())) {
      if (f.path().extension() == ".json") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) list.push_back(cdx::read_submission(f));
  }
  return out;
}

void run_rank(const RankOptions& o) {
  const auto subs = load_participants(o.submissions);
  const auto board = cdx::leaderboard(subs, o.select_n, o.ranking_movies);
  for (const auto& e : board) {
    spdlog::info("{:>3}. {:<24} {:.3f} dB ({})", e.rank, e.participant, e.score.mean, e.submission_id);
  }
  write_text(cdx::leaderboard_json(board), o.out);
  if (!o.csv.empty()) cdx::write_leaderboard_csv(board, o.csv);
}

// ---------------------------------------------------------------- partition

struct PartitionOptions {
  std::string manifest;
  std::vector<std::size_t> sizes = {3, 3, 4};
  std::uint64_t seed = 0;
  std::string out;
};

void run_partition(const PartitionOptions& o) {
  const auto manifest = cdx::load_manifest(o.manifest);
  cdx::PhasePartition p;
  try {
    p = cdx::phase_partition(manifest, o.sizes, o.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_text(json{{"seed", o.seed}, {"groups", p.groups}, {"unassigned", p.unassigned}}.dump(2), o.out);
}

// ---------------------------------------------------------------- overfit

struct OverfitOptions {
  std::string history;
  std::vector<std::string> visible;
  std::vector<std::string> hidden;
  std::string partition;
  int phase = 2;
  std::size_t last_k = 0;
  std::string out;
};

void run_overfit(const OverfitOptions& o) {
  std::vector<std::string> visible = o.visible;
  std::vector<std::string> hidden = o.hidden;
  if (!o.partition.empty()) {
    const json p = read_json(o.partition);
    const auto groups = p.at("groups").get<std::vector<std::vector<std::string>>>();
    if (o.phase < 1 || o.phase >= static_cast<int>(groups.size()) + 1) {
      throw UsageError("--phase must be between 1 and " + std::to_string(groups.size()));
    }
    visible.clear();
    hidden.clear();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto& dst = static_cast<int>(g) < o.phase ? visible : hidden;
      dst.insert(dst.end(), groups[g].begin(), groups[g].end());
    }
  }
  if (visible.empty() || hidden.empty()) {
    throw UsageError("need visible and hidden movies (--visible/--hidden or --partition)");
  }
  std::vector<cdx::SubmissionRecord> history;
  if (fs::is_directory(o.history)) {
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(o.history)) {
      if (f.path().extension() == ".json") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) history.push_back(cdx::read_submission(f));
  } else {
    history.push_back(cdx::read_submission(o.history));
  }
  const auto trace = cdx::overfit_trace(history, visible, hidden, o.last_k);
  json points = json::array();
  for (const auto& p : trace.points) {
    points.push_back({{"submission_id", p.submission_id}, {"hidden_minus_visible", p.hidden_minus_visible}});
  }
  if (trace.slope) spdlog::info("slope {:+.4f} dB per submission", *trace.slope);
  write_text(json{{"points", points}, {"slope", trace.slope ? json(*trace.slope) : json(nullptr)}}.dump(2), o.out);
}

// ---------------------------------------------------------------- curate

struct CurateOptions {
  std::string manifest;
  double tau_dx = 0.022;
  double tau_fx = 0.005;
  double tau_mx = 0.003;
  double window = 11.0;
  double hop = 1.0;
  std::string out;
  std::string export_dir;
};

void run_curate(const CurateOptions& o) {
  const auto manifest = cdx::load_manifest(o.manifest);
  const cdx::RmsThresholds th{o.tau_dx, o.tau_fx, o.tau_mx};
  try {
    th.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(o.window > 0.0) || !(o.hop > 0.0)) throw UsageError("--window and --hop must be positive");
  json report = json::array();
  cdx::DatasetManifest exported;
  exported.base_dir = o.export_dir;
  exported.movies = manifest.movies;
  std::size_t total = 0;
  for (const auto& clip : manifest.clips) {
    const cdx::StemSet stems = manifest.load_clip(clip);
    const auto segs = cdx::select_segments(stems, th, o.window, o.hop);
    const double rate = stems.mixture.sample_rate();
    json js = json::array();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      js.push_back({{"start_s", segs[i].begin / rate}, {"end_s", segs[i].end / rate}});
      if (o.export_dir.empty()) continue;
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "_%03zu", i);
      const std::string id = clip.clip_id + suffix;
      const fs::path dir = id;
      fs::create_directories(exported.resolve(dir));
      cdx::ClipEntry e{id, clip.movie_id, dir / "mix.wav", dir / "dx.wav", dir / "fx.wav", dir / "mx.wav"};
      cdx::save_wav(cdx::slice(stems.mixture, segs[i].begin, segs[i].end), exported.resolve(e.mixture));
      for (cdx::Stem s : cdx::kAllStems) {
        cdx::save_wav(cdx::slice(stems[s], segs[i].begin, segs[i].end), exported.resolve(e.stem_path(s)));
      }
      exported.clips.push_back(std::move(e));
    }
    total += segs.size();
    report.push_back({{"clip_id", clip.clip_id}, {"movie_id", clip.movie_id}, {"segments", std::move(js)}});
  }
  spdlog::info("{} segments accepted across {} clips", total, manifest.clips.size());
  if (!o.export_dir.empty()) cdx::save_manifest(exported, fs::path(o.export_dir) / "manifest.json");
  write_text(report.dump(2), o.out);
}

// Every option with a long name becomes settable as CDX_<SUBCOMMAND>_<NAME>.
void attach_env(CLI::App* app, const std::string& prefix) {
  for (CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string env = prefix + "_" + name;
    for (auto& c : env) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    opt->envname(env);
  }
  for (CLI::App* sub : app->get_subcommands({})) attach_env(sub, prefix + "_" + sub->get_name());
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("cdx");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"cdx: cinematic audio separation datasets, metrics and evaluation"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<cdx::cli::JsonConfig>());
  app.set_config("--config", "", "JSON file with option values, one object per subcommand");
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  EvalOptions eval;
  auto* c_eval = app.add_subcommand("eval", "Score estimate directories against a manifest");
  c_eval->add_option("--manifest", eval.manifest, "Dataset manifest JSON")->required();
  c_eval->add_option("--estimates", eval.estimates, "Root holding {clip_id}/{dx,fx,mx}.wav")->required();
  c_eval->add_option("--post", eval.post, "Post chain: none, ls, inv-ls, mc, ls+mc, mc+ls, ...")->capture_default_str();
  c_eval->add_option("--split", eval.split, "Residual split for mc: dx fx mx")->expected(3);
  c_eval->add_option("--threads", eval.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  c_eval->add_option("--submission-id", eval.submission_id)->capture_default_str();
  c_eval->add_option("--timestamp", eval.timestamp, "Seconds since the epoch");
  c_eval->add_option("--phase", eval.phase);
  c_eval->add_option("--out", eval.out, "Report JSON (stdout when omitted)");
  c_eval->add_option("--csv", eval.csv, "Per-clip CSV");

  SeparateOptions sep;
  auto* c_sep = app.add_subcommand("separate", "Run an external separator over a manifest");
  c_sep->add_option("--manifest", sep.manifest)->required();
  c_sep->add_option("--command", sep.command, "Invoked as: command input.wav output_dir")->required();
  c_sep->add_option("--post", sep.post)->capture_default_str();
  c_sep->add_option("--split", sep.split)->expected(3);
  c_sep->add_option("--out", sep.out, "Estimates root")->required();

  SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Score a separator across input loudness levels");
  c_sweep->add_option("--manifest", sweep.manifest)->required();
  c_sweep->add_option("--command", sweep.command)->required();
  c_sweep->add_option("--grid", sweep.grid, "Input loudness levels in LUFS")->capture_default_str();
  c_sweep->add_option("--post", sweep.post)->capture_default_str();
  c_sweep->add_option("--split", sweep.split)->expected(3);
  c_sweep->add_option("--out", sweep.out);

  StatsOptions stats;
  auto* c_stats = app.add_subcommand("stats", "Loudness, EQ, panning and DRC statistics per stem class");
  c_stats->add_option("--manifest", stats.manifest)->required();
  c_stats->add_option("--stems", stats.stems)->capture_default_str();
  c_stats->add_flag("--mixture", stats.include_mixture, "Also analyze the mixtures");
  c_stats->add_option("--out", stats.out);
  c_stats->add_option("--csv", stats.csv, "Per-bin curves CSV");

  auto* c_adapt = app.add_subcommand("adapt", "Design or apply loudness/EQ adaptation");
  c_adapt->require_subcommand(1);
  AdaptDesignOptions design;
  auto* c_design = c_adapt->add_subcommand("design", "Build an adaptation plan from two statistics reports");
  c_design->add_option("--source-stats", design.source_stats)->required();
  c_design->add_option("--target-stats", design.target_stats)->required();
  c_design->add_option("--stems", design.stems)->capture_default_str();
  c_design->add_flag("--loudness,!--no-loudness", design.loudness, "Include loudness offsets");
  c_design->add_flag("--eq,!--no-eq", design.eq, "Include EQ filters");
  c_design->add_option("--taps", design.taps, "FIR length (odd)")->capture_default_str();
  c_design->add_option("--out", design.out);
  AdaptApplyOptions apply;
  auto* c_apply = c_adapt->add_subcommand("apply", "Adapt every clip of a manifest");
  c_apply->add_option("--manifest", apply.manifest)->required();
  c_apply->add_option("--plan", apply.plan)->required();
  c_apply->add_option("--out", apply.out, "Output directory")->required();

  MixOptions mix;
  auto* c_mix = app.add_subcommand("mix", "Render synthetic scenes from an asset catalog");
  c_mix->add_option("--catalog", mix.catalog)->required();
  c_mix->add_option("--recipe", mix.recipe, "Recipe JSON (defaults when omitted)");
  c_mix->add_option("--count", mix.count)->capture_default_str();
  c_mix->add_option("--seed", mix.seed);
  c_mix->add_option("--duration", mix.duration, "Scene length in seconds");
  c_mix->add_option("--threads", mix.threads)->capture_default_str()->check(CLI::PositiveNumber);
  c_mix->add_option("--out", mix.out)->required();

  RankOptions rank;
  auto* c_rank = app.add_subcommand("rank", "Leaderboard from per-participant submission records");
  c_rank->add_option("--submissions", rank.submissions, "Directory with one subdirectory per participant")->required();
  c_rank->add_option("--select-n", rank.select_n)->capture_default_str()->check(CLI::PositiveNumber);
  c_rank->add_option("--ranking-movies", rank.ranking_movies, "Movies used to auto-select submissions");
  c_rank->add_option("--out", rank.out);
  c_rank->add_option("--csv", rank.csv);

  PartitionOptions part;
  auto* c_part = app.add_subcommand("partition", "Split the manifest's movies into phase groups");
  c_part->add_option("--manifest", part.manifest)->required();
  c_part->add_option("--sizes", part.sizes)->capture_default_str();
  c_part->add_option("--seed", part.seed)->capture_default_str();
  c_part->add_option("--out", part.out);

  OverfitOptions over;
  auto* c_over = app.add_subcommand("overfit", "Hidden minus visible score over a submission history");
  c_over->add_option("--history", over.history, "Submission record file or directory")->required();
  c_over->add_option("--visible", over.visible);
  c_over->add_option("--hidden", over.hidden);
  c_over->add_option("--partition", over.partition, "Partition JSON from 'cdx partition'");
  c_over->add_option("--phase", over.phase, "Groups 1..phase are visible")->capture_default_str();
  c_over->add_option("--last-k", over.last_k, "Fit the slope over the last k submissions (0 = all)");
  c_over->add_option("--out", over.out);

  CurateOptions cur;
  auto* c_cur = app.add_subcommand("curate", "Find windows where all three classes are active");
  c_cur->add_option("--manifest", cur.manifest)->required();
  c_cur->add_option("--tau-dx", cur.tau_dx)->capture_default_str();
  c_cur->add_option("--tau-fx", cur.tau_fx)->capture_default_str();
  c_cur->add_option("--tau-mx", cur.tau_mx)->capture_default_str();
  c_cur->add_option("--window", cur.window, "Seconds")->capture_default_str();
  c_cur->add_option("--hop", cur.hop, "Seconds")->capture_default_str();
  c_cur->add_option("--out", cur.out);
  c_cur->add_option("--export", cur.export_dir, "Write accepted segments and a manifest here");

  attach_env(&app, "CDX");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*c_eval) run_eval(eval);
    if (*c_sep) run_separate(sep);
    if (*c_sweep) run_sweep(sweep);
    if (*c_stats) run_stats(stats);
    if (*c_design) run_adapt_design(design);
    if (*c_apply) run_adapt_apply(apply);
    if (*c_mix) run_mix(mix);
    if (*c_rank) run_rank(rank);
    if (*c_part) run_partition(part);
    if (*c_over) run_overfit(over);
    if (*c_cur) run_curate(cur);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return 0;
}
