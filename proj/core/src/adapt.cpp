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

#include "cdx/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <stdexcept>

#include "cdx/error.hpp"
#include "cdx/wav_io.hpp"

namespace cdx {

namespace fs = std::filesystem;
using nlohmann::json;

void FirFilter::validate() const {
  if (taps.empty() || taps.size() % 2 == 0) {
    throw std::invalid_argument("FirFilter: tap count must be odd, got " +
                                std::to_string(taps.size()));
  }
  for (std::size_t i = 0; i < taps.size(); ++i) {
    if (!std::isfinite(taps[i])) {
      throw std::invalid_argument("FirFilter: non-finite tap");
    }
    if (taps[i] != taps[taps.size() - 1 - i]) {
      throw std::invalid_argument("FirFilter: taps are not symmetric");
    }
  }
}

FirFilter FirFilter::identity(std::size_t taps) {
  if (taps % 2 == 0) {
    throw std::invalid_argument("FirFilter: tap count must be odd");
  }
  FirFilter f;
  f.taps.assign(taps, 0.0);
  f.taps[taps / 2] = 1.0;
  return f;
}

double FirFilter::amplitude(double frequency_hz, int sample_rate) const {
  const std::size_t mid = taps.size() / 2;
  const double w = 2.0 * std::numbers::pi * frequency_hz / sample_rate;
  double a = taps[mid];
  for (std::size_t k = 1; k <= mid; ++k) {
    a += 2.0 * taps[mid - k] * std::cos(w * static_cast<double>(k));
  }
  return a;
}

double loudness_match_offset(double source_mean_lufs,
                             double target_mean_lufs) {
  return target_mean_lufs - source_mean_lufs;
}

namespace {

void check_same_grid(const EqCurve& a, const EqCurve& b) {
  if (a.bins() == 0 || a.bins() != b.bins() ||
      a.mean_db.size() != a.bins() || b.mean_db.size() != b.bins()) {
    throw std::invalid_argument("EQ curves have different frequency grids");
  }
  for (std::size_t k = 0; k < a.bins(); ++k) {
    const double tol = 1e-9 * std::max(1.0, std::abs(a.frequencies[k]));
    if (std::abs(a.frequencies[k] - b.frequencies[k]) > tol) {
      throw std::invalid_argument("EQ curves have different frequency grids");
    }
    if (!std::isfinite(a.mean_db[k]) || !std::isfinite(b.mean_db[k])) {
      throw std::invalid_argument("EQ curve contains non-finite values");
    }
  }
}

}  // namespace

FirFilter design_eq_match_filter(const EqCurve& source, const EqCurve& target,
                                 const EqMatchOptions& options) {
  check_same_grid(source, target);
  if (options.taps < 3 || options.taps % 2 == 0) {
    throw std::invalid_argument("design_eq_match_filter: taps must be odd >= 3");
  }
  if (!(options.hold_below_hz < options.hold_above_hz)) {
    throw std::invalid_argument("design_eq_match_filter: bad hold range");
  }
  const auto n_taps = static_cast<double>(options.taps);
  const std::size_t mid = options.taps / 2;
  const double fs = options.sample_rate;
  const double spacing = fs / n_taps;

  auto difference_db = [&](double f) {
    const double held = std::clamp(f, options.hold_below_hz, options.hold_above_hz);
    return target.mean_db_at(held) - source.mean_db_at(held);
  };

  // Single-pass amplitude at f_k = k fs / taps: half the dB difference.
  std::vector<double> amp(mid + 1);
  for (std::size_t k = 0; k <= mid; ++k) {
    const double fk = static_cast<double>(k) * spacing;
    const double lo = fk - spacing / 2.0;
    const double hi = fk + spacing / 2.0;
    double sum = 0.0;
    std::size_t count = 0;
    for (double f : source.frequencies) {
      if (f >= lo && f < hi) {
        sum += difference_db(f);
        ++count;
      }
    }
    const double diff = count > 0 ? sum / static_cast<double>(count)
                                  : difference_db(fk);
    amp[k] = std::pow(10.0, diff / 40.0);
  }

  FirFilter fir;
  fir.taps.assign(options.taps, 0.0);
  for (std::size_t n = 0; n <= mid; ++n) {
    const double offset = static_cast<double>(n) - static_cast<double>(mid);
    double h = amp[0];
    for (std::size_t k = 1; k <= mid; ++k) {
      h += 2.0 * amp[k] *
           std::cos(2.0 * std::numbers::pi * static_cast<double>(k) * offset /
                    n_taps);
    }
    h /= n_taps;
    const double window =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                             static_cast<double>(n + 1) / (n_taps + 1.0));
    fir.taps[n] = h * window;
    fir.taps[options.taps - 1 - n] = fir.taps[n];
  }
  return fir;
}

namespace {

// Causal FIR with zero initial state.
std::vector<double> fir_filter(std::span<const double> x,
                               std::span<const double> h) {
  std::vector<double> y(x.size(), 0.0);
  const std::size_t taps = h.size();
  for (std::size_t n = 0; n < x.size(); ++n) {
    const std::size_t kmax = std::min(taps, n + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  }
  return y;
}

std::vector<double> filtfilt_channel(std::span<const double> x,
                                     std::span<const double> h) {
  const std::size_t pad = h.size() - 1;
  const std::size_t n = x.size();
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t j = 0; j < pad; ++j) {
    ext[j] = 2.0 * x[0] - x[pad - j];
    ext[pad + n + j] = 2.0 * x[n - 1] - x[n - 2 - j];
  }
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));

  std::vector<double> fwd = fir_filter(ext, h);
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd = fir_filter(fwd, h);
  std::reverse(bwd.begin(), bwd.end());
  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad),
          bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace

Waveform zero_phase_apply(const Waveform& x, const FirFilter& fir) {
  fir.validate();
  if (x.frames() < 3 * fir.taps.size()) {
    throw std::invalid_argument(
        "zero_phase_apply: input of " + std::to_string(x.frames()) +
        " samples is shorter than 3 * taps = " +
        std::to_string(3 * fir.taps.size()));
  }
  return Waveform(filtfilt_channel(x.left(), fir.taps),
                  filtfilt_channel(x.right(), fir.taps), x.sample_rate());
}

AdaptationPlan::AdaptationPlan(std::map<Stem, ClassAdaptation> classes)
    : classes_(std::move(classes)) {
  bool any = false;
  for (const auto& [stem, a] : classes_) {
    if (a.loudness_offset_lu && !std::isfinite(*a.loudness_offset_lu)) {
      throw std::invalid_argument("adaptation plan: non-finite offset for " +
                                  std::string(stem_name(stem)));
    }
    if (a.eq) a.eq->validate();
    any = any || !a.empty();
  }
  if (!any) throw std::invalid_argument("adaptation plan: no adaptation given");
}

const ClassAdaptation* AdaptationPlan::find(Stem s) const {
  const auto it = classes_.find(s);
  return it == classes_.end() ? nullptr : &it->second;
}

AdaptationPlan load_adaptation_plan(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read plan '" + path.string() + "'");
  std::map<Stem, ClassAdaptation> classes;
  try {
    const json j = json::parse(in);
    for (const auto& [name, body] : j.items()) {
      ClassAdaptation a;
      if (body.contains("loudness_offset_lu") &&
          !body["loudness_offset_lu"].is_null()) {
        a.loudness_offset_lu = body["loudness_offset_lu"].get<double>();
      }
      if (body.contains("eq_filter_taps") && !body["eq_filter_taps"].is_null()) {
        FirFilter f;
        f.taps = body["eq_filter_taps"].get<std::vector<double>>();
        f.source_id = body.value("eq_source", std::string{});
        f.target_id = body.value("eq_target", std::string{});
        a.eq = std::move(f);
      }
      classes[stem_from_name(name)] = std::move(a);
    }
    return AdaptationPlan(std::move(classes));
  } catch (const json::exception& e) {
    throw FormatError("bad plan '" + path.string() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError("bad plan '" + path.string() + "': " + e.what());
  }
}

void save_adaptation_plan(const AdaptationPlan& plan, const fs::path& path) {
  json j = json::object();
  for (const auto& [stem, a] : plan.classes()) {
    json body = json::object();
    if (a.loudness_offset_lu) body["loudness_offset_lu"] = *a.loudness_offset_lu;
    if (a.eq) {
      body["eq_filter_taps"] = a.eq->taps;
      if (!a.eq->source_id.empty()) body["eq_source"] = a.eq->source_id;
      if (!a.eq->target_id.empty()) body["eq_target"] = a.eq->target_id;
    }
    j[std::string(stem_name(stem))] = std::move(body);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write plan '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

Waveform adapt_stem(const Waveform& stem, const ClassAdaptation& adaptation) {
  Waveform out = adaptation.eq ? zero_phase_apply(stem, *adaptation.eq) : stem;
  if (adaptation.loudness_offset_lu) {
    out = apply_gain_db(out, *adaptation.loudness_offset_lu);
  }
  return out;
}

namespace {

fs::path mirrored(const ClipEntry& clip,
                  const fs::path& original, const fs::path& out_dir) {
  if (original.is_relative() && !original.empty() && *original.begin() != "..") {
    return out_dir / original;
  }
  return out_dir / clip.clip_id / original.filename();
}

}  // namespace

AdaptResult adapt_dataset(const DatasetManifest& manifest,
                          const AdaptationPlan& plan, const fs::path& out_dir) {
  manifest.validate();
  fs::create_directories(out_dir);
  AdaptResult result;
  result.manifest.base_dir = out_dir;
  result.manifest.movies = manifest.movies;
  for (const auto& clip : manifest.clips) {
    try {
      const StemSet in = manifest.load_clip(clip);
      SourceEstimates adapted = in.sources();
      for (Stem s : kAllStems) {
        if (const auto* a = plan.find(s); a != nullptr && !a->empty()) {
          adapted[s] = adapt_stem(adapted[s], *a);
        }
      }
      const Waveform mixture = sum_sources(adapted);

      ClipEntry entry;
      entry.clip_id = clip.clip_id;
      entry.movie_id = clip.movie_id;
      entry.mixture = mirrored(clip, clip.mixture, out_dir);
      for (Stem s : kAllStems) {
        entry.stem_path(s) = mirrored(clip, clip.stem_path(s), out_dir);
      }
      fs::create_directories(entry.mixture.parent_path());
      save_wav(mixture, entry.mixture, SampleFormat::kFloat32);
      for (Stem s : kAllStems) {
        fs::create_directories(entry.stem_path(s).parent_path());
        save_wav(adapted[s], entry.stem_path(s), SampleFormat::kFloat32);
      }
      result.manifest.clips.push_back(std::move(entry));
    } catch (const std::exception& e) {
      result.failures.push_back({clip.clip_id, e.what()});
    }
  }
  save_manifest(result.manifest, out_dir / "manifest.json");
  return result;
}

}  // namespace cdx
