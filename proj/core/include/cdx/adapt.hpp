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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdx/manifest.hpp"
#include "cdx/sigstats.hpp"
#include "cdx/waveform.hpp"

namespace cdx {

/// Linear-phase FIR with an odd number of symmetric taps.
struct FirFilter {
  std::vector<double> taps;
  std::string source_id;
  std::string target_id;

  /// Throws std::invalid_argument unless the tap count is odd, the taps are
  /// finite and exactly symmetric.
  void validate() const;
  static FirFilter identity(std::size_t taps = 101);

  /// Real (zero-phase) amplitude of the filter at frequency f; the magnitude
  /// response is |amplitude|.
  double amplitude(double frequency_hz, int sample_rate) const;
};

/// target - source, in LU.
double loudness_match_offset(double source_mean_lufs, double target_mean_lufs);

struct EqMatchOptions {
  std::size_t taps = 101;
  /// The desired response is held constant outside [hold_below_hz,
  /// hold_above_hz].
  double hold_below_hz = 50.0;
  double hold_above_hz = 16000.0;
  int sample_rate = kCanonicalSampleRate;
};

/// Designs the single-pass filter whose forward-backward application maps the
/// source equalization onto the target: the desired double-pass magnitude is
/// D(f) = 10^((target_dB - source_dB) / 20) and the filter is designed to
/// sqrt(D) by frequency sampling at (taps + 1) / 2 uniform points followed by
/// a Hann window. Each sample point takes the mean dB difference over its
/// frequency cell. Throws std::invalid_argument when the curves have
/// different grids or non-finite values.
FirFilter design_eq_match_filter(const EqCurve& source, const EqCurve& target,
                                 const EqMatchOptions& options = {});

/// Forward-backward FIR filtering of both channels with odd reflection padding
/// of taps - 1 samples: magnitude |H(f)|^2, zero phase, same length as the
/// input. Throws std::invalid_argument if the input is shorter than
/// 3 * taps.
Waveform zero_phase_apply(const Waveform& x, const FirFilter& fir);

struct ClassAdaptation {
  std::optional<double> loudness_offset_lu;
  std::optional<FirFilter> eq;

  bool empty() const { return !loudness_offset_lu && !eq; }
};

/// Per-class adaptation. Construction rejects plans without any adaptation
/// and non-finite offsets.
class AdaptationPlan {
 public:
  explicit AdaptationPlan(std::map<Stem, ClassAdaptation> classes);

  const std::map<Stem, ClassAdaptation>& classes() const { return classes_; }
  const ClassAdaptation* find(Stem s) const;

 private:
  std::map<Stem, ClassAdaptation> classes_;
};

// JSON: {"dx": {"loudness_offset_lu": -4.0, "eq_filter_taps": [...]}, ...}
AdaptationPlan load_adaptation_plan(const std::filesystem::path& path);
void save_adaptation_plan(const AdaptationPlan& plan,
                          const std::filesystem::path& path);

/// Applies EQ then the broadband loudness offset.
Waveform adapt_stem(const Waveform& stem, const ClassAdaptation& adaptation);

struct AdaptFailure {
  std::string clip_id;
  std::string message;
};

struct AdaptResult {
  DatasetManifest manifest;  // adapted clips only, paths under out_dir
  std::vector<AdaptFailure> failures;
};

/// Transforms every stem per the plan, re-sums each mixture from the adapted
/// stems and writes float32 WAVs mirroring the input layout under out_dir,
/// together with out_dir/manifest.json. Per-clip failures are collected and
/// the run continues.
AdaptResult adapt_dataset(const DatasetManifest& manifest,
                          const AdaptationPlan& plan,
                          const std::filesystem::path& out_dir);

}  // namespace cdx
