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
#include <optional>
#include <span>
#include <vector>

#include "cdx/waveform.hpp"

namespace cdx {

/// SDR values are clamped to [-kSdrClampDb, +kSdrClampDb] so that perfect
/// estimates and degenerate errors stay finite in aggregates.
inline constexpr double kSdrClampDb = 100.0;

/// Per-source global SDR triple for one clip plus its mean.
struct ClipScore {
  double sdr_dx = 0.0;
  double sdr_fx = 0.0;
  double sdr_mx = 0.0;
  double mean = 0.0;

  static ClipScore from_sources(double dx, double fx, double mx);
  /// Score assigned to clips whose estimates are missing or unreadable.
  static ClipScore floor() {
    return from_sources(-kSdrClampDb, -kSdrClampDb, -kSdrClampDb);
  }
  double operator[](Stem s) const;

  friend bool operator==(const ClipScore&, const ClipScore&) = default;
};

/// Global (utterance-level) SDR of a stereo estimate: the energy of the target
/// over the energy of the error, each pooled over all samples of both
/// channels, in dB and clamped to +/-100 dB.
///
/// Returns std::nullopt when the target is all zeros (the ratio is undefined
/// and such clips are excluded from aggregation). Throws
/// std::invalid_argument when lengths or rates differ.
std::optional<double> sdr_source(const Waveform& target,
                                 const Waveform& estimate);

/// Scores DX, FX and MX of one clip. std::nullopt if any reference stem is
/// silent.
std::optional<ClipScore> global_sdr_clip(const StemSet& targets,
                                         const SourceEstimates& estimates);

/// Field-wise arithmetic mean over clips. Throws DataError on an empty list.
ClipScore aggregate(std::span<const ClipScore> scores);

/// sqrt(1/N * sum_n ||s(n)||^2), the norm taken over both channels.
/// Throws DataError for an empty waveform.
double rms(const Waveform& waveform);

/// Per-class minimum RMS for a segment to count as active.
struct RmsThresholds {
  double tau_dx = 0.022;
  double tau_fx = 0.005;
  double tau_mx = 0.003;

  /// Throws std::invalid_argument unless all thresholds are positive.
  void validate() const;
  double operator[](Stem s) const;
};

struct Segment {
  std::size_t begin = 0;  // first frame
  std::size_t end = 0;    // one past the last frame

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// A segment is accepted iff every class RMS reaches its threshold.
bool segment_accepted(double rms_dx, double rms_fx, double rms_mx,
                      const RmsThresholds& thresholds);

/// Slides a window of window_s seconds in steps of hop_s over the reference
/// stems and returns the windows in which all three classes are active. A clip
/// shorter than one window is tested as a single segment.
std::vector<Segment> select_segments(const StemSet& stems,
                                     const RmsThresholds& thresholds,
                                     double window_s = 11.0,
                                     double hop_s = 1.0);

}  // namespace cdx
