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

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cdx {

inline constexpr int kCanonicalSampleRate = 44100;

/// Stereo sample buffer. Full scale is 1.0; samples are stored in double
/// precision so that stem sums and residuals stay exact to rounding.
///
/// Invariants (checked on construction): both channels have equal length,
/// the sample rate is positive and every sample is finite. A Waveform is
/// immutable once built; transformations return new values.
class Waveform {
 public:
  Waveform() = default;
  Waveform(std::vector<double> left, std::vector<double> right,
           int sample_rate = kCanonicalSampleRate);

  /// Duplicates a single channel into two identical channels.
  static Waveform from_mono(std::vector<double> mono,
                            int sample_rate = kCanonicalSampleRate);
  static Waveform silence(std::size_t frames,
                          int sample_rate = kCanonicalSampleRate);

  std::size_t frames() const { return channels_[0].size(); }
  bool empty() const { return frames() == 0; }
  int sample_rate() const { return sample_rate_; }
  double duration_s() const {
    return static_cast<double>(frames()) / sample_rate_;
  }

  std::span<const double> channel(std::size_t c) const {
    return channels_.at(c);
  }
  std::span<const double> left() const { return channels_[0]; }
  std::span<const double> right() const { return channels_[1]; }

  // Moves the channel buffers out, leaving this waveform empty.
  std::array<std::vector<double>, 2> release() &&;

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::array<std::vector<double>, 2> channels_;
  int sample_rate_ = kCanonicalSampleRate;
};

/// The three source classes of a cinematic mix.
enum class Stem { kDialogue = 0, kEffects = 1, kMusic = 2 };
inline constexpr std::array<Stem, 3> kAllStems = {Stem::kDialogue,
                                                  Stem::kEffects, Stem::kMusic};
std::string_view stem_name(Stem stem);  // "dx", "fx", "mx"
Stem stem_from_name(std::string_view name);

/// Per-source estimates (or references) without a mixture.
struct SourceEstimates {
  Waveform dx;
  Waveform fx;
  Waveform mx;

  const Waveform& operator[](Stem s) const;
  Waveform& operator[](Stem s);
};

/// Aligned mixture plus its three reference stems for one clip.
struct StemSet {
  Waveform mixture;
  Waveform dx;
  Waveform fx;
  Waveform mx;

  const Waveform& operator[](Stem s) const;
  SourceEstimates sources() const { return {dx, fx, mx}; }

  /// Throws std::invalid_argument unless all four waveforms share length and
  /// rate.
  void check_aligned() const;
  /// Largest |mixture - (dx + fx + mx)| over all samples.
  double consistency_error() const;
};

// Element-wise helpers. Binary operations require equal length and rate and
// throw std::invalid_argument otherwise.
void require_aligned(const Waveform& a, const Waveform& b,
                     std::string_view what);
Waveform operator+(const Waveform& a, const Waveform& b);
Waveform operator-(const Waveform& a, const Waveform& b);
Waveform scaled(const Waveform& w, double gain);
Waveform sum_sources(const SourceEstimates& s);
double peak_abs(const Waveform& w);
/// Sum over samples and both channels of x(n)^2.
double energy(const Waveform& w);
Waveform slice(const Waveform& w, std::size_t begin, std::size_t end);

inline double db_to_gain(double db) { return std::pow(10.0, db / 20.0); }
inline double gain_to_db(double gain) { return 20.0 * std::log10(gain); }

}  // namespace cdx
