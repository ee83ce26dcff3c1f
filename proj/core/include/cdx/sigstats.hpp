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
#include <span>
#include <string>
#include <vector>

#include "cdx/loudness.hpp"
#include "cdx/spectral.hpp"
#include "cdx/waveform.hpp"

namespace cdx {

/// Loudness every clip is normalized to before spectral and transient
/// analysis.
inline constexpr double kAnalysisLoudnessLufs = -24.0;

/// Mean and population standard deviation.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};
MeanStd mean_std(std::span<const double> values);

// ---------------------------------------------------------------------------
// Equalization

/// Average long-term spectrum of a set of clips, in dB of STFT magnitude.
struct EqCurve {
  std::vector<double> frequencies;  // Hz, ascending from 0 to Nyquist
  std::vector<double> mean_db;
  std::vector<double> std_db;
  std::size_t clip_count = 0;

  std::size_t bins() const { return frequencies.size(); }
  /// Linear interpolation of mean_db at frequency f (clamped to the grid).
  double mean_db_at(double frequency_hz) const;
};

/// dB floor applied to magnitudes so that silent bins stay finite.
inline constexpr double kMagnitudeFloorDb = -200.0;

/// Single-clip curve: normalize to -24 LUFS, STFT magnitudes, average over
/// frames and channels, convert to dB. Throws DataError when the clip's
/// loudness is unmeasurable or it is shorter than one frame.
std::vector<double> clip_eq_db(const Waveform& clip,
                               const SpectrogramParams& params = {});

/// Per-bin mean and standard deviation of the per-clip dB curves.
EqCurve eq_curve(std::span<const Waveform> clips,
                 const SpectrogramParams& params = {});

// ---------------------------------------------------------------------------
// Stereo panning

/// Cells whose X_L^2 + X_R^2 falls below this are left out of the averages.
inline constexpr double kPanningEnergyFloor = 1e-12;

/// Frame-averaged stereo panning spectrum. psi (channel similarity) is 1 for
/// centred content and falls towards 0 for content panned to one side; delta
/// is the mean per-cell panning direction, negative for left.
struct PanningSpectrum {
  std::vector<double> frequencies;
  std::vector<double> psi_mean;
  std::vector<double> psi_std;
  std::vector<double> delta_mean;
  std::vector<double> delta_std;
  /// Retained cells per bin. Bins with no retained cells report psi = 1 and
  /// delta = 0.
  std::vector<std::size_t> cell_count;

  std::size_t bins() const { return frequencies.size(); }
};

/// Per-cell panning measures from left/right magnitudes.
double panning_similarity(double mag_left, double mag_right);
double panning_direction(double mag_left, double mag_right);

/// Throws DataError when x is shorter than one frame.
PanningSpectrum panning_spectrum(const Waveform& x,
                                 const SpectrogramParams& params = {});

/// Dataset curve: per-bin mean and std of the per-clip means, using only
/// clips with retained cells in that bin.
PanningSpectrum average_panning(std::span<const PanningSpectrum> clips);

// ---------------------------------------------------------------------------
// Onsets and dynamic range

struct OnsetParams {
  std::size_t frame_size = 2048;
  std::size_t hop = 512;
  /// Frames in the moving-median threshold window.
  std::size_t median_span = 9;
  /// Offset above the moving median, relative to the peak of the detection
  /// function.
  double threshold = 0.1;
  double min_gap_s = 0.05;
};

/// High-frequency-content detection function: per frame sum_k k |X(k)|^2 of
/// the Hann-windowed frame, summed over channels.
std::vector<double> hfc_detection_function(const Waveform& x,
                                           const OnsetParams& params = {});

/// Onset times in seconds (frame centres of the picked peaks). Inputs shorter
/// than one frame, or without any high-frequency energy, yield no onsets.
std::vector<double> hfc_onsets(const Waveform& x,
                               const OnsetParams& params = {});

struct DrcParams {
  OnsetParams onsets;
  /// Half width of the window searched for the peak around each onset.
  double peak_window_s = 0.05;
  double normalize_lufs = kAnalysisLoudnessLufs;
};

/// Average peak level: after loudness normalization, the mean over detected
/// onsets of the maximum absolute sample (dBFS, both channels) within
/// +/- peak_window_s. std::nullopt when no onset is found; DataError when the
/// loudness of x is unmeasurable.
std::optional<double> drc_peak_stat(const Waveform& x,
                                    const DrcParams& params = {});

// ---------------------------------------------------------------------------
// Dataset statistics

struct LoudnessStats {
  double mean_lufs = 0.0;
  double std_lu = 0.0;
  std::size_t measured = 0;
  std::size_t unmeasurable = 0;
};
LoudnessStats loudness_stats(std::span<const Waveform> clips);

struct DrcStats {
  double mean_db = 0.0;
  double std_db = 0.0;
  std::size_t measured = 0;
  std::size_t without_transients = 0;
};
DrcStats drc_stats(std::span<const Waveform> clips,
                   const DrcParams& params = {});

/// Everything the statistics report carries for one stem class.
struct ClassStatistics {
  LoudnessStats loudness;
  DrcStats drc;
  EqCurve eq;
  PanningSpectrum panning;
};

ClassStatistics analyze_class(std::span<const Waveform> clips,
                              const SpectrogramParams& spectrogram = {},
                              const DrcParams& drc = {});

/// JSON report: {class: {loudness: {mean, std}, drc: {mean, std},
/// frequencies: [...], eq: [...], eq_std: [...], psi: [...], delta: [...]}}.
std::string statistics_report_json(
    const std::map<std::string, ClassStatistics>& by_class);
/// One row per frequency bin with eq/psi/delta columns for every class.
void write_curves_csv(const std::map<std::string, ClassStatistics>& by_class,
                      const std::filesystem::path& path);

/// Reads the "eq" curve of one class back from a statistics report.
EqCurve eq_curve_from_report(const std::filesystem::path& report,
                             const std::string& class_name);

}  // namespace cdx
