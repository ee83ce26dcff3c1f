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
#include <optional>

#include "cdx/waveform.hpp"

namespace cdx {

/// Biquad sections of the K-weighting pre-filter: a high-frequency shelf
/// followed by the RLB high-pass. Derived for any rate from the analog
/// prototypes; at 48 kHz they reproduce the tabulated coefficients of the
/// standard.
struct KWeighting {
  std::array<double, 3> shelf_b{};
  std::array<double, 3> shelf_a{};
  std::array<double, 3> highpass_b{};
  std::array<double, 3> highpass_a{};
};

KWeighting k_weighting(int sample_rate);

inline constexpr double kAbsoluteGateLufs = -70.0;
inline constexpr double kRelativeGateLu = -10.0;
inline constexpr double kLoudnessOffset = -0.691;

/// Integrated loudness in LUFS (ITU-R BS.1770-4): K-weighting, 400 ms blocks
/// with 75 % overlap, absolute gate at -70 LUFS, relative gate at -10 LU.
/// Left and right channels have unit weight.
///
/// Throws DataError when the input is shorter than one 400 ms block. Returns
/// std::nullopt when every block is gated (for instance digital silence).
std::optional<double> integrated_loudness(const Waveform& x);

struct LoudnessNormalized {
  Waveform waveform;
  double gain_db = 0.0;
};

/// Applies the single broadband gain that moves x to target_lufs. Throws
/// DataError when the loudness of x is unmeasurable.
LoudnessNormalized normalize_loudness(const Waveform& x, double target_lufs);

inline Waveform apply_gain_db(const Waveform& x, double gain_db) {
  return scaled(x, db_to_gain(gain_db));
}

}  // namespace cdx
