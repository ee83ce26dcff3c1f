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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdx/metrics.hpp"
#include "cdx/separator.hpp"
#include "cdx/waveform.hpp"

namespace cdx {

/// Regularizer in the denominator of the least-squares scale.
inline constexpr double kLsScaleEpsilon = 1e-7;

struct ScaleCoefficient {
  double alpha = 1.0;
};

struct PeakNormalized {
  Waveform waveform;
  double gain = 1.0;  // multiply by 1/gain to undo
};

/// Divides x by its largest absolute sample over both channels. Throws
/// DataError on silent input.
PeakNormalized peak_normalize(const Waveform& x);

/// alpha = sum_n x(n)^T s(n) / (1e-7 + sum_n ||s(n)||^2): the least-squares
/// gain mapping the estimate onto the mixture.
ScaleCoefficient ls_scale_coeff(const Waveform& mixture,
                                const Waveform& estimate);

/// estimate * factor. Pass alpha for least-squares rescaling, 1/alpha for the
/// inverse post-scaling variant.
Waveform apply_scale(const Waveform& estimate, double factor);

/// Fractions of the reconstruction residual given to each estimate. The
/// fractions must be non-negative and sum to one.
struct ResidualSplit {
  double dx = 0.0;
  double fx = 0.5;
  double mx = 0.5;

  void validate() const;
};

/// Adds split-weighted shares of r = x - dx - fx - mx to the estimates so
/// that they sum to the mixture. The music estimate is formed as the
/// complement x - dx' - fx', which makes the projection exactly idempotent in
/// floating point.
SourceEstimates mixture_consistency(const Waveform& mixture,
                                    const SourceEstimates& estimates,
                                    const ResidualSplit& split = {});

/// Weighted ensemble: sum_i w_i est_i / sum_i w_i.
struct BlendSpec {
  std::vector<std::string> ids;  // optional labels, parallel to weights
  std::vector<double> weights;

  /// Throws std::invalid_argument on negative weights or no positive weight.
  void validate() const;
  std::vector<double> coefficients() const;
};

Waveform blend(std::span<const Waveform> estimates, const BlendSpec& spec);

/// x - dx_estimate: the music-plus-effects pseudo mixture for a second,
/// two-stem separation stage.
Waveform cascade_residual(const Waveform& mixture, const Waveform& dx_estimate);

enum class ScaleMode { kNone, kLeastSquares, kInverseLeastSquares };

/// Optional estimate post-processing. Default is a no-op.
struct PostChainConfig {
  ScaleMode scale = ScaleMode::kNone;
  bool consistency = false;
  /// Run mixture consistency before the scaling step instead of after it.
  bool consistency_first = false;
  ResidualSplit split;

  bool is_noop() const { return scale == ScaleMode::kNone && !consistency; }
};

/// Parses "none", "ls", "mc", "ls+mc", "inv-ls", "inv-ls+mc", "mc+ls" and
/// "mc+inv-ls".
PostChainConfig post_chain_from_string(std::string_view spec);
std::string to_string(const PostChainConfig& config);

/// Scales each estimate against the mixture and/or enforces consistency.
SourceEstimates apply_post_chain(const Waveform& mixture,
                                 SourceEstimates estimates,
                                 const PostChainConfig& config);

/// Peak-normalize the mixture, separate it, then post-process the estimates
/// against the original mixture (least-squares scaling recovers the level).
SourceEstimates run_separation_chain(Separator& separator,
                                     const Waveform& mixture,
                                     const PostChainConfig& config);

struct SweepPoint {
  double input_lufs = 0.0;
  std::optional<ClipScore> score;
  std::string error;  // non-empty when the point failed
};

/// For every grid value: gain the mixture to that integrated loudness,
/// separate, bring the estimates back to the original level, optionally post
/// process, and score against the references. Separator failures are
/// recorded per point. Throws DataError if the mixture loudness is
/// unmeasurable.
std::vector<SweepPoint> loudness_sweep(Separator& separator,
                                       const StemSet& references,
                                       std::span<const double> lufs_grid,
                                       const PostChainConfig& post = {});

}  // namespace cdx
