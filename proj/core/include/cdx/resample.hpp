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

#include "cdx/waveform.hpp"

namespace cdx {

struct ResamplerOptions {
  /// Kaiser window design target for the anti-alias stopband.
  double stopband_db = 100.0;
  /// Sinc zero crossings on each side of the kernel centre at the cutoff.
  int zero_crossings = 64;
  /// Cutoff as a fraction of the lower of the two Nyquist frequencies.
  double rolloff = 0.96;
};

/// Band-limited rational-ratio resampling with a Kaiser-windowed sinc kernel,
/// evaluated in polyphase form. The output has round(N * target / source)
/// frames; equal rates return the input unchanged. Samples outside the input
/// are treated as zero.
Waveform resample(const Waveform& waveform, int target_rate,
                  const ResamplerOptions& options = {});

}  // namespace cdx
