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

#include "cdx/waveform.hpp"

namespace cdx {

enum class SampleFormat { kPcm16, kPcm24, kFloat32 };

int bits_per_sample(SampleFormat format);
SampleFormat sample_format_from_string(std::string_view name);  // "16", "24", "float32"

struct AudioFileMeta {
  std::filesystem::path path;
  int channels = 0;
  int bit_depth = 0;
  bool is_float = false;
  std::size_t duration_samples = 0;
  int sample_rate = 0;
};

struct WavWriteReport {
  /// Samples whose magnitude exceeded 1.0 and were clamped (integer formats).
  std::size_t clipped_samples = 0;
};

/// Reads the header of a RIFF/WAVE file without decoding samples.
AudioFileMeta read_wav_meta(const std::filesystem::path& path);

/// Decodes PCM16, PCM24 or IEEE float32 WAV data with one or two channels.
/// Integer samples are divided by 2^(bits-1); mono is duplicated to stereo.
/// Throws FormatError for unsupported layouts and IoError for unreadable or
/// truncated files.
Waveform load_wav(const std::filesystem::path& path);

/// Writes a stereo WAV. Integer formats clamp to the representable range and
/// count the clamped samples in the returned report.
WavWriteReport save_wav(const Waveform& waveform,
                        const std::filesystem::path& path,
                        SampleFormat format = SampleFormat::kFloat32);

}  // namespace cdx
