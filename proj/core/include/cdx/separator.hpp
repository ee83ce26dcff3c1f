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

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>

#include "cdx/waveform.hpp"

namespace cdx {

/// A separation model treated as a black box.
class Separator {
 public:
  virtual ~Separator() = default;
  /// Returns DX/FX/MX estimates aligned with the mixture. Implementations
  /// throw SeparatorError on failure.
  virtual SourceEstimates separate(const Waveform& mixture) = 0;
};

class SeparatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adapts any callable.
class FunctionSeparator : public Separator {
 public:
  explicit FunctionSeparator(
      std::function<SourceEstimates(const Waveform&)> fn)
      : fn_(std::move(fn)) {}
  SourceEstimates separate(const Waveform& mixture) override {
    return fn_(mixture);
  }

 private:
  std::function<SourceEstimates(const Waveform&)> fn_;
};

/// Runs an external program as `<command> <input.wav> <output_dir>`. The
/// program must write dx.wav, fx.wav and mx.wav into output_dir with the
/// input's length and sample rate and exit with status 0. Each call uses its
/// own scratch directory under `workspace`, removed afterwards.
class SubprocessSeparator : public Separator {
 public:
  explicit SubprocessSeparator(
      std::string command,
      std::filesystem::path workspace = std::filesystem::temp_directory_path());
  SourceEstimates separate(const Waveform& mixture) override;

 private:
  std::string command_;
  std::filesystem::path workspace_;
};

/// Reads {dir}/dx.wav, fx.wav, mx.wav and checks them against `like`.
SourceEstimates load_estimates(const std::filesystem::path& dir,
                               const Waveform& like);

/// Quotes a path for POSIX sh.
std::string shell_quote(const std::string& s);

}  // namespace cdx
