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
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "cdx/waveform.hpp"

namespace cdx {

/// Real-to-complex forward FFT of a fixed size (FFTW backed). Planning is
/// serialized internally; execute() on distinct instances is thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  /// in.size() == size(), out.size() == bins().
  void forward(std::span<const double> in,
               std::span<std::complex<double>> out);

 private:
  void release();

  std::size_t size_ = 0;
  double* in_ = nullptr;
  void* out_ = nullptr;  // fftw_complex*
  void* plan_ = nullptr;  // fftw_plan
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

struct SpectrogramParams {
  std::size_t fft_size = 4096;
  std::size_t hop = 1024;  // 75 % overlap at the default size
};

/// Number of full frames: floor((n - fft) / hop) + 1, or 0 if n < fft.
std::size_t frame_count(std::size_t n_samples, const SpectrogramParams& p);

/// Hann-windowed STFT magnitudes of both channels, frame-major.
struct Spectrogram {
  SpectrogramParams params;
  int sample_rate = kCanonicalSampleRate;
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::array<std::vector<double>, 2> magnitude;

  double at(std::size_t channel, std::size_t frame, std::size_t bin) const {
    return magnitude[channel][frame * bins + bin];
  }
  std::span<const double> frame(std::size_t channel, std::size_t f) const {
    return std::span<const double>(magnitude[channel]).subspan(f * bins, bins);
  }
  double bin_frequency(std::size_t bin) const {
    return static_cast<double>(bin) * sample_rate /
           static_cast<double>(params.fft_size);
  }
};

/// Throws DataError when x is shorter than one frame.
Spectrogram magnitude_spectrogram(const Waveform& x,
                                  const SpectrogramParams& params = {});

}  // namespace cdx
