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

#include "cdx/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <new>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "cdx/error.hpp"

namespace cdx {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2) throw std::invalid_argument("RealFft: size must be >= 2");
  std::lock_guard<std::mutex> lock(planner_mutex());
  in_ = static_cast<double*>(fftw_malloc(sizeof(double) * size));
  out_ = fftw_malloc(sizeof(fftw_complex) * bins());
  if (in_ == nullptr || out_ == nullptr) {
    fftw_free(in_);
    fftw_free(out_);
    throw std::bad_alloc();
  }
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size), in_,
                               static_cast<fftw_complex*>(out_), FFTW_ESTIMATE);
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : size_(std::exchange(other.size_, 0)),
      in_(std::exchange(other.in_, nullptr)),
      out_(std::exchange(other.out_, nullptr)),
      plan_(std::exchange(other.plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    release();
    size_ = std::exchange(other.size_, 0);
    in_ = std::exchange(other.in_, nullptr);
    out_ = std::exchange(other.out_, nullptr);
    plan_ = std::exchange(other.plan_, nullptr);
  }
  return *this;
}

void RealFft::release() {
  if (plan_ == nullptr && in_ == nullptr && out_ == nullptr) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
  plan_ = nullptr;
  in_ = nullptr;
  out_ = nullptr;
}

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  if (in.size() != size_ || out.size() != bins()) {
    throw std::invalid_argument("RealFft::forward: buffer size mismatch");
  }
  std::memcpy(in_, in.data(), sizeof(double) * size_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  // fftw_complex is layout compatible with std::complex<double>.
  std::memcpy(out.data(), out_, sizeof(fftw_complex) * bins());
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

std::size_t frame_count(std::size_t n_samples, const SpectrogramParams& p) {
  if (n_samples < p.fft_size) return 0;
  return (n_samples - p.fft_size) / p.hop + 1;
}

Spectrogram magnitude_spectrogram(const Waveform& x,
                                  const SpectrogramParams& params) {
  if (params.fft_size < 2 || params.hop == 0) {
    throw std::invalid_argument("magnitude_spectrogram: bad frame parameters");
  }
  if (x.frames() < params.fft_size) {
    throw DataError("magnitude_spectrogram: input of " +
                    std::to_string(x.frames()) +
                    " samples is shorter than one frame of " +
                    std::to_string(params.fft_size));
  }
  Spectrogram s;
  s.params = params;
  s.sample_rate = x.sample_rate();
  s.frames = frame_count(x.frames(), params);
  s.bins = params.fft_size / 2 + 1;

  RealFft fft(params.fft_size);
  const auto window = hann_window(params.fft_size);
  std::vector<double> buf(params.fft_size);
  std::vector<std::complex<double>> spec(s.bins);
  for (std::size_t c = 0; c < 2; ++c) {
    auto ch = x.channel(c);
    auto& mag = s.magnitude[c];
    mag.resize(s.frames * s.bins);
    for (std::size_t f = 0; f < s.frames; ++f) {
      const std::size_t start = f * params.hop;
      for (std::size_t i = 0; i < params.fft_size; ++i) {
        buf[i] = ch[start + i] * window[i];
      }
      fft.forward(buf, spec);
      for (std::size_t k = 0; k < s.bins; ++k) {
        mag[f * s.bins + k] = std::abs(spec[k]);
      }
    }
  }
  return s;
}

}  // namespace cdx
