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

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cdx/error.hpp"
#include "cdx/sigstats.hpp"

namespace cdx {

std::vector<double> hfc_detection_function(const Waveform& x,
                                           const OnsetParams& params) {
  const SpectrogramParams frame{params.frame_size, params.hop};
  const std::size_t frames = frame_count(x.frames(), frame);
  if (frames == 0) return {};
  RealFft fft(params.frame_size);
  const auto window = hann_window(params.frame_size);
  std::vector<double> buf(params.frame_size);
  std::vector<std::complex<double>> spec(fft.bins());
  std::vector<double> hfc(frames, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    auto ch = x.channel(c);
    for (std::size_t f = 0; f < frames; ++f) {
      const std::size_t start = f * params.hop;
      for (std::size_t i = 0; i < params.frame_size; ++i) {
        buf[i] = ch[start + i] * window[i];
      }
      fft.forward(buf, spec);
      double acc = 0.0;
      for (std::size_t k = 1; k < spec.size(); ++k) {
        acc += static_cast<double>(k) * std::norm(spec[k]);
      }
      hfc[f] += acc;
    }
  }
  return hfc;
}

std::vector<double> hfc_onsets(const Waveform& x, const OnsetParams& params) {
  const std::vector<double> d = hfc_detection_function(x, params);
  if (d.empty()) return {};
  const double peak = *std::max_element(d.begin(), d.end());
  // Numerically silent input (no energy above DC) has no transients.
  if (!(peak > 1e-20 * static_cast<double>(params.frame_size))) return {};

  std::vector<double> norm(d.size());
  std::transform(d.begin(), d.end(), norm.begin(),
                 [peak](double v) { return v / peak; });

  const std::size_t half = params.median_span / 2;
  std::vector<double> window;
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    const double v = norm[i];
    const bool rising = i == 0 || v > norm[i - 1];
    const bool not_falling_after = i + 1 == norm.size() || v >= norm[i + 1];
    if (!rising || !not_falling_after) continue;

    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(norm.size(), i + half + 1);
    window.assign(norm.begin() + lo, norm.begin() + hi);
    auto mid = window.begin() + window.size() / 2;
    std::nth_element(window.begin(), mid, window.end());
    if (v <= *mid + params.threshold) continue;

    if (!picked.empty()) {
      const double gap = static_cast<double>(i - picked.back()) *
                         static_cast<double>(params.hop) / x.sample_rate();
      if (gap < params.min_gap_s) {
        if (v > norm[picked.back()]) picked.back() = i;
        continue;
      }
    }
    picked.push_back(i);
  }

  std::vector<double> times;
  times.reserve(picked.size());
  for (std::size_t i : picked) {
    times.push_back(
        static_cast<double>(i * params.hop + params.frame_size / 2) /
        x.sample_rate());
  }
  return times;
}

std::optional<double> drc_peak_stat(const Waveform& x,
                                    const DrcParams& params) {
  const Waveform y = normalize_loudness(x, params.normalize_lufs).waveform;
  const std::vector<double> onsets = hfc_onsets(y, params.onsets);
  if (onsets.empty()) return std::nullopt;

  const double rate = y.sample_rate();
  const auto n = static_cast<long long>(y.frames());
  const auto reach = static_cast<long long>(std::llround(params.peak_window_s * rate));
  double sum_db = 0.0;
  for (double t : onsets) {
    const auto centre = static_cast<long long>(std::llround(t * rate));
    const auto begin = std::clamp(centre - reach, 0LL, n);
    const auto end = std::clamp(centre + reach + 1, 0LL, n);
    double peak = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
      auto ch = y.channel(c);
      for (auto i = begin; i < end; ++i) peak = std::max(peak, std::abs(ch[i]));
    }
    sum_db += 20.0 * std::log10(std::max(peak, 1e-10));
  }
  return sum_db / static_cast<double>(onsets.size());
}

}  // namespace cdx
