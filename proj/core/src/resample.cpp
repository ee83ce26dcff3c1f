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

#include "cdx/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdx {

namespace {

double kaiser_beta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db >= 21.0) {
    return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) +
           0.07886 * (attenuation_db - 21.0);
  }
  return 0.0;
}

class SincKernel {
 public:
  SincKernel(double cutoff, double half_width, double beta)
      : cutoff_(cutoff),
        half_width_(half_width),
        beta_(beta),
        norm_(1.0 / std::cyl_bessel_i(0.0, beta)) {}

  // Impulse response at offset t (in input samples) from the kernel centre.
  double operator()(double t) const {
    if (std::abs(t) >= half_width_) return 0.0;
    const double x = cutoff_ * t;
    const double sinc =
        x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = t / half_width_;
    const double window =
        std::cyl_bessel_i(0.0, beta_ * std::sqrt(1.0 - r * r)) * norm_;
    return cutoff_ * sinc * window;
  }

 private:
  double cutoff_;
  double half_width_;
  double beta_;
  double norm_;
};

constexpr std::int64_t kMaxTablePhases = 4096;

}  // namespace

Waveform resample(const Waveform& waveform, int target_rate,
                  const ResamplerOptions& options) {
  if (target_rate <= 0) {
    throw std::invalid_argument("resample: target rate must be positive, got " +
                                std::to_string(target_rate));
  }
  const int source_rate = waveform.sample_rate();
  if (source_rate == target_rate) return waveform;

  const std::int64_t g = std::gcd(source_rate, target_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = source_rate / g;
  const auto n_in = static_cast<std::int64_t>(waveform.frames());
  const std::int64_t n_out =
      (n_in * target_rate + source_rate / 2) / source_rate;

  const double cutoff =
      options.rolloff * std::min(1.0, static_cast<double>(target_rate) /
                                          static_cast<double>(source_rate));
  const double half_width = options.zero_crossings / cutoff;
  const auto reach = static_cast<std::int64_t>(std::ceil(half_width));
  const std::int64_t taps = 2 * reach;
  const SincKernel kernel(cutoff, half_width, kaiser_beta(options.stopband_db));

  // Tap k of phase p multiplies input sample (base - reach + 1 + k) where the
  // output lies p/up samples after input sample base.
  auto fill_phase = [&](std::int64_t phase, double* dst) {
    double sum = 0.0;
    for (std::int64_t k = 0; k < taps; ++k) {
      const double t = static_cast<double>(phase) / static_cast<double>(up) +
                       static_cast<double>(reach - 1 - k);
      dst[k] = kernel(t);
      sum += dst[k];
    }
    // Exact unity gain at DC for every phase.
    for (std::int64_t k = 0; k < taps; ++k) dst[k] /= sum;
  };

  const bool tabulate = up <= kMaxTablePhases;
  std::vector<double> table;
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up * taps));
    for (std::int64_t p = 0; p < up; ++p) fill_phase(p, &table[p * taps]);
  }
  std::vector<double> scratch(static_cast<std::size_t>(taps));

  std::array<std::vector<double>, 2> out;
  out[0].assign(static_cast<std::size_t>(n_out), 0.0);
  out[1].assign(static_cast<std::size_t>(n_out), 0.0);
  auto left = waveform.left();
  auto right = waveform.right();
  for (std::int64_t m = 0; m < n_out; ++m) {
    const std::int64_t num = m * down;
    const std::int64_t base = num / up;
    const std::int64_t phase = num % up;
    const double* h = nullptr;
    if (tabulate) {
      h = &table[phase * taps];
    } else {
      fill_phase(phase, scratch.data());
      h = scratch.data();
    }
    const std::int64_t first = base - reach + 1;
    const std::int64_t k_begin = std::max<std::int64_t>(0, -first);
    const std::int64_t k_end = std::min<std::int64_t>(taps, n_in - first);
    double acc_l = 0.0;
    double acc_r = 0.0;
    for (std::int64_t k = k_begin; k < k_end; ++k) {
      acc_l += h[k] * left[first + k];
      acc_r += h[k] * right[first + k];
    }
    out[0][m] = acc_l;
    out[1][m] = acc_r;
  }
  return Waveform(std::move(out[0]), std::move(out[1]), target_rate);
}

}  // namespace cdx
