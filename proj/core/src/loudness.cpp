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

#include "cdx/loudness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cdx/error.hpp"

namespace cdx {

namespace {

// Analog prototype parameters of the K-weighting stages.
constexpr double kShelfF0 = 1681.974450955533;
constexpr double kShelfGainDb = 3.999843853973347;
constexpr double kShelfQ = 0.7071752369554196;
constexpr double kHighpassF0 = 38.13547087602444;
constexpr double kHighpassQ = 0.5003270373238773;

void biquad_inplace(std::vector<double>& x, const std::array<double, 3>& b,
                    const std::array<double, 3>& a) {
  double z1 = 0.0;
  double z2 = 0.0;
  for (double& v : x) {
    const double in = v;
    const double out = b[0] * in + z1;
    z1 = b[1] * in - a[1] * out + z2;
    z2 = b[2] * in - a[2] * out;
    v = out;
  }
}

}  // namespace

KWeighting k_weighting(int sample_rate) {
  const double fs = sample_rate;
  KWeighting k;
  {
    const double K = std::tan(std::numbers::pi * kShelfF0 / fs);
    const double vh = std::pow(10.0, kShelfGainDb / 20.0);
    const double vb = std::pow(vh, 0.4996667741545416);
    const double a0 = 1.0 + K / kShelfQ + K * K;
    k.shelf_b = {(vh + vb * K / kShelfQ + K * K) / a0, 2.0 * (K * K - vh) / a0,
                 (vh - vb * K / kShelfQ + K * K) / a0};
    k.shelf_a = {1.0, 2.0 * (K * K - 1.0) / a0,
                 (1.0 - K / kShelfQ + K * K) / a0};
  }
  {
    const double K = std::tan(std::numbers::pi * kHighpassF0 / fs);
    const double a0 = 1.0 + K / kHighpassQ + K * K;
    k.highpass_b = {1.0, -2.0, 1.0};
    k.highpass_a = {1.0, 2.0 * (K * K - 1.0) / a0,
                    (1.0 - K / kHighpassQ + K * K) / a0};
  }
  return k;
}

std::optional<double> integrated_loudness(const Waveform& x) {
  const int fs = x.sample_rate();
  const auto block = static_cast<std::size_t>(std::llround(0.4 * fs));
  const auto step = static_cast<std::size_t>(std::llround(0.1 * fs));
  const std::size_t n = x.frames();
  if (n < block) {
    throw DataError("integrated_loudness: input shorter than one 400 ms block");
  }

  const KWeighting k = k_weighting(fs);
  // Prefix sums of the K-weighted power, channels summed with unit weight.
  std::vector<double> acc(n + 1, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<double> y(x.channel(c).begin(), x.channel(c).end());
    biquad_inplace(y, k.shelf_b, k.shelf_a);
    biquad_inplace(y, k.highpass_b, k.highpass_a);
    double run = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      run += y[i] * y[i];
      acc[i + 1] += run;
    }
  }

  const std::size_t n_blocks = (n - block) / step + 1;
  std::vector<double> z(n_blocks);
  for (std::size_t j = 0; j < n_blocks; ++j) {
    const std::size_t b = j * step;
    z[j] = std::max(0.0, acc[b + block] - acc[b]) / static_cast<double>(block);
  }

  auto loudness = [](double power) {
    return kLoudnessOffset + 10.0 * std::log10(power);
  };
  const double abs_power_gate = std::pow(10.0, (kAbsoluteGateLufs - kLoudnessOffset) / 10.0);

  double sum = 0.0;
  std::size_t count = 0;
  for (double p : z) {
    if (p > abs_power_gate) {
      sum += p;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  const double relative_gate = loudness(sum / count) + kRelativeGateLu;
  const double rel_power_gate =
      std::pow(10.0, (relative_gate - kLoudnessOffset) / 10.0);

  sum = 0.0;
  count = 0;
  for (double p : z) {
    if (p > abs_power_gate && p > rel_power_gate) {
      sum += p;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return loudness(sum / count);
}

LoudnessNormalized normalize_loudness(const Waveform& x, double target_lufs) {
  const auto measured = integrated_loudness(x);
  if (!measured) {
    throw DataError("normalize_loudness: loudness is unmeasurable (silence)");
  }
  const double gain_db = target_lufs - *measured;
  return {apply_gain_db(x, gain_db), gain_db};
}

}  // namespace cdx
