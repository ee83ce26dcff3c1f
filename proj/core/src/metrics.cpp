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

#include "cdx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cdx/error.hpp"

namespace cdx {

ClipScore ClipScore::from_sources(double dx, double fx, double mx) {
  return ClipScore{dx, fx, mx, (dx + fx + mx) / 3.0};
}

double ClipScore::operator[](Stem s) const {
  switch (s) {
    case Stem::kDialogue:
      return sdr_dx;
    case Stem::kEffects:
      return sdr_fx;
    case Stem::kMusic:
      break;
  }
  return sdr_mx;
}

std::optional<double> sdr_source(const Waveform& target,
                                 const Waveform& estimate) {
  require_aligned(target, estimate, "sdr_source");
  double signal = 0.0;
  double error = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    auto s = target.channel(c);
    auto e = estimate.channel(c);
    for (std::size_t n = 0; n < s.size(); ++n) {
      const double d = s[n] - e[n];
      signal += s[n] * s[n];
      error += d * d;
    }
  }
  if (signal == 0.0) return std::nullopt;
  if (error == 0.0) return kSdrClampDb;
  const double sdr = 10.0 * std::log10(signal / error);
  return std::clamp(sdr, -kSdrClampDb, kSdrClampDb);
}

std::optional<ClipScore> global_sdr_clip(const StemSet& targets,
                                         const SourceEstimates& estimates) {
  const auto dx = sdr_source(targets.dx, estimates.dx);
  const auto fx = sdr_source(targets.fx, estimates.fx);
  const auto mx = sdr_source(targets.mx, estimates.mx);
  if (!dx || !fx || !mx) return std::nullopt;
  return ClipScore::from_sources(*dx, *fx, *mx);
}

ClipScore aggregate(std::span<const ClipScore> scores) {
  if (scores.empty()) throw DataError("aggregate: no scored clips");
  double dx = 0.0;
  double fx = 0.0;
  double mx = 0.0;
  double mean = 0.0;
  for (const auto& s : scores) {
    dx += s.sdr_dx;
    fx += s.sdr_fx;
    mx += s.sdr_mx;
    mean += s.mean;
  }
  const double n = static_cast<double>(scores.size());
  return ClipScore{dx / n, fx / n, mx / n, mean / n};
}

double rms(const Waveform& waveform) {
  if (waveform.empty()) throw DataError("rms: empty waveform");
  return std::sqrt(energy(waveform) / static_cast<double>(waveform.frames()));
}

void RmsThresholds::validate() const {
  if (!(tau_dx > 0.0 && tau_fx > 0.0 && tau_mx > 0.0)) {
    throw std::invalid_argument("RMS thresholds must all be positive");
  }
}

double RmsThresholds::operator[](Stem s) const {
  switch (s) {
    case Stem::kDialogue:
      return tau_dx;
    case Stem::kEffects:
      return tau_fx;
    case Stem::kMusic:
      break;
  }
  return tau_mx;
}

bool segment_accepted(double rms_dx, double rms_fx, double rms_mx,
                      const RmsThresholds& thresholds) {
  return rms_dx >= thresholds.tau_dx && rms_fx >= thresholds.tau_fx &&
         rms_mx >= thresholds.tau_mx;
}

namespace {

// Prefix sums of ||s(n)||^2 so every window RMS is O(1).
std::vector<double> cumulative_power(const Waveform& w) {
  std::vector<double> acc(w.frames() + 1, 0.0);
  auto l = w.left();
  auto r = w.right();
  for (std::size_t n = 0; n < w.frames(); ++n) {
    acc[n + 1] = acc[n] + l[n] * l[n] + r[n] * r[n];
  }
  return acc;
}

double window_rms(const std::vector<double>& acc, std::size_t begin,
                  std::size_t end) {
  const double sum = std::max(0.0, acc[end] - acc[begin]);
  return std::sqrt(sum / static_cast<double>(end - begin));
}

}  // namespace

std::vector<Segment> select_segments(const StemSet& stems,
                                     const RmsThresholds& thresholds,
                                     double window_s, double hop_s) {
  if (!(window_s > 0.0)) {
    throw std::invalid_argument("select_segments: window must be positive");
  }
  if (!(hop_s > 0.0)) {
    throw std::invalid_argument("select_segments: hop must be positive");
  }
  thresholds.validate();
  require_aligned(stems.dx, stems.fx, "select_segments");
  require_aligned(stems.dx, stems.mx, "select_segments");

  const std::size_t n = stems.dx.frames();
  if (n == 0) return {};
  const double rate = stems.dx.sample_rate();
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(window_s * rate)));
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(hop_s * rate)));

  const auto acc_dx = cumulative_power(stems.dx);
  const auto acc_fx = cumulative_power(stems.fx);
  const auto acc_mx = cumulative_power(stems.mx);

  std::vector<Segment> accepted;
  auto test = [&](std::size_t begin, std::size_t end) {
    if (segment_accepted(window_rms(acc_dx, begin, end),
                         window_rms(acc_fx, begin, end),
                         window_rms(acc_mx, begin, end), thresholds)) {
      accepted.push_back({begin, end});
    }
  };
  if (n < window) {
    test(0, n);
    return accepted;
  }
  for (std::size_t begin = 0; begin + window <= n; begin += hop) {
    test(begin, begin + window);
  }
  return accepted;
}

}  // namespace cdx
