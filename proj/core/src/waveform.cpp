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

#include "cdx/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace cdx {

Waveform::Waveform(std::vector<double> left, std::vector<double> right,
                   int sample_rate)
    : channels_{std::move(left), std::move(right)}, sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) {
    throw std::invalid_argument("Waveform: sample rate must be positive, got " +
                                std::to_string(sample_rate_));
  }
  if (channels_[0].size() != channels_[1].size()) {
    throw std::invalid_argument("Waveform: channel lengths differ (" +
                                std::to_string(channels_[0].size()) + " vs " +
                                std::to_string(channels_[1].size()) + ")");
  }
  for (const auto& ch : channels_) {
    if (!std::all_of(ch.begin(), ch.end(),
                     [](double v) { return std::isfinite(v); })) {
      throw std::invalid_argument("Waveform: non-finite sample");
    }
  }
}

Waveform Waveform::from_mono(std::vector<double> mono, int sample_rate) {
  std::vector<double> copy = mono;
  return Waveform(std::move(mono), std::move(copy), sample_rate);
}

Waveform Waveform::silence(std::size_t frames, int sample_rate) {
  return Waveform(std::vector<double>(frames, 0.0),
                  std::vector<double>(frames, 0.0), sample_rate);
}

std::array<std::vector<double>, 2> Waveform::release() && {
  return std::move(channels_);
}

std::string_view stem_name(Stem stem) {
  switch (stem) {
    case Stem::kDialogue:
      return "dx";
    case Stem::kEffects:
      return "fx";
    case Stem::kMusic:
      return "mx";
  }
  return "?";
}

Stem stem_from_name(std::string_view name) {
  if (name == "dx") return Stem::kDialogue;
  if (name == "fx") return Stem::kEffects;
  if (name == "mx") return Stem::kMusic;
  throw std::invalid_argument("unknown stem name '" + std::string(name) +
                              "' (expected dx, fx or mx)");
}

const Waveform& SourceEstimates::operator[](Stem s) const {
  switch (s) {
    case Stem::kDialogue:
      return dx;
    case Stem::kEffects:
      return fx;
    case Stem::kMusic:
      break;
  }
  return mx;
}

Waveform& SourceEstimates::operator[](Stem s) {
  return const_cast<Waveform&>(std::as_const(*this)[s]);
}

const Waveform& StemSet::operator[](Stem s) const {
  switch (s) {
    case Stem::kDialogue:
      return dx;
    case Stem::kEffects:
      return fx;
    case Stem::kMusic:
      break;
  }
  return mx;
}

void StemSet::check_aligned() const {
  require_aligned(mixture, dx, "StemSet dx");
  require_aligned(mixture, fx, "StemSet fx");
  require_aligned(mixture, mx, "StemSet mx");
}

double StemSet::consistency_error() const {
  check_aligned();
  double worst = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    auto x = mixture.channel(c);
    auto d = dx.channel(c);
    auto f = fx.channel(c);
    auto m = mx.channel(c);
    for (std::size_t n = 0; n < x.size(); ++n) {
      worst = std::max(worst, std::abs(x[n] - (d[n] + f[n] + m[n])));
    }
  }
  return worst;
}

void require_aligned(const Waveform& a, const Waveform& b,
                     std::string_view what) {
  if (a.frames() != b.frames()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(a.frames()) + " vs " +
                                std::to_string(b.frames()) + " frames)");
  }
  if (a.sample_rate() != b.sample_rate()) {
    throw std::invalid_argument(std::string(what) + ": sample rate mismatch (" +
                                std::to_string(a.sample_rate()) + " vs " +
                                std::to_string(b.sample_rate()) + ")");
  }
}

namespace {

template <typename Op>
Waveform zip(const Waveform& a, const Waveform& b, Op op) {
  std::array<std::vector<double>, 2> out;
  for (std::size_t c = 0; c < 2; ++c) {
    auto x = a.channel(c);
    auto y = b.channel(c);
    out[c].resize(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) out[c][n] = op(x[n], y[n]);
  }
  return Waveform(std::move(out[0]), std::move(out[1]), a.sample_rate());
}

}  // namespace

Waveform operator+(const Waveform& a, const Waveform& b) {
  require_aligned(a, b, "waveform sum");
  return zip(a, b, [](double x, double y) { return x + y; });
}

Waveform operator-(const Waveform& a, const Waveform& b) {
  require_aligned(a, b, "waveform difference");
  return zip(a, b, [](double x, double y) { return x - y; });
}

Waveform scaled(const Waveform& w, double gain) {
  std::array<std::vector<double>, 2> out;
  for (std::size_t c = 0; c < 2; ++c) {
    auto x = w.channel(c);
    out[c].resize(x.size());
    std::transform(x.begin(), x.end(), out[c].begin(),
                   [gain](double v) { return gain * v; });
  }
  return Waveform(std::move(out[0]), std::move(out[1]), w.sample_rate());
}

Waveform sum_sources(const SourceEstimates& s) {
  require_aligned(s.dx, s.fx, "source sum");
  require_aligned(s.dx, s.mx, "source sum");
  std::array<std::vector<double>, 2> out;
  for (std::size_t c = 0; c < 2; ++c) {
    auto d = s.dx.channel(c);
    auto f = s.fx.channel(c);
    auto m = s.mx.channel(c);
    out[c].resize(d.size());
    for (std::size_t n = 0; n < d.size(); ++n) out[c][n] = d[n] + f[n] + m[n];
  }
  return Waveform(std::move(out[0]), std::move(out[1]), s.dx.sample_rate());
}

double peak_abs(const Waveform& w) {
  double peak = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    for (double v : w.channel(c)) peak = std::max(peak, std::abs(v));
  }
  return peak;
}

double energy(const Waveform& w) {
  double acc = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    for (double v : w.channel(c)) acc += v * v;
  }
  return acc;
}

Waveform slice(const Waveform& w, std::size_t begin, std::size_t end) {
  if (begin > end || end > w.frames()) {
    throw std::out_of_range("slice: range [" + std::to_string(begin) + ", " +
                            std::to_string(end) + ") outside waveform of " +
                            std::to_string(w.frames()) + " frames");
  }
  auto l = w.left();
  auto r = w.right();
  return Waveform(std::vector<double>(l.begin() + begin, l.begin() + end),
                  std::vector<double>(r.begin() + begin, r.begin() + end),
                  w.sample_rate());
}

}  // namespace cdx
