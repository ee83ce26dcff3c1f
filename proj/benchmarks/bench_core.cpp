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

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "cdx/adapt.hpp"
#include "cdx/loudness.hpp"
#include "cdx/metrics.hpp"
#include "cdx/postprocess.hpp"
#include "cdx/resample.hpp"
#include "cdx/spectral.hpp"
#include "cdx/waveform.hpp"

namespace {

cdx::Waveform noise(double seconds, std::uint64_t seed, int rate = cdx::kCanonicalSampleRate) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, 0.1);
  std::vector<double> l(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    l[i] = d(gen);
    r[i] = d(gen);
  }
  return cdx::Waveform(std::move(l), std::move(r), rate);
}

void set_audio_rate(benchmark::State& state, double seconds) {
  state.counters["audio_s/s"] =
      benchmark::Counter(seconds * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}

void BM_SdrSource(benchmark::State& state) {
  const double secs = static_cast<double>(state.range(0));
  const auto ref = noise(secs, 1);
  const auto est = ref + noise(secs, 2);
  for (auto _ : state) benchmark::DoNotOptimize(cdx::sdr_source(ref, est));
  set_audio_rate(state, secs);
}
BENCHMARK(BM_SdrSource)->Arg(10)->Arg(60);

void BM_IntegratedLoudness(benchmark::State& state) {
  const double secs = static_cast<double>(state.range(0));
  const auto x = noise(secs, 3);
  for (auto _ : state) benchmark::DoNotOptimize(cdx::integrated_loudness(x));
  set_audio_rate(state, secs);
}
BENCHMARK(BM_IntegratedLoudness)->Arg(10)->Arg(60);

void BM_MagnitudeSpectrogram(benchmark::State& state) {
  const auto x = noise(10.0, 4);
  cdx::SpectrogramParams p;
  p.fft_size = static_cast<std::size_t>(state.range(0));
  p.hop = p.fft_size / 4;
  for (auto _ : state) benchmark::DoNotOptimize(cdx::magnitude_spectrogram(x, p));
  set_audio_rate(state, 10.0);
}
BENCHMARK(BM_MagnitudeSpectrogram)->Arg(1024)->Arg(4096);

void BM_ZeroPhaseApply(benchmark::State& state) {
  const auto x = noise(10.0, 5);
  const auto fir = cdx::FirFilter::identity(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cdx::zero_phase_apply(x, fir));
  set_audio_rate(state, 10.0);
}
BENCHMARK(BM_ZeroPhaseApply)->Arg(101)->Arg(511);

void BM_Resample44kTo48k(benchmark::State& state) {
  const auto x = noise(10.0, 6, 44100);
  for (auto _ : state) benchmark::DoNotOptimize(cdx::resample(x, 48000));
  set_audio_rate(state, 10.0);
}
BENCHMARK(BM_Resample44kTo48k);

void BM_MixtureConsistency(benchmark::State& state) {
  const cdx::SourceEstimates est{noise(10.0, 7), noise(10.0, 8), noise(10.0, 9)};
  const auto mix = cdx::sum_sources(est) + noise(10.0, 10);
  for (auto _ : state) benchmark::DoNotOptimize(cdx::mixture_consistency(mix, est));
  set_audio_rate(state, 10.0);
}
BENCHMARK(BM_MixtureConsistency);

}  // namespace

BENCHMARK_MAIN();
