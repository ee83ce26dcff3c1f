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

#include "cdx/sigstats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "cdx/error.hpp"

namespace cdx {

using nlohmann::json;

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.count = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size()));
  return out;
}

namespace {

std::vector<double> bin_frequencies(std::size_t bins, std::size_t fft_size,
                                    int sample_rate) {
  std::vector<double> f(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    f[k] = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
  }
  return f;
}

const double kMagnitudeFloor = std::pow(10.0, kMagnitudeFloorDb / 20.0);

}  // namespace

double EqCurve::mean_db_at(double frequency_hz) const {
  if (frequencies.empty()) throw std::logic_error("EqCurve: empty curve");
  if (frequency_hz <= frequencies.front()) return mean_db.front();
  if (frequency_hz >= frequencies.back()) return mean_db.back();
  const auto it =
      std::upper_bound(frequencies.begin(), frequencies.end(), frequency_hz);
  const std::size_t hi = static_cast<std::size_t>(it - frequencies.begin());
  const std::size_t lo = hi - 1;
  const double t =
      (frequency_hz - frequencies[lo]) / (frequencies[hi] - frequencies[lo]);
  return mean_db[lo] + t * (mean_db[hi] - mean_db[lo]);
}

std::vector<double> clip_eq_db(const Waveform& clip,
                               const SpectrogramParams& params) {
  const auto normalized = normalize_loudness(clip, kAnalysisLoudnessLufs);
  const Spectrogram spec = magnitude_spectrogram(normalized.waveform, params);
  std::vector<double> avg(spec.bins, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t f = 0; f < spec.frames; ++f) {
      const auto frame = spec.frame(c, f);
      for (std::size_t k = 0; k < spec.bins; ++k) avg[k] += frame[k];
    }
  }
  const double norm = 1.0 / (2.0 * static_cast<double>(spec.frames));
  for (double& v : avg) v = 20.0 * std::log10(std::max(v * norm, kMagnitudeFloor));
  return avg;
}

EqCurve eq_curve(std::span<const Waveform> clips,
                 const SpectrogramParams& params) {
  if (clips.empty()) throw DataError("eq_curve: no clips");
  std::vector<std::vector<double>> curves;
  curves.reserve(clips.size());
  for (const auto& clip : clips) curves.push_back(clip_eq_db(clip, params));

  EqCurve out;
  const std::size_t bins = curves.front().size();
  out.frequencies = bin_frequencies(bins, params.fft_size, clips[0].sample_rate());
  out.mean_db.resize(bins);
  out.std_db.resize(bins);
  out.clip_count = clips.size();
  std::vector<double> column(curves.size());
  for (std::size_t k = 0; k < bins; ++k) {
    for (std::size_t i = 0; i < curves.size(); ++i) column[i] = curves[i][k];
    const MeanStd ms = mean_std(column);
    out.mean_db[k] = ms.mean;
    out.std_db[k] = ms.std;
  }
  return out;
}

double panning_similarity(double mag_left, double mag_right) {
  const double e = mag_left * mag_left + mag_right * mag_right;
  if (e <= 0.0) return 1.0;
  return 2.0 * mag_left * mag_right / e;
}

double panning_direction(double mag_left, double mag_right) {
  // sign(Psi_L - Psi_R) with Psi_L = X_R/X_L and Psi_R = X_L/X_R reduces to
  // sign(X_R^2 - X_L^2), which also covers the one-sided limits.
  const double d = mag_right * mag_right - mag_left * mag_left;
  return static_cast<double>((d > 0.0) - (d < 0.0));
}

PanningSpectrum panning_spectrum(const Waveform& x,
                                 const SpectrogramParams& params) {
  const Spectrogram spec = magnitude_spectrogram(x, params);
  PanningSpectrum out;
  out.frequencies = bin_frequencies(spec.bins, params.fft_size, x.sample_rate());
  std::vector<double> psi_sum(spec.bins, 0.0);
  std::vector<double> psi_sq(spec.bins, 0.0);
  std::vector<double> delta_sum(spec.bins, 0.0);
  std::vector<double> delta_sq(spec.bins, 0.0);
  out.cell_count.assign(spec.bins, 0);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    const auto left = spec.frame(0, f);
    const auto right = spec.frame(1, f);
    for (std::size_t k = 0; k < spec.bins; ++k) {
      const double l = left[k];
      const double r = right[k];
      if (l * l + r * r < kPanningEnergyFloor) continue;
      const double psi = panning_similarity(l, r);
      const double delta = panning_direction(l, r);
      psi_sum[k] += psi;
      psi_sq[k] += psi * psi;
      delta_sum[k] += delta;
      delta_sq[k] += delta * delta;
      ++out.cell_count[k];
    }
  }
  out.psi_mean.resize(spec.bins);
  out.psi_std.resize(spec.bins);
  out.delta_mean.resize(spec.bins);
  out.delta_std.resize(spec.bins);
  for (std::size_t k = 0; k < spec.bins; ++k) {
    const auto n = static_cast<double>(out.cell_count[k]);
    if (n == 0) {
      out.psi_mean[k] = 1.0;
      out.psi_std[k] = 0.0;
      out.delta_mean[k] = 0.0;
      out.delta_std[k] = 0.0;
      continue;
    }
    const double pm = psi_sum[k] / n;
    const double dm = delta_sum[k] / n;
    out.psi_mean[k] = std::clamp(pm, 0.0, 1.0);
    out.delta_mean[k] = std::clamp(dm, -1.0, 1.0);
    out.psi_std[k] = std::sqrt(std::max(0.0, psi_sq[k] / n - pm * pm));
    out.delta_std[k] = std::sqrt(std::max(0.0, delta_sq[k] / n - dm * dm));
  }
  return out;
}

PanningSpectrum average_panning(std::span<const PanningSpectrum> clips) {
  if (clips.empty()) throw DataError("average_panning: no clips");
  const std::size_t bins = clips.front().bins();
  for (const auto& c : clips) {
    if (c.bins() != bins) {
      throw std::invalid_argument("average_panning: differing frequency grids");
    }
  }
  PanningSpectrum out;
  out.frequencies = clips.front().frequencies;
  out.psi_mean.assign(bins, 1.0);
  out.psi_std.assign(bins, 0.0);
  out.delta_mean.assign(bins, 0.0);
  out.delta_std.assign(bins, 0.0);
  out.cell_count.assign(bins, 0);
  std::vector<double> psi;
  std::vector<double> delta;
  for (std::size_t k = 0; k < bins; ++k) {
    psi.clear();
    delta.clear();
    for (const auto& c : clips) {
      if (c.cell_count[k] == 0) continue;
      psi.push_back(c.psi_mean[k]);
      delta.push_back(c.delta_mean[k]);
      out.cell_count[k] += c.cell_count[k];
    }
    if (psi.empty()) continue;
    const MeanStd p = mean_std(psi);
    const MeanStd d = mean_std(delta);
    out.psi_mean[k] = p.mean;
    out.psi_std[k] = p.std;
    out.delta_mean[k] = d.mean;
    out.delta_std[k] = d.std;
  }
  return out;
}

LoudnessStats loudness_stats(std::span<const Waveform> clips) {
  LoudnessStats out;
  std::vector<double> values;
  for (const auto& clip : clips) {
    const auto l = integrated_loudness(clip);
    if (l) {
      values.push_back(*l);
    } else {
      ++out.unmeasurable;
    }
  }
  const MeanStd ms = mean_std(values);
  out.mean_lufs = ms.mean;
  out.std_lu = ms.std;
  out.measured = ms.count;
  return out;
}

DrcStats drc_stats(std::span<const Waveform> clips, const DrcParams& params) {
  DrcStats out;
  std::vector<double> values;
  for (const auto& clip : clips) {
    if (!integrated_loudness(clip)) {
      ++out.without_transients;
      continue;
    }
    const auto p = drc_peak_stat(clip, params);
    if (p) {
      values.push_back(*p);
    } else {
      ++out.without_transients;
    }
  }
  const MeanStd ms = mean_std(values);
  out.mean_db = ms.mean;
  out.std_db = ms.std;
  out.measured = ms.count;
  return out;
}

ClassStatistics analyze_class(std::span<const Waveform> clips,
                              const SpectrogramParams& spectrogram,
                              const DrcParams& drc) {
  if (clips.empty()) throw DataError("analyze_class: no clips");
  ClassStatistics out;
  out.loudness = loudness_stats(clips);
  out.drc = drc_stats(clips, drc);

  std::vector<Waveform> measurable;
  std::vector<PanningSpectrum> panning;
  for (const auto& clip : clips) {
    if (clip.frames() < spectrogram.fft_size) continue;
    panning.push_back(panning_spectrum(clip, spectrogram));
    if (clip.frames() >= static_cast<std::size_t>(0.4 * clip.sample_rate()) &&
        integrated_loudness(clip)) {
      measurable.push_back(clip);
    }
  }
  if (measurable.empty()) {
    throw DataError("analyze_class: no clip is long and loud enough for EQ");
  }
  out.eq = eq_curve(measurable, spectrogram);
  out.panning = average_panning(panning);
  return out;
}

namespace {

json nullable(double value, bool valid) {
  return valid ? json(value) : json(nullptr);
}

}  // namespace

std::string statistics_report_json(
    const std::map<std::string, ClassStatistics>& by_class) {
  json report = json::object();
  for (const auto& [name, s] : by_class) {
    json j;
    j["loudness"] = {{"mean", nullable(s.loudness.mean_lufs, s.loudness.measured > 0)},
                     {"std", nullable(s.loudness.std_lu, s.loudness.measured > 0)},
                     {"measured", s.loudness.measured},
                     {"unmeasurable", s.loudness.unmeasurable}};
    j["drc"] = {{"mean", nullable(s.drc.mean_db, s.drc.measured > 0)},
                {"std", nullable(s.drc.std_db, s.drc.measured > 0)},
                {"measured", s.drc.measured},
                {"without_transients", s.drc.without_transients}};
    j["frequencies"] = s.eq.frequencies;
    j["eq"] = s.eq.mean_db;
    j["eq_std"] = s.eq.std_db;
    j["psi"] = s.panning.psi_mean;
    j["psi_std"] = s.panning.psi_std;
    j["delta"] = s.panning.delta_mean;
    j["delta_std"] = s.panning.delta_std;
    j["clips"] = s.eq.clip_count;
    report[name] = std::move(j);
  }
  return report.dump(2);
}

void write_curves_csv(const std::map<std::string, ClassStatistics>& by_class,
                      const std::filesystem::path& path) {
  if (by_class.empty()) throw DataError("write_curves_csv: no classes");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "frequency_hz";
  for (const auto& [name, s] : by_class) {
    out << ',' << name << "_eq_db," << name << "_eq_std_db," << name << "_psi,"
        << name << "_delta";
  }
  out << '\n';
  const auto& grid = by_class.begin()->second.eq.frequencies;
  out.precision(10);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << grid[k];
    for (const auto& [name, s] : by_class) {
      out << ',' << s.eq.mean_db.at(k) << ',' << s.eq.std_db.at(k) << ','
          << s.panning.psi_mean.at(k) << ',' << s.panning.delta_mean.at(k);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

EqCurve eq_curve_from_report(const std::filesystem::path& report,
                             const std::string& class_name) {
  std::ifstream in(report);
  if (!in) throw IoError("cannot read '" + report.string() + "'");
  try {
    const json j = json::parse(in);
    const json& c = j.at(class_name);
    EqCurve eq;
    eq.frequencies = c.at("frequencies").get<std::vector<double>>();
    eq.mean_db = c.at("eq").get<std::vector<double>>();
    eq.std_db = c.value("eq_std", std::vector<double>(eq.mean_db.size(), 0.0));
    eq.clip_count = c.value("clips", std::size_t{0});
    if (eq.frequencies.size() != eq.mean_db.size()) {
      throw FormatError("eq and frequency arrays differ in length");
    }
    return eq;
  } catch (const json::exception& e) {
    throw FormatError("bad statistics report '" + report.string() +
                      "': " + e.what());
  }
}

}  // namespace cdx
