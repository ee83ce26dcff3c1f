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

#include "cdx/postprocess.hpp"

#include <cmath>
#include <stdexcept>

#include "cdx/error.hpp"
#include "cdx/loudness.hpp"

namespace cdx {

PeakNormalized peak_normalize(const Waveform& x) {
  const double peak = peak_abs(x);
  if (peak == 0.0) throw DataError("peak_normalize: silent input");
  const double gain = 1.0 / peak;
  return {scaled(x, gain), gain};
}

ScaleCoefficient ls_scale_coeff(const Waveform& mixture,
                                const Waveform& estimate) {
  require_aligned(mixture, estimate, "ls_scale_coeff");
  double cross = 0.0;
  double power = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    auto x = mixture.channel(c);
    auto s = estimate.channel(c);
    for (std::size_t n = 0; n < x.size(); ++n) {
      cross += x[n] * s[n];
      power += s[n] * s[n];
    }
  }
  return {cross / (kLsScaleEpsilon + power)};
}

Waveform apply_scale(const Waveform& estimate, double factor) {
  if (!std::isfinite(factor)) {
    throw std::invalid_argument("apply_scale: non-finite factor");
  }
  return scaled(estimate, factor);
}

void ResidualSplit::validate() const {
  if (dx < 0.0 || fx < 0.0 || mx < 0.0) {
    throw std::invalid_argument("residual split fractions must be >= 0");
  }
  if (std::abs(dx + fx + mx - 1.0) > 1e-12) {
    throw std::invalid_argument("residual split fractions must sum to 1");
  }
}

SourceEstimates mixture_consistency(const Waveform& mixture,
                                    const SourceEstimates& estimates,
                                    const ResidualSplit& split) {
  split.validate();
  require_aligned(mixture, estimates.dx, "mixture_consistency dx");
  require_aligned(mixture, estimates.fx, "mixture_consistency fx");
  require_aligned(mixture, estimates.mx, "mixture_consistency mx");
  const std::size_t n = mixture.frames();
  std::array<std::vector<double>, 2> dx;
  std::array<std::vector<double>, 2> fx;
  std::array<std::vector<double>, 2> mx;
  for (std::size_t c = 0; c < 2; ++c) {
    auto x = mixture.channel(c);
    auto d = estimates.dx.channel(c);
    auto f = estimates.fx.channel(c);
    auto m = estimates.mx.channel(c);
    dx[c].resize(n);
    fx[c].resize(n);
    mx[c].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ((x[i] - d[i]) - f[i]) - m[i];
      dx[c][i] = split.dx == 0.0 ? d[i] : d[i] + split.dx * r;
      fx[c][i] = f[i] + split.fx * r;
      mx[c][i] = (x[i] - dx[c][i]) - fx[c][i];
    }
  }
  const int rate = mixture.sample_rate();
  return {Waveform(std::move(dx[0]), std::move(dx[1]), rate),
          Waveform(std::move(fx[0]), std::move(fx[1]), rate),
          Waveform(std::move(mx[0]), std::move(mx[1]), rate)};
}

void BlendSpec::validate() const {
  if (!ids.empty() && ids.size() != weights.size()) {
    throw std::invalid_argument("blend: ids and weights differ in length");
  }
  bool any_positive = false;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("blend: weights must be finite and >= 0");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) {
    throw std::invalid_argument("blend: at least one weight must be positive");
  }
}

std::vector<double> BlendSpec::coefficients() const {
  validate();
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> c(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) c[i] = weights[i] / total;
  return c;
}

Waveform blend(std::span<const Waveform> estimates, const BlendSpec& spec) {
  if (estimates.size() != spec.weights.size()) {
    throw std::invalid_argument("blend: " + std::to_string(estimates.size()) +
                                " estimates but " +
                                std::to_string(spec.weights.size()) +
                                " weights");
  }
  const auto coef = spec.coefficients();
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    require_aligned(estimates[0], estimates[i], "blend");
  }
  const std::size_t n = estimates[0].frames();
  std::array<std::vector<double>, 2> out;
  for (std::size_t c = 0; c < 2; ++c) {
    out[c].assign(n, 0.0);
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      if (coef[i] == 0.0) continue;
      auto s = estimates[i].channel(c);
      for (std::size_t k = 0; k < n; ++k) out[c][k] += coef[i] * s[k];
    }
  }
  return Waveform(std::move(out[0]), std::move(out[1]),
                  estimates[0].sample_rate());
}

Waveform cascade_residual(const Waveform& mixture, const Waveform& dx_estimate) {
  return mixture - dx_estimate;
}

PostChainConfig post_chain_from_string(std::string_view spec) {
  PostChainConfig cfg;
  if (spec == "none" || spec.empty()) return cfg;
  bool seen_scale = false;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t plus = spec.find('+', pos);
    const std::string_view token = spec.substr(
        pos, plus == std::string_view::npos ? std::string_view::npos
                                            : plus - pos);
    if (token == "ls" || token == "inv-ls") {
      if (seen_scale) throw std::invalid_argument("post chain: two scale steps");
      cfg.scale = token == "ls" ? ScaleMode::kLeastSquares
                                : ScaleMode::kInverseLeastSquares;
      seen_scale = true;
    } else if (token == "mc") {
      if (cfg.consistency) throw std::invalid_argument("post chain: mc twice");
      cfg.consistency = true;
      cfg.consistency_first = !seen_scale;
    } else {
      throw std::invalid_argument("post chain: unknown step '" +
                                  std::string(token) + "'");
    }
    if (plus == std::string_view::npos) break;
    pos = plus + 1;
  }
  if (!seen_scale) cfg.consistency_first = false;
  return cfg;
}

std::string to_string(const PostChainConfig& config) {
  std::string scale;
  switch (config.scale) {
    case ScaleMode::kNone:
      break;
    case ScaleMode::kLeastSquares:
      scale = "ls";
      break;
    case ScaleMode::kInverseLeastSquares:
      scale = "inv-ls";
      break;
  }
  if (!config.consistency) return scale.empty() ? "none" : scale;
  if (scale.empty()) return "mc";
  return config.consistency_first ? "mc+" + scale : scale + "+mc";
}

SourceEstimates apply_post_chain(const Waveform& mixture,
                                 SourceEstimates estimates,
                                 const PostChainConfig& config) {
  auto scale_all = [&]() {
    if (config.scale == ScaleMode::kNone) return;
    for (Stem s : kAllStems) {
      const double alpha = ls_scale_coeff(mixture, estimates[s]).alpha;
      double factor = alpha;
      if (config.scale == ScaleMode::kInverseLeastSquares) {
        if (alpha == 0.0) {
          throw DataError("inverse scaling: estimate " +
                          std::string(stem_name(s)) +
                          " is orthogonal to the mixture");
        }
        factor = 1.0 / alpha;
      }
      estimates[s] = apply_scale(estimates[s], factor);
    }
  };
  if (config.consistency && config.consistency_first) {
    estimates = mixture_consistency(mixture, estimates, config.split);
    scale_all();
  } else {
    scale_all();
    if (config.consistency) {
      estimates = mixture_consistency(mixture, estimates, config.split);
    }
  }
  return estimates;
}

SourceEstimates run_separation_chain(Separator& separator,
                                     const Waveform& mixture,
                                     const PostChainConfig& config) {
  const PeakNormalized input = peak_normalize(mixture);
  SourceEstimates est = separator.separate(input.waveform);
  for (Stem s : kAllStems) require_aligned(mixture, est[s], "separator output");
  return apply_post_chain(mixture, std::move(est), config);
}

std::vector<SweepPoint> loudness_sweep(Separator& separator,
                                       const StemSet& references,
                                       std::span<const double> lufs_grid,
                                       const PostChainConfig& post) {
  references.check_aligned();
  const Waveform& x = references.mixture;
  const auto measured = integrated_loudness(x);
  if (!measured) throw DataError("loudness_sweep: mixture loudness unmeasurable");

  std::vector<SweepPoint> points;
  points.reserve(lufs_grid.size());
  for (double target : lufs_grid) {
    SweepPoint point;
    point.input_lufs = target;
    const double gain_db = target - *measured;
    try {
      SourceEstimates est = separator.separate(apply_gain_db(x, gain_db));
      const double restore = db_to_gain(-gain_db);
      for (Stem s : kAllStems) {
        require_aligned(x, est[s], "separator output");
        est[s] = scaled(est[s], restore);
      }
      if (!post.is_noop()) est = apply_post_chain(x, std::move(est), post);
      point.score = global_sdr_clip(references, est);
      if (!point.score) point.error = "reference stem is silent";
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace cdx
