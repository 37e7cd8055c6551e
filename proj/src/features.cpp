// Copyright 2026 The segser Authors. All Rights Reserved.
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

#include "segser/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "segser/error.hpp"

namespace segser {
namespace {

constexpr std::array<std::string_view, kFunctionalCount> kFunctionalNames = {
    "mean",        "std",         "kurtosis", "skewness",  "min",       "max",
    "rel_min_pos", "rel_max_pos", "range",    "lr_offset", "lr_slope",  "lr_mse"};

std::string fmt_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void HistogramParams::validate() const {
  if (!(b > a)) throw Error("histogram: require b > a");
  if (!(h > 0.0)) throw Error("histogram: require h > 0");
  const double ratio = (b - a) / h;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw Error("histogram: (b - a) = " + fmt_short(b - a) + " is not a multiple of h = " +
                fmt_short(h));
  }
}

std::size_t HistogramParams::bin_count() const {
  validate();
  return static_cast<std::size_t>(std::llround((b - a) / h));
}

PitchHistogram pitch_histogram(std::span<const std::optional<double>> pitches,
                               const HistogramParams& params) {
  const std::size_t bins = params.bin_count();
  PitchHistogram out{params, std::vector<double>(bins, 0.0)};
  std::size_t counted = 0;
  for (const auto& p : pitches) {
    if (!p || !std::isfinite(*p) || *p < params.a || *p > params.b) continue;
    auto bin = static_cast<std::size_t>(std::floor((*p - params.a) / params.h));
    bin = std::min(bin, bins - 1);
    out.heights[bin] += 1.0;
    ++counted;
  }
  if (counted > 0) {
    for (double& v : out.heights) v /= static_cast<double>(counted);
  }
  return out;
}

std::array<double, kFunctionalCount> FunctionalVector::values() const {
  return {mean,        std,         kurtosis, skewness,  min,      max,
          rel_min_pos, rel_max_pos, range,    lr_offset, lr_slope, lr_mse};
}

std::string_view FunctionalVector::name(std::size_t i) {
  if (i >= kFunctionalCount) throw Error("functional index out of range");
  return kFunctionalNames[i];
}

FunctionalVector functionals(std::span<const double> contour) {
  if (contour.empty()) throw Error("functionals: empty contour");
  const std::size_t m = contour.size();
  const double count = static_cast<double>(m);
  FunctionalVector f;

  const auto [lo, hi] = std::minmax_element(contour.begin(), contour.end());
  // minmax_element returns the last maximum; the first occurrence is wanted.
  const auto first_max = std::max_element(contour.begin(), contour.end());
  f.min = *lo;
  f.max = *hi;
  f.range = f.max - f.min;
  const double span_t = m > 1 ? static_cast<double>(m - 1) : 1.0;
  f.rel_min_pos = m > 1 ? static_cast<double>(lo - contour.begin()) / span_t : 0.0;
  f.rel_max_pos = m > 1 ? static_cast<double>(first_max - contour.begin()) / span_t : 0.0;

  double sum = 0.0;
  for (double v : contour) sum += v;
  f.mean = std::clamp(sum / count, f.min, f.max);

  if (f.range > 0.0) {
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : contour) {
      const double d = v - f.mean;
      const double d2 = d * d;
      m2 += d2;
      m3 += d2 * d;
      m4 += d2 * d2;
    }
    m2 /= count;
    m3 /= count;
    m4 /= count;
    f.std = std::sqrt(m2);
    if (m2 > 0.0) {
      f.skewness = m3 / std::pow(m2, 1.5);
      f.kurtosis = m4 / (m2 * m2);
    }
  }

  if (m == 1) {
    f.lr_offset = contour[0];
    return f;
  }
  // Abscissa t_i = i / (M - 1); its mean is 1/2.
  double stt = 0.0, stx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dt = static_cast<double>(i) / span_t - 0.5;
    stt += dt * dt;
    stx += dt * (contour[i] - sum / count);
  }
  f.lr_slope = stx / stt;
  f.lr_offset = sum / count - 0.5 * f.lr_slope;
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / span_t;
    const double r = contour[i] - (f.lr_offset + f.lr_slope * t);
    sse += r * r;
  }
  f.lr_mse = sse / count;
  return f;
}

void ExtractionConfig::validate() const {
  if (scheme.kind == SegmentationScheme::Kind::Rti && (scheme.n < 1 || scheme.n > 10)) {
    throw Error("config: RTI segment count must be in [1, 10], got " + std::to_string(scheme.n));
  }
  if (include_hist) {
    hist.validate();
    if (scheme.kind == SegmentationScheme::Kind::Gti && (hist_segments < 1 || hist_segments > 10)) {
      throw Error("config: hist_segments must be in [1, 10]");
    }
  }
  if (!(hop_ms > 0.0) || !(frame_ms > hop_ms)) throw Error("config: require frame_ms > hop_ms > 0");
}

std::string ExtractionConfig::canonical() const {
  std::ostringstream os;
  os << "scheme=" << (scheme.kind == SegmentationScheme::Kind::Gti ? "gti" : "rti")
     << ";n=" << scheme.segment_count() << ";hist=" << (include_hist ? 1 : 0);
  if (include_hist) {
    os << ";a=" << fmt_number(hist.a) << ";b=" << fmt_number(hist.b) << ";h=" << fmt_number(hist.h);
    if (scheme.kind == SegmentationScheme::Kind::Gti) os << ";hist_segments=" << hist_segments;
  }
  os << ";frame_ms=" << fmt_number(frame_ms) << ";hop_ms=" << fmt_number(hop_ms)
     << ";fmin=" << fmt_number(lld.pitch.fmin) << ";fmax=" << fmt_number(lld.pitch.fmax)
     << ";voicing=" << fmt_number(lld.pitch.voicing_threshold)
     << ";silence=" << fmt_number(lld.pitch.silence_floor)
     << ";octave=" << fmt_number(lld.pitch.octave_ratio);
  return os.str();
}

std::uint64_t ExtractionConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string ExtractionConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::size_t ExtractionConfig::histogram_segments() const {
  if (!include_hist) return 0;
  return scheme.kind == SegmentationScheme::Kind::Gti ? static_cast<std::size_t>(hist_segments)
                                                      : scheme.segment_count();
}

FeatureLayout build_layout(const ExtractionConfig& config) {
  config.validate();
  const bool gti = config.scheme.kind == SegmentationScheme::Kind::Gti;
  const std::size_t bins = config.include_hist ? config.hist.bin_count() : 0;
  FeatureLayout layout;
  layout.coords.reserve(feature_dimension(config));

  auto add_functionals = [&](std::size_t seg, bool global) {
    const std::string region = global ? "g" : "s" + std::to_string(seg);
    for (std::size_t c = 0; c < kContours; ++c) {
      for (std::size_t f = 0; f < kFunctionalCount; ++f) {
        layout.coords.push_back({FeatureCoordinate::Kind::Functional, seg, c, f, global});
        layout.names.push_back(region + "." + std::string(contour_name(c)) + "." +
                               std::string(FunctionalVector::name(f)));
      }
    }
  };
  auto add_histogram = [&](std::size_t seg) {
    for (std::size_t i = 0; i < bins; ++i) {
      layout.coords.push_back({FeatureCoordinate::Kind::Histogram, seg, i, 0, false});
      const double lo = config.hist.a + static_cast<double>(i) * config.hist.h;
      layout.names.push_back("s" + std::to_string(seg) + ".f0hist." + fmt_short(lo) + "-" +
                             fmt_short(lo + config.hist.h));
    }
  };

  if (gti) {
    add_functionals(0, true);
    for (std::size_t s = 0; s < config.histogram_segments(); ++s) add_histogram(s);
  } else {
    for (std::size_t s = 0; s < config.scheme.segment_count(); ++s) {
      add_functionals(s, false);
      if (config.include_hist) add_histogram(s);
    }
  }
  return layout;
}

std::size_t feature_dimension(const ExtractionConfig& config) {
  const std::size_t bins = config.include_hist ? config.hist.bin_count() : 0;
  return config.functional_segments() * kFunctionalBlock + config.histogram_segments() * bins;
}

std::array<double, kFunctionalBlock> functional_block(const LldMatrix& lld) {
  std::array<double, kFunctionalBlock> out{};
  for (std::size_t c = 0; c < kContours; ++c) {
    const auto values = functionals(lld.contour(c)).values();
    std::copy(values.begin(), values.end(), out.begin() + static_cast<std::ptrdiff_t>(c * kFunctionalCount));
  }
  return out;
}

UtteranceFeatureVector assemble(const AudioClip& clip, const ExtractionConfig& config) {
  return assemble(clip, config, std::make_shared<const FeatureLayout>(build_layout(config)));
}

UtteranceFeatureVector assemble(const AudioClip& clip, const ExtractionConfig& config,
                                std::shared_ptr<const FeatureLayout> layout) {
  config.validate();
  validate_clip(clip);
  const std::size_t frame_len = duration_to_samples(config.frame_ms, clip.sample_rate);

  UtteranceFeatureVector out;
  out.source_id = clip.source_id;
  out.values.reserve(feature_dimension(config));

  auto append_histogram = [&](std::span<const std::optional<double>> pitches) {
    const auto hist = pitch_histogram(pitches, config.hist);
    out.values.insert(out.values.end(), hist.heights.begin(), hist.heights.end());
  };

  for (const auto& seg : segment(clip, config.scheme, frame_len)) {
    const auto frames = frame_region(clip, seg.start_sample, seg.length, config.frame_ms, config.hop_ms);
    const auto lld = extract_lld_matrix(frames, clip.sample_rate, config.lld);
    const auto block = functional_block(lld);
    out.values.insert(out.values.end(), block.begin(), block.end());
    if (config.include_hist && config.scheme.kind == SegmentationScheme::Kind::Rti) {
      append_histogram(lld.pitches());
    }
  }

  if (config.include_hist && config.scheme.kind == SegmentationScheme::Kind::Gti) {
    const auto scheme = SegmentationScheme::rti(config.hist_segments);
    for (const auto& seg : segment(clip, scheme, frame_len)) {
      const auto frames = frame_region(clip, seg.start_sample, seg.length, config.frame_ms, config.hop_ms);
      std::vector<std::optional<double>> pitches;
      pitches.reserve(frames.size());
      for (const auto& f : frames) pitches.push_back(estimate_pitch(f.view(), clip.sample_rate, config.lld.pitch).hz);
      append_histogram(pitches);
    }
  }

  if (layout && layout->size() != out.values.size()) {
    throw Error("assemble: layout size " + std::to_string(layout->size()) +
                " does not match " + std::to_string(out.values.size()) + " extracted values");
  }
  out.layout = std::move(layout);
  return out;
}

}  // namespace segser
