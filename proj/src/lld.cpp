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

#include "segser/lld.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "segser/error.hpp"

namespace segser {
namespace {

constexpr std::array<std::string_view, kContours> kContourNames = {
    "zcr",     "rms",     "pitch",    "hnr",     "mfcc1",    "mfcc2",    "mfcc3",
    "mfcc4",   "mfcc5",   "mfcc6",    "mfcc7",   "mfcc8",    "mfcc9",    "mfcc10",
    "mfcc11",  "mfcc12",  "d_zcr",    "d_rms",   "d_pitch",  "d_hnr",    "d_mfcc1",
    "d_mfcc2", "d_mfcc3", "d_mfcc4",  "d_mfcc5", "d_mfcc6",  "d_mfcc7",  "d_mfcc8",
    "d_mfcc9", "d_mfcc10", "d_mfcc11", "d_mfcc12"};

double lag_product_sum(std::span<const double> x, std::size_t lag) {
  double sum = 0.0;
  const std::size_t n = x.size();
  for (std::size_t m = 0; m + lag < n; ++m) sum += x[m] * x[m + lag];
  return sum;
}

}  // namespace

std::string_view contour_name(std::size_t c) {
  if (c >= kContours) throw Error("contour index out of range");
  return kContourNames[c];
}

double zcr(std::span<const double> frame) {
  if (frame.size() < 2) throw Error("zcr: frame needs at least 2 samples");
  int prev_sign = 0;
  std::size_t crossings = 0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    int sign = (frame[i] > 0.0) - (frame[i] < 0.0);
    if (sign == 0) sign = prev_sign;
    if (i > 0 && sign != 0 && prev_sign != 0 && sign != prev_sign) ++crossings;
    prev_sign = sign;
  }
  return static_cast<double>(crossings) / static_cast<double>(frame.size() - 1);
}

double rms_energy(std::span<const double> frame) {
  if (frame.empty()) throw Error("rms_energy: empty frame");
  double sum = 0.0;
  for (double v : frame) sum += v * v;
  return std::sqrt(sum / static_cast<double>(frame.size()));
}

double acf(std::span<const double> frame, std::size_t lag) {
  const std::size_t n = frame.size();
  if (n < 2 || lag + 2 > n) {
    throw Error("acf: lag " + std::to_string(lag) + " invalid for frame of " +
                std::to_string(n) + " samples (need lag <= N - 2)");
  }
  return lag_product_sum(frame, lag) / static_cast<double>(n - 1 - lag);
}

PitchEstimate estimate_pitch(std::span<const double> frame, int sample_rate,
                             const PitchOptions& options) {
  if (sample_rate <= 0) throw Error("estimate_pitch: sample rate must be positive");
  if (!(options.fmin > 0.0) || !(options.fmax > options.fmin)) {
    throw Error("estimate_pitch: require 0 < fmin < fmax");
  }
  const std::size_t n = frame.size();
  const auto lag_min = static_cast<std::size_t>(std::max(1.0, std::ceil(sample_rate / options.fmax)));
  const auto lag_max = static_cast<std::size_t>(std::floor(sample_rate / options.fmin));
  if (n < 2 || lag_max + 2 > n) {
    throw Error("estimate_pitch: frame of " + std::to_string(n) +
                " samples too short for lag " + std::to_string(lag_max));
  }

  PitchEstimate out;
  const double acf0 = acf(frame, 0);
  if (!(acf0 > 0.0)) return out;

  // Normalised ACF over [lag_min - 1, min(lag_max + 1, n - 2)] so every lag in
  // the search band has neighbours for peak tests where they exist.
  // The candidate score divides each lag sum by the energies of the two
  // overlapping windows, which removes the lag-dependent gain of the
  // 1/(N-1-lag) divisor, and of the partial-period edge, from the peak shape.
  const std::size_t first = lag_min - 1;
  const std::size_t last = std::min(lag_max + 1, n - 2);
  std::vector<double> head(n + 1, 0.0);  // head[k] = sum_{m<k} x(m)^2
  for (std::size_t m = 0; m < n; ++m) head[m + 1] = head[m] + frame[m] * frame[m];
  std::vector<double> r(last - first + 1);
  for (std::size_t lag = first; lag <= last; ++lag) {
    const double lead = head[n - lag];
    const double tail = head[n] - head[lag];
    const double denom = std::sqrt(lead * tail);
    r[lag - first] = denom > 0.0 ? lag_product_sum(frame, lag) / denom : 0.0;
  }
  auto at = [&](std::size_t lag) { return r[lag - first]; };

  std::vector<std::size_t> peaks;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    const bool rises = at(lag) > at(lag - 1);
    const bool falls = lag + 1 > last || at(lag) >= at(lag + 1);
    if (rises && falls) peaks.push_back(lag);
  }

  std::size_t chosen = lag_min;
  if (peaks.empty()) {
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      if (at(lag) > at(chosen)) chosen = lag;
    }
  } else {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_lag = peaks.front();
    for (std::size_t lag : peaks) {
      if (at(lag) > best) {
        best = at(lag);
        best_lag = lag;
      }
    }
    chosen = best_lag;
    if (best > 0.0) {
      for (std::size_t lag : peaks) {
        if (at(lag) >= options.octave_ratio * best) {
          chosen = lag;
          break;
        }
      }
    }
  }

  out.lag = chosen;
  out.strength = at(chosen);

  double refined = static_cast<double>(chosen);
  if (chosen + 1 <= last) {
    const double left = at(chosen - 1);
    const double mid = at(chosen);
    const double right = at(chosen + 1);
    const double curvature = left - 2.0 * mid + right;
    if (curvature < 0.0) {
      refined += std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
    }
  }

  const double energy = std::sqrt(lag_product_sum(frame, 0) / static_cast<double>(n));
  if (energy >= options.silence_floor && out.strength >= options.voicing_threshold) {
    out.hz = std::clamp(sample_rate / refined, options.fmin, options.fmax);
  }
  return out;
}

double hnr_from_acf(double acf0, double acf_t0) {
  if (acf_t0 <= 0.0) return -kHnrClampDb;
  if (acf_t0 >= acf0) return kHnrClampDb;
  const double db = 10.0 * std::log10(acf_t0 / (acf0 - acf_t0));
  return std::clamp(db, -kHnrClampDb, kHnrClampDb);
}

double hnr(std::span<const double> frame, std::size_t t0) {
  return hnr_from_acf(acf(frame, 0), acf(frame, t0));
}

std::vector<double> delta(std::span<const double> contour) {
  if (contour.empty()) throw Error("delta: empty contour");
  const auto last = static_cast<std::ptrdiff_t>(contour.size()) - 1;
  auto clamped = [&](std::ptrdiff_t t) {
    return contour[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(t, 0, last))];
  };
  std::vector<double> out(contour.size());
  for (std::ptrdiff_t t = 0; t <= last; ++t) {
    const double num = (clamped(t + 1) - clamped(t - 1)) + 2.0 * (clamped(t + 2) - clamped(t - 2));
    out[static_cast<std::size_t>(t)] = num / 10.0;
  }
  return out;
}

std::array<double, kBaseStreams> LldFrameVector::streams() const {
  std::array<double, kBaseStreams> s{};
  s[0] = zcr;
  s[1] = rms;
  s[2] = pitch.value_or(0.0);
  s[3] = hnr;
  std::copy(mfcc.begin(), mfcc.end(), s.begin() + 4);
  return s;
}

std::vector<double> LldMatrix::contour(std::size_t c) const {
  if (c >= kContours) throw Error("contour index out of range");
  std::vector<double> out;
  out.reserve(frames.size());
  if (c < kBaseStreams) {
    for (const auto& f : frames) out.push_back(f.streams()[c]);
  } else {
    for (const auto& d : deltas) out.push_back(d[c - kBaseStreams]);
  }
  return out;
}

std::vector<std::optional<double>> LldMatrix::pitches() const {
  std::vector<std::optional<double>> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.pitch);
  return out;
}

LldMatrix extract_lld_matrix(std::span<const Frame> frames, int sample_rate,
                             const LldOptions& options) {
  if (frames.empty()) throw Error("extract_lld_matrix: no frames");
  LldMatrix m;
  m.frames.reserve(frames.size());
  MfccComputer mfcc_computer(frames.front().samples.size(), sample_rate);
  for (const auto& frame : frames) {
    const auto x = frame.view();
    LldFrameVector v;
    v.zcr = zcr(x);
    v.rms = rms_energy(x);
    const PitchEstimate p = estimate_pitch(x, sample_rate, options.pitch);
    v.pitch = p.hz;
    v.hnr = p.voiced() ? hnr(x, p.lag) : 0.0;
    v.mfcc = mfcc_computer.compute(x);
    m.frames.push_back(v);
  }

  m.deltas.assign(frames.size(), {});
  std::vector<double> stream(frames.size());
  for (std::size_t s = 0; s < kBaseStreams; ++s) {
    for (std::size_t t = 0; t < frames.size(); ++t) stream[t] = m.frames[t].streams()[s];
    const auto d = delta(stream);
    for (std::size_t t = 0; t < frames.size(); ++t) m.deltas[t][s] = d[t];
  }
  return m;
}

}  // namespace segser
