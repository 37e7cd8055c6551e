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

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "segser/error.hpp"
#include "segser/lld.hpp"

namespace segser {
namespace {

constexpr double kPreEmphasis = 0.97;
constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

MfccComputer::MfccComputer(std::size_t frame_length, int sample_rate)
    : frame_length_(frame_length),
      fft_length_(next_pow2(std::max<std::size_t>(frame_length, 2))),
      sample_rate_(sample_rate) {
  if (frame_length == 0) throw Error("mfcc: empty frame");
  if (sample_rate <= 0) throw Error("mfcc: sample rate must be positive");

  window_.resize(frame_length_);
  if (frame_length_ == 1) {
    window_[0] = 1.0;
  } else {
    for (std::size_t i = 0; i < frame_length_; ++i) {
      window_[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(frame_length_ - 1));
    }
  }

  const std::size_t bins = fft_length_ / 2 + 1;
  const double mel_hi = hz_to_mel(sample_rate_ / 2.0);
  std::vector<double> edges(kMelFilters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_hi * static_cast<double>(i) / static_cast<double>(kMelFilters + 1));
  }
  filters_.assign(kMelFilters, std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < kMelFilters; ++m) {
    const double lo = edges[m], centre = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_ / static_cast<double>(fft_length_);
      const double w = std::min((f - lo) / (centre - lo), (hi - f) / (hi - centre));
      filters_[m][k] = std::max(0.0, w);
    }
  }

  dct_.assign(kMfccCount, std::vector<double>(kMelFilters));
  const double scale = std::sqrt(2.0 / static_cast<double>(kMelFilters));
  for (std::size_t j = 1; j <= kMfccCount; ++j) {
    for (std::size_t m = 0; m < kMelFilters; ++m) {
      dct_[j - 1][m] = scale * std::cos(std::numbers::pi * static_cast<double>(j) *
                                        (static_cast<double>(m) + 0.5) /
                                        static_cast<double>(kMelFilters));
    }
  }
  buffer_.resize(fft_length_);
}

std::array<double, kMfccCount> MfccComputer::compute(std::span<const double> frame) {
  if (frame.empty()) throw Error("mfcc: empty frame");
  if (frame.size() != frame_length_) {
    throw Error("mfcc: frame length " + std::to_string(frame.size()) +
                " does not match computer length " + std::to_string(frame_length_));
  }
  std::fill(buffer_.begin(), buffer_.end(), 0.0);
  buffer_[0] = frame[0] * window_[0];
  for (std::size_t i = 1; i < frame_length_; ++i) {
    buffer_[i] = (frame[i] - kPreEmphasis * frame[i - 1]) * window_[i];
  }

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  fft.fwd(spectrum_, buffer_);

  const std::size_t bins = fft_length_ / 2 + 1;
  std::array<double, kMelFilters> log_energy{};
  for (std::size_t m = 0; m < kMelFilters; ++m) {
    double e = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      if (filters_[m][k] != 0.0) e += filters_[m][k] * std::abs(spectrum_[k]);
    }
    log_energy[m] = std::log(std::max(e, kLogFloor));
  }

  std::array<double, kMfccCount> out{};
  for (std::size_t j = 0; j < kMfccCount; ++j) {
    double c = 0.0;
    for (std::size_t m = 0; m < kMelFilters; ++m) c += dct_[j][m] * log_energy[m];
    out[j] = c;
  }
  return out;
}

std::array<double, kMfccCount> mfcc(std::span<const double> frame, int sample_rate) {
  if (frame.empty()) throw Error("mfcc: empty frame");
  MfccComputer computer(frame.size(), sample_rate);
  return computer.compute(frame);
}

}  // namespace segser
