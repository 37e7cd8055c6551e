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

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "segser/audio_io.hpp"

namespace segser {

inline constexpr std::size_t kMfccCount = 12;
inline constexpr std::size_t kMelFilters = 26;
/// zcr, rms, pitch, hnr, mfcc 1..12
inline constexpr std::size_t kBaseStreams = 4 + kMfccCount;
/// base streams followed by their deltas
inline constexpr std::size_t kContours = 2 * kBaseStreams;

/// Short name of contour `c` in [0, kContours), e.g. "pitch" or "d_mfcc3".
std::string_view contour_name(std::size_t c);

/// Fraction of adjacent sample pairs whose sign differs. A zero sample takes
/// the sign of the last nonzero sample before it.
double zcr(std::span<const double> frame);

double rms_energy(std::span<const double> frame);

/// Autocorrelation normalised by 1 / (N - 1 - lag):
///   ACF(lag) = 1/(N-1-lag) * sum_{m=0}^{N-1-lag} x(m) x(m+lag)
/// The sum has N - lag terms while the divisor is one smaller. This is kept
/// as is; callers that need a bounded value must normalise themselves.
/// Requires lag <= N - 2.
double acf(std::span<const double> frame, std::size_t lag);

struct PitchOptions {
  double fmin = 50.0;
  double fmax = 500.0;
  /// Minimum peak correlation at the chosen lag for a voiced decision.
  double voicing_threshold = 0.45;
  /// Frames with RMS below this are unvoiced regardless of periodicity.
  double silence_floor = 1e-4;
  /// The shortest-lag correlation peak reaching this fraction of the best
  /// peak wins, so multiples of the true period do not take over.
  double octave_ratio = 0.9;
};

struct PitchEstimate {
  /// Empty when unvoiced.
  std::optional<double> hz;
  /// Integer lag of the selected peak; 0 for a silent frame.
  std::size_t lag = 0;
  /// Correlation at the selected lag, in [-1, 1].
  double strength = 0.0;

  bool voiced() const { return hz.has_value(); }
};

/// Autocorrelation pitch picker over lags [ceil(sr/fmax), floor(sr/fmin)].
/// Each lag is scored by its lag-product sum over the geometric mean of the
/// energies of the two overlapping windows (acf(lag)/acf(0) with the
/// window-energy terms made lag-exact). The selected peak is refined by
/// parabolic interpolation. Throws if floor(sr/fmin) > N - 2.
PitchEstimate estimate_pitch(std::span<const double> frame, int sample_rate,
                             const PitchOptions& options = {});

inline constexpr double kHnrClampDb = 100.0;

/// 10 log10(acf_t0 / (acf0 - acf_t0)), clamped to [-100, 100] dB. The
/// singular cases acf_t0 >= acf0 and acf_t0 <= 0 land on the clamps.
double hnr_from_acf(double acf0, double acf_t0);

/// HNR at the pitch-period lag `t0`, computed from `acf`.
double hnr(std::span<const double> frame, std::size_t t0);

/// MFCC 1..12: pre-emphasis 0.97, Hamming window, zero-padded power-of-two
/// FFT magnitude, 26 triangular mel filters over [0, sr/2], natural log with
/// floor 1e-10, orthonormal DCT-II, coefficient 0 dropped.
///
/// Precomputes window, filterbank and DCT for one (frame length, rate). Not
/// safe to share between threads; construct one per worker.
class MfccComputer {
 public:
  MfccComputer(std::size_t frame_length, int sample_rate);

  std::array<double, kMfccCount> compute(std::span<const double> frame);

  std::size_t frame_length() const { return frame_length_; }
  std::size_t fft_length() const { return fft_length_; }

  /// Filter `m` weight at FFT bin k, for k in [0, fft_length/2].
  const std::vector<double>& filter(std::size_t m) const { return filters_[m]; }

 private:
  std::size_t frame_length_;
  std::size_t fft_length_;
  int sample_rate_;
  std::vector<double> window_;
  std::vector<std::vector<double>> filters_;
  std::vector<std::vector<double>> dct_;  // rows 1..12 of the orthonormal DCT-II
  std::vector<double> buffer_;
  std::vector<std::complex<double>> spectrum_;
};

/// One-shot convenience wrapper around MfccComputer.
std::array<double, kMfccCount> mfcc(std::span<const double> frame, int sample_rate);

/// Regression delta with window 2 and edge replication:
///   d_t = sum_{n=1,2} n (x_{t+n} - x_{t-n}) / 10
std::vector<double> delta(std::span<const double> contour);

struct LldFrameVector {
  double zcr = 0.0;
  double rms = 0.0;
  std::optional<double> pitch;
  double hnr = 0.0;
  std::array<double, kMfccCount> mfcc{};

  /// Base streams in contour order; an unvoiced pitch reads as 0 Hz.
  std::array<double, kBaseStreams> streams() const;
};

struct LldMatrix {
  std::vector<LldFrameVector> frames;
  std::vector<std::array<double, kBaseStreams>> deltas;

  std::size_t size() const { return frames.size(); }
  /// Contour `c` of kContours across all frames.
  std::vector<double> contour(std::size_t c) const;
  std::vector<std::optional<double>> pitches() const;
};

struct LldOptions {
  PitchOptions pitch;
};

LldMatrix extract_lld_matrix(std::span<const Frame> frames, int sample_rate,
                             const LldOptions& options = {});

}  // namespace segser
