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
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segser/audio_io.hpp"
#include "segser/lld.hpp"
#include "segser/segmentation.hpp"

namespace segser {

/// Pitch range [a, b] in Hz split into (b - a) / h bins of width h.
struct HistogramParams {
  double a = 50.0;
  double b = 500.0;
  double h = 50.0;

  /// Throws unless b > a, h > 0 and (b - a) is an integer multiple of h.
  void validate() const;
  std::size_t bin_count() const;
  bool operator==(const HistogramParams&) const = default;
};

struct PitchHistogram {
  HistogramParams params;
  std::vector<double> heights;
};

/// Normalised occupancy of voiced pitch values over the bins
/// [a + ih, a + (i+1)h), with the last bin closed at b. Unvoiced values and
/// values outside [a, b] are ignored entirely. With nothing counted every
/// height is 0.
PitchHistogram pitch_histogram(std::span<const std::optional<double>> pitches,
                               const HistogramParams& params = {});

inline constexpr std::size_t kFunctionalCount = 12;
inline constexpr std::size_t kFunctionalBlock = kContours * kFunctionalCount;  // 384

/// Twelve contour statistics. Moments are population moments; kurtosis is
/// not excess-corrected. Skewness and kurtosis are 0 for a constant contour.
/// Relative positions and the regression abscissa are index / (M - 1).
struct FunctionalVector {
  double mean = 0.0;
  double std = 0.0;
  double kurtosis = 0.0;
  double skewness = 0.0;
  double min = 0.0;
  double max = 0.0;
  double rel_min_pos = 0.0;
  double rel_max_pos = 0.0;
  double range = 0.0;
  double lr_offset = 0.0;
  double lr_slope = 0.0;
  double lr_mse = 0.0;

  std::array<double, kFunctionalCount> values() const;
  static std::string_view name(std::size_t i);
};

FunctionalVector functionals(std::span<const double> contour);

/// Everything that influences feature extraction. Two configs with the same
/// `hash()` produce identical feature vectors.
struct ExtractionConfig {
  SegmentationScheme scheme = SegmentationScheme::gti();
  bool include_hist = false;
  HistogramParams hist;
  /// Histogram segment count used when the functional scheme is GTI; the
  /// histograms then come from an RTI split while functionals stay global.
  int hist_segments = 3;
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  LldOptions lld;

  void validate() const;
  /// Stable textual form of all extraction-relevant fields.
  std::string canonical() const;
  /// 64-bit FNV-1a of canonical().
  std::uint64_t hash() const;
  std::string hash_hex() const;

  std::size_t functional_segments() const { return scheme.segment_count(); }
  std::size_t histogram_segments() const;
};

struct FeatureCoordinate {
  enum class Kind { Functional, Histogram };

  Kind kind = Kind::Functional;
  /// Segment the value was computed on (0 for the global block).
  std::size_t segment = 0;
  /// Contour index for functionals, bin index for histograms.
  std::size_t item = 0;
  /// Functional index; unused for histograms.
  std::size_t functional = 0;
  bool global = false;

  bool operator==(const FeatureCoordinate&) const = default;
};

struct FeatureLayout {
  std::vector<FeatureCoordinate> coords;
  std::vector<std::string> names;

  std::size_t size() const { return coords.size(); }
};

/// Segments in temporal order; within a segment the 384 functionals come
/// before the histogram. Under GTI with histograms the global block comes
/// first, then one histogram per histogram segment.
FeatureLayout build_layout(const ExtractionConfig& config);

/// n_seg * 384 + histogram segments * bins.
std::size_t feature_dimension(const ExtractionConfig& config);

struct UtteranceFeatureVector {
  std::vector<double> values;
  std::shared_ptr<const FeatureLayout> layout;
  std::string source_id;
  std::string label;
};

/// The 384 functionals of one region's LLD matrix, in layout order.
std::array<double, kFunctionalBlock> functional_block(const LldMatrix& lld);

UtteranceFeatureVector assemble(const AudioClip& clip, const ExtractionConfig& config);

/// Same as assemble but reuses a caller-provided shared layout.
UtteranceFeatureVector assemble(const AudioClip& clip, const ExtractionConfig& config,
                                std::shared_ptr<const FeatureLayout> layout);

}  // namespace segser
