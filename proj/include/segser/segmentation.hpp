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

#include <cstddef>
#include <vector>

#include "segser/audio_io.hpp"

namespace segser {

/// Global (whole utterance) or relative (n equal-duration parts) intervals.
struct SegmentationScheme {
  enum class Kind { Gti, Rti };

  Kind kind = Kind::Gti;
  int n = 1;

  static SegmentationScheme gti() { return {Kind::Gti, 1}; }
  static SegmentationScheme rti(int n) { return {Kind::Rti, n}; }

  std::size_t segment_count() const { return kind == Kind::Gti ? 1 : static_cast<std::size_t>(n); }
  bool operator==(const SegmentationScheme&) const = default;
};

struct Segment {
  std::size_t index = 0;
  std::size_t start_sample = 0;
  std::size_t length = 0;

  std::size_t end_sample() const { return start_sample + length; }
};

/// Boundaries at floor(i * total / n), i = 0..n; the last segment absorbs
/// the remainder. Throws if n < 1 or if any segment is shorter than
/// `min_segment_samples` (normally one analysis frame).
std::vector<Segment> segment(const AudioClip& clip, const SegmentationScheme& scheme,
                             std::size_t min_segment_samples = 1);

}  // namespace segser
