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

#include "segser/segmentation.hpp"

#include <string>

#include "segser/error.hpp"

namespace segser {

std::vector<Segment> segment(const AudioClip& clip, const SegmentationScheme& scheme,
                             std::size_t min_segment_samples) {
  if (scheme.kind == SegmentationScheme::Kind::Rti && scheme.n < 1) {
    throw Error("segment: RTI requires n >= 1, got " + std::to_string(scheme.n));
  }
  const std::size_t n = scheme.segment_count();
  const std::size_t total = clip.size();

  std::vector<Segment> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = i * total / n;
    const std::size_t end = (i + 1) * total / n;
    out.push_back({i, begin, end - begin});
  }
  for (const auto& s : out) {
    if (s.length < min_segment_samples || s.length == 0) {
      throw Error("segment: utterance '" + clip.source_id + "' segment " +
                  std::to_string(s.index) + " of " + std::to_string(n) + " has " +
                  std::to_string(s.length) + " samples, needs at least " +
                  std::to_string(std::max<std::size_t>(min_segment_samples, 1)));
    }
  }
  return out;
}

}  // namespace segser
