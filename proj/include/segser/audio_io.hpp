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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace segser {

/// A mono utterance. Samples are amplitudes in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws segser::Error unless the clip is admissible to the pipeline
/// (non-empty, positive rate, all samples finite and within [-1, 1]).
void validate_clip(const AudioClip& clip);

/// One analysis window cut out of a region of a clip.
struct Frame {
  std::vector<double> samples;
  std::size_t index = 0;
  /// Offset relative to the start of the framed region.
  std::size_t start_sample = 0;

  std::span<const double> view() const { return samples; }
};

/// Reads a RIFF/WAVE file. Accepted encodings: PCM integer 8/16/24/32 bit and
/// IEEE float 32 bit (including WAVE_FORMAT_EXTENSIBLE wrappers), mono only.
/// Integer samples are scaled by 1 / 2^(bits-1); 8-bit data is unsigned and
/// re-centred first. Float samples are clamped into [-1, 1].
/// The clip's source_id is the file stem.
AudioClip load_wav(const std::filesystem::path& path);

/// Writes a mono PCM WAV with the given integer bit depth (8, 16, 24 or 32).
/// Amplitudes are scaled by 2^(bits-1), rounded and saturated.
void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               int bits_per_sample = 16);

/// round(ms * sample_rate / 1000)
std::size_t duration_to_samples(double ms, int sample_rate);

/// Number of fully contained frames of length `frame_len` at `hop` in a region
/// of `region_len` samples.
std::size_t frame_count(std::size_t region_len, std::size_t frame_len,
                        std::size_t hop);

/// Slices clip[start, start + len) into frames of round(frame_ms * sr / 1000)
/// samples every round(hop_ms * sr / 1000) samples. A trailing partial frame
/// is dropped.
std::vector<Frame> frame_region(const AudioClip& clip, std::size_t start,
                                std::size_t len, double frame_ms = 25.0,
                                double hop_ms = 10.0);

}  // namespace segser
