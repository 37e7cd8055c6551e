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

#include "segser/audio_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "segser/error.hpp"

namespace segser {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk parse_format(const std::uint8_t* p, std::uint32_t size,
                         const std::string& where) {
  if (size < 16) throw Error(where + ": fmt chunk too small");
  FormatChunk fmt;
  fmt.format = read_u16(p);
  fmt.channels = read_u16(p + 2);
  fmt.sample_rate = read_u32(p + 4);
  fmt.block_align = read_u16(p + 12);
  fmt.bits = read_u16(p + 14);
  if (fmt.format == kFormatExtensible) {
    // cbSize(2) validBits(2) channelMask(4) then the sub-format GUID, whose
    // first two bytes carry the actual format tag.
    if (size < 40) throw Error(where + ": truncated WAVE_FORMAT_EXTENSIBLE header");
    fmt.format = read_u16(p + 24);
  }
  return fmt;
}

double decode_sample(const std::uint8_t* p, const FormatChunk& fmt) {
  if (fmt.format == kFormatFloat) {
    float f;
    std::memcpy(&f, p, sizeof f);
    if (!std::isfinite(f)) throw Error("non-finite float sample");
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (fmt.bits) {
    case 8:
      return (static_cast<double>(p[0]) - 128.0) / 128.0;
    case 16:
      return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(
          (static_cast<std::uint32_t>(p[0]) << 8) |
          (static_cast<std::uint32_t>(p[1]) << 16) |
          (static_cast<std::uint32_t>(p[2]) << 24));
      return (v >> 8) / 8388608.0;
    }
    case 32:
      return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
    default:
      break;
  }
  throw Error("unsupported bit depth");
}

}  // namespace

void validate_clip(const AudioClip& clip) {
  if (clip.sample_rate <= 0) throw Error("clip '" + clip.source_id + "': sample rate must be positive");
  if (clip.samples.empty()) throw Error("clip '" + clip.source_id + "': no samples");
  for (double s : clip.samples) {
    if (!(s >= -1.0 && s <= 1.0)) {
      throw Error("clip '" + clip.source_id + "': sample outside [-1, 1]");
    }
  }
}

AudioClip load_wav(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(where + ": cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(where + ": not a RIFF/WAVE file");
  }

  std::optional<FormatChunk> fmt;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size > available) throw Error(where + ": truncated fmt chunk");
      fmt = parse_format(bytes.data() + body, size, where);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      // Tolerate writers that leave a too-large size in a streamed header.
      data_size = static_cast<std::uint32_t>(std::min<std::size_t>(size, available));
      break;
    }
    pos = body + size + (size & 1u);
  }

  if (!fmt) throw Error(where + ": missing fmt chunk");
  if (data == nullptr) throw Error(where + ": missing data chunk");
  if (fmt->channels != 1) {
    throw Error(where + ": multi-channel unsupported (" +
                std::to_string(fmt->channels) + " channels)");
  }
  if (fmt->sample_rate == 0) throw Error(where + ": zero sample rate");
  const bool int_ok = fmt->format == kFormatPcm &&
                      (fmt->bits == 8 || fmt->bits == 16 || fmt->bits == 24 || fmt->bits == 32);
  const bool float_ok = fmt->format == kFormatFloat && fmt->bits == 32;
  if (!int_ok && !float_ok) {
    throw Error(where + ": unsupported encoding (format " + std::to_string(fmt->format) +
                ", " + std::to_string(fmt->bits) + " bits)");
  }
  const std::size_t width = fmt->bits / 8;
  if (fmt->block_align != width) throw Error(where + ": inconsistent block alignment");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt->sample_rate);
  clip.source_id = path.stem().string();
  const std::size_t count = data_size / width;
  clip.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    clip.samples.push_back(decode_sample(data + i * width, *fmt));
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               int bits_per_sample) {
  if (bits_per_sample != 8 && bits_per_sample != 16 && bits_per_sample != 24 &&
      bits_per_sample != 32) {
    throw Error("write_wav: unsupported bit depth " + std::to_string(bits_per_sample));
  }
  if (clip.sample_rate <= 0) throw Error("write_wav: sample rate must be positive");
  const std::uint32_t width = static_cast<std::uint32_t>(bits_per_sample / 8);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size()) * width;

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes + 1);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes + (data_bytes & 1u));
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * width);
  put_u16(out, static_cast<std::uint16_t>(width));
  put_u16(out, static_cast<std::uint16_t>(bits_per_sample));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);

  const double scale = std::ldexp(1.0, bits_per_sample - 1);
  const double lo = -scale;
  const double hi = scale - 1.0;
  for (double s : clip.samples) {
    const auto v = static_cast<std::int64_t>(std::clamp(std::round(s * scale), lo, hi));
    if (bits_per_sample == 8) {
      out.push_back(static_cast<std::uint8_t>(v + 128));
    } else {
      const auto u = static_cast<std::uint32_t>(static_cast<std::int32_t>(v));
      for (std::uint32_t b = 0; b < width; ++b) out.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
    }
  }
  if (data_bytes & 1u) out.push_back(0);

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(path.string() + ": cannot open for writing");
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) throw Error(path.string() + ": write failed");
}

std::size_t duration_to_samples(double ms, int sample_rate) {
  return static_cast<std::size_t>(std::llround(ms * sample_rate / 1000.0));
}

std::size_t frame_count(std::size_t region_len, std::size_t frame_len,
                        std::size_t hop) {
  if (frame_len == 0 || hop == 0 || region_len < frame_len) return 0;
  return (region_len - frame_len) / hop + 1;
}

std::vector<Frame> frame_region(const AudioClip& clip, std::size_t start,
                                std::size_t len, double frame_ms, double hop_ms) {
  if (!(hop_ms > 0.0) || !(frame_ms > hop_ms)) {
    throw Error("frame_region: require frame_ms > hop_ms > 0");
  }
  if (clip.sample_rate <= 0) throw Error("frame_region: sample rate must be positive");
  if (start > clip.size() || len > clip.size() - start) {
    throw Error("frame_region: region [" + std::to_string(start) + ", " +
                std::to_string(start + len) + ") out of bounds for clip of " +
                std::to_string(clip.size()) + " samples");
  }
  const std::size_t n = duration_to_samples(frame_ms, clip.sample_rate);
  const std::size_t hop = duration_to_samples(hop_ms, clip.sample_rate);
  if (n == 0 || hop == 0) throw Error("frame_region: frame or hop rounds to zero samples");

  const std::size_t count = frame_count(len, n, hop);
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Frame f;
    f.index = i;
    f.start_sample = i * hop;
    const auto first = clip.samples.begin() + static_cast<std::ptrdiff_t>(start + f.start_sample);
    f.samples.assign(first, first + static_cast<std::ptrdiff_t>(n));
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace segser
