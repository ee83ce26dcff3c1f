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

#include "cdx/wav_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "cdx/error.hpp"

namespace cdx {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
  }
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct ParsedHeader {
  AudioFileMeta meta;
  std::size_t data_offset = 0;
  std::size_t data_bytes = 0;
};

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

ParsedHeader parse_header(const std::vector<unsigned char>& bytes,
                          const std::filesystem::path& path) {
  const std::string where = " in '" + path.string() + "'";
  if (bytes.size() < 12) throw IoError("truncated RIFF header" + where);
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file" + where);
  }

  ParsedHeader header;
  header.meta.path = path;
  bool have_fmt = false;
  bool have_data = false;
  std::uint16_t format_tag = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size() && !have_data) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) {
        throw IoError("truncated fmt chunk" + where);
      }
      const unsigned char* f = bytes.data() + body;
      format_tag = read_u16(f);
      header.meta.channels = read_u16(f + 2);
      header.meta.sample_rate = static_cast<int>(read_u32(f + 4));
      header.meta.bit_depth = read_u16(f + 14);
      if (format_tag == kFormatExtensible) {
        if (size < 40) throw FormatError("short WAVE_FORMAT_EXTENSIBLE" + where);
        format_tag = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk" + where);
      header.data_offset = body;
      header.data_bytes = size;
      if (body + size > bytes.size()) {
        throw IoError("truncated data chunk" + where + " (header declares " +
                      std::to_string(size) + " bytes, " +
                      std::to_string(bytes.size() - body) + " present)");
      }
      have_data = true;
    }
    // Chunks are word aligned.
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw IoError("missing fmt chunk" + where);
  if (!have_data) throw IoError("missing data chunk" + where);

  auto& m = header.meta;
  if (m.channels != 1 && m.channels != 2) {
    throw FormatError("unsupported channel count " +
                      std::to_string(m.channels) + where);
  }
  if (m.sample_rate <= 0) throw FormatError("invalid sample rate" + where);
  if (format_tag == kFormatPcm && (m.bit_depth == 16 || m.bit_depth == 24)) {
    m.is_float = false;
  } else if (format_tag == kFormatFloat && m.bit_depth == 32) {
    m.is_float = true;
  } else {
    throw FormatError("unsupported codec (format tag " +
                      std::to_string(format_tag) + ", " +
                      std::to_string(m.bit_depth) + " bits)" + where);
  }
  const std::size_t frame_bytes =
      static_cast<std::size_t>(m.channels) * (m.bit_depth / 8);
  if (header.data_bytes % frame_bytes != 0) {
    throw IoError("data chunk is not a whole number of frames" + where);
  }
  m.duration_samples = header.data_bytes / frame_bytes;
  return header;
}

}  // namespace

int bits_per_sample(SampleFormat format) {
  switch (format) {
    case SampleFormat::kPcm16:
      return 16;
    case SampleFormat::kPcm24:
      return 24;
    case SampleFormat::kFloat32:
      return 32;
  }
  return 0;
}

SampleFormat sample_format_from_string(std::string_view name) {
  if (name == "16" || name == "pcm16") return SampleFormat::kPcm16;
  if (name == "24" || name == "pcm24") return SampleFormat::kPcm24;
  if (name == "float32" || name == "float" || name == "32") {
    return SampleFormat::kFloat32;
  }
  throw std::invalid_argument("unsupported bit depth '" + std::string(name) +
                              "' (expected 16, 24 or float32)");
}

AudioFileMeta read_wav_meta(const std::filesystem::path& path) {
  return parse_header(read_file(path), path).meta;
}

Waveform load_wav(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const ParsedHeader header = parse_header(bytes, path);
  const auto& m = header.meta;
  const std::size_t n = m.duration_samples;
  const std::size_t width = m.bit_depth / 8;
  const unsigned char* data = bytes.data() + header.data_offset;

  std::array<std::vector<double>, 2> ch;
  ch[0].resize(n);
  ch[1].resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < m.channels; ++c) {
      const unsigned char* p = data + (i * m.channels + c) * width;
      double v = 0.0;
      if (m.is_float) {
        v = static_cast<double>(std::bit_cast<float>(read_u32(p)));
        if (!std::isfinite(v)) {
          throw FormatError("non-finite sample in '" + path.string() + "'");
        }
      } else if (m.bit_depth == 16) {
        v = static_cast<std::int16_t>(read_u16(p)) / 32768.0;
      } else {
        std::int32_t s = static_cast<std::int32_t>(
            (static_cast<std::uint32_t>(p[0]) << 8) |
            (static_cast<std::uint32_t>(p[1]) << 16) |
            (static_cast<std::uint32_t>(p[2]) << 24));
        v = (s >> 8) / 8388608.0;
      }
      ch[c][i] = v;
    }
  }
  if (m.channels == 1) ch[1] = ch[0];
  return Waveform(std::move(ch[0]), std::move(ch[1]), m.sample_rate);
}

WavWriteReport save_wav(const Waveform& waveform,
                        const std::filesystem::path& path,
                        SampleFormat format) {
  const int bits = bits_per_sample(format);
  const std::size_t width = bits / 8;
  const std::size_t n = waveform.frames();
  const std::size_t data_bytes = n * 2 * width;
  if (data_bytes > std::numeric_limits<std::uint32_t>::max() - 64) {
    throw IoError("waveform too long for a RIFF file: '" + path.string() + "'");
  }

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, static_cast<std::uint32_t>(36 + data_bytes));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format == SampleFormat::kFloat32 ? kFormatFloat : kFormatPcm);
  put_u16(out, 2);
  put_u32(out, static_cast<std::uint32_t>(waveform.sample_rate()));
  put_u32(out, static_cast<std::uint32_t>(waveform.sample_rate() * 2 * width));
  put_u16(out, static_cast<std::uint16_t>(2 * width));
  put_u16(out, static_cast<std::uint16_t>(bits));
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_bytes));

  WavWriteReport report;
  const double full_scale = std::ldexp(1.0, bits - 1);
  const double max_code = full_scale - 1.0;
  auto l = waveform.left();
  auto r = waveform.right();
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : {l[i], r[i]}) {
      if (format == SampleFormat::kFloat32) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        continue;
      }
      if (std::abs(v) > 1.0) ++report.clipped_samples;
      const double code = std::clamp(std::round(v * full_scale), -full_scale,
                                     max_code);
      const auto q = static_cast<std::int32_t>(code);
      const auto u = static_cast<std::uint32_t>(q);
      out.push_back(static_cast<unsigned char>(u & 0xFF));
      out.push_back(static_cast<unsigned char>((u >> 8) & 0xFF));
      if (bits == 24) out.push_back(static_cast<unsigned char>((u >> 16) & 0xFF));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for '" + path.string() + "'");
  return report;
}

}  // namespace cdx
