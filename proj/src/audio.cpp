// Copyright 2026 The ipitch Authors.
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

#include "ipitch/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "ipitch/error.hpp"

namespace ipitch {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

void validate(const AudioBuffer& audio) {
  if (audio.samples.size() == 0) fail(ErrorKind::InvalidArgument, "audio buffer is empty");
  if (audio.sample_rate < 8000)
    fail(ErrorKind::InvalidArgument,
         "sample rate " + std::to_string(audio.sample_rate) + " Hz is below 8000 Hz");
  if (!audio.samples.allFinite())
    fail(ErrorKind::InvalidArgument, "audio buffer contains non-finite samples");
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::MissingInput, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const auto bad = [&](const std::string& why) {
    fail(ErrorKind::ParseFailure, path.string() + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    bad("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) bad("truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) bad("fmt chunk too small");
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == 0xFFFE && size >= 26) format = read_u16(bytes.data() + body + 24);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) bad("missing fmt chunk");
  if (data == nullptr) bad("missing data chunk");
  if (channels != 1) bad("only mono audio is supported (got " + std::to_string(channels) + " channels)");

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(rate);
  if (format == 1 && bits == 16) {
    const std::size_t n = data_size / 2;
    audio.samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(read_u16(data + 2 * i));
      audio.samples[static_cast<Eigen::Index>(i)] = v / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t n = data_size / 4;
    audio.samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t raw = read_u32(data + 4 * i);
      float f;
      std::memcpy(&f, &raw, sizeof f);
      audio.samples[static_cast<Eigen::Index>(i)] = f;
    }
  } else {
    bad("unsupported encoding (format " + std::to_string(format) + ", " +
        std::to_string(bits) + " bits)");
  }
  validate(audio);
  return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  const auto n = static_cast<std::uint32_t>(audio.samples.size());
  std::vector<unsigned char> out;
  out.reserve(44 + 2 * n);
  put_tag(out, "RIFF");
  put_u32(out, 36 + 2 * n);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, 2 * n);
  for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
    const double x = std::clamp(audio.samples[i], -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(x * 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::IoFailure, "cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) fail(ErrorKind::IoFailure, "short write to " + path.string());
}

}  // namespace ipitch
