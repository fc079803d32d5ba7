// include/voicecloak/wav.hpp

// Copyright 2026  Voicecloak contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "voicecloak/util.hpp"

namespace voicecloak {

// One identified mono audio clip. Samples are normalized to [-1, 1].
struct Utterance {
  std::string utterance_id;
  std::string speaker_id;
  int sample_rate = 0;
  std::vector<double> samples;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  void check() const {
    if (sample_rate <= 0) raise(ErrorKind::kContract, "utterance sample rate must be positive");
    for (double s : samples)
      if (!(s >= -1.0 && s <= 1.0))
        raise(ErrorKind::kContract, "utterance sample out of [-1,1]: ", s);
  }
};

namespace wav_detail {

inline uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
inline uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0]) | (static_cast<uint16_t>(p[1]) << 8);
}
inline void put_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::string& s, uint16_t v) {
  for (int i = 0; i < 2; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline const char* format_name(uint16_t tag) {
  switch (tag) {
    case 1: return "PCM";
    case 3: return "IEEE float";
    case 6: return "A-law";
    case 7: return "mu-law";
    case 0xfffe: return "extensible";
    default: return "unknown/compressed";
  }
}

}  // namespace wav_detail

// Reads a RIFF/WAVE file. Only linear 16-bit PCM is accepted; multichannel
// input is down-mixed by averaging channels. Samples are scaled by 1/32768.
inline Utterance read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "cannot open wav file: ", path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) raise(ErrorKind::kIo, "read failure on wav file: ", path.string());
  using namespace wav_detail;

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    raise(ErrorKind::kFormat, "not a RIFF/WAVE file: ", path.string());

  bool have_fmt = false;
  uint16_t format_tag = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    uint32_t chunk_len = read_u32(hdr + 4);
    std::size_t body = pos + 8;
    if (body + chunk_len > bytes.size())
      raise(ErrorKind::kFormat, "truncated chunk in wav file: ", path.string());
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_len < 16) raise(ErrorKind::kFormat, "short fmt chunk in ", path.string());
      const unsigned char* f = bytes.data() + body;
      format_tag = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr)
    raise(ErrorKind::kFormat, "missing fmt/data chunk in wav file: ", path.string());
  if (format_tag != 1 || bits != 16)
    raise(ErrorKind::kFormat, "unsupported wav encoding in ", path.string(), ": ",
          wav_detail::format_name(format_tag), " ", bits, "-bit (need 16-bit PCM)");
  if (channels == 0) raise(ErrorKind::kFormat, "zero channels in wav file: ", path.string());
  if (rate < 8000 || rate > 48000)
    raise(ErrorKind::kFormat, "sample rate ", rate, " outside 8-48 kHz in ", path.string());

  const std::size_t frame_bytes = 2u * channels;
  const std::size_t n = data_len / frame_bytes;
  Utterance u;
  u.sample_rate = static_cast<int>(rate);
  u.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + i * frame_bytes + 2 * c;
      int16_t v = static_cast<int16_t>(wav_detail::read_u16(p));
      acc += static_cast<double>(v);
    }
    u.samples[i] = acc / channels / 32768.0;
  }
  return u;
}

// Writes mono 16-bit PCM. Quantization: round(s * 32768) clamped to the int16
// range, so a round trip through read_wav stays within 1/32768 per sample.
inline void write_wav(const Utterance& u, const std::filesystem::path& path) {
  u.check();
  using namespace wav_detail;
  const uint32_t n = static_cast<uint32_t>(u.samples.size());
  const uint32_t data_len = 2 * n;

  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  put_u32(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<uint32_t>(u.sample_rate));
  put_u32(out, static_cast<uint32_t>(u.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.append("data");
  put_u32(out, data_len);
  for (double s : u.samples) {
    long q = std::lround(s * 32768.0);
    q = std::clamp<long>(q, -32768, 32767);
    put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrorKind::kIo, "cannot open for writing: ", path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.flush();
  if (!f) raise(ErrorKind::kIo, "write failure: ", path.string());
}

}  // namespace voicecloak
