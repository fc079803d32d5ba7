// tests/test_support.hpp

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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "voicecloak/util.hpp"
#include "voicecloak/wav.hpp"

namespace vc_test {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() /
            ("voicecloak_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline voicecloak::Utterance make_tone(double freq_hz, double amplitude, double seconds,
                                       int sample_rate, const std::string& id = "tone") {
  voicecloak::Utterance u;
  u.utterance_id = id;
  u.speaker_id = id;
  u.sample_rate = sample_rate;
  const std::size_t n = static_cast<std::size_t>(seconds * sample_rate);
  u.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    u.samples[i] = amplitude * std::sin(2.0 * M_PI * freq_hz * i / sample_rate);
  return u;
}

inline voicecloak::Utterance make_noise(double amplitude, double seconds, int sample_rate,
                                        uint64_t seed, const std::string& id = "noise") {
  voicecloak::Utterance u;
  u.utterance_id = id;
  u.speaker_id = id;
  u.sample_rate = sample_rate;
  const std::size_t n = static_cast<std::size_t>(seconds * sample_rate);
  u.samples.resize(n);
  voicecloak::KeyedRng rng(seed);
  for (auto& s : u.samples) s = amplitude * (2.0 * rng.uniform01() - 1.0);
  return u;
}

// Mean per-segment SNR in dB over non-overlapping segments, skipping
// edge_skip samples at each end and segments with negligible reference
// energy.
inline double segmental_snr_db(const std::vector<double>& ref, const std::vector<double>& test,
                               std::size_t edge_skip, std::size_t segment = 256) {
  const std::size_t n = std::min(ref.size(), test.size());
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t start = edge_skip; start + segment <= n - std::min(n, edge_skip);
       start += segment) {
    double sig = 0.0, err = 0.0;
    for (std::size_t i = start; i < start + segment; ++i) {
      sig += ref[i] * ref[i];
      const double d = ref[i] - test[i];
      err += d * d;
    }
    if (sig < 1e-12) continue;
    acc += 10.0 * std::log10(sig / (err + 1e-300));
    ++count;
  }
  return count > 0 ? acc / static_cast<double>(count) : 0.0;
}

inline std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace vc_test
