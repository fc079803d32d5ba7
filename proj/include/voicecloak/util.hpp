// include/voicecloak/util.hpp

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
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace voicecloak {

enum class ErrorKind {
  kFormat,     // unreadable or unsupported file content
  kIo,         // OS-level read/write failure
  kParameter,  // caller passed an out-of-range parameter
  kDomain,     // math argument outside the function domain
  kContract,   // internal invariant violated by inputs
  kTraining,   // model training impossible on the given data
  kProtocol,   // trial protocol cannot be evaluated
  kSampling,   // rejection sampler exhausted its attempt budget
  kManifest,   // manifest contents inconsistent
  kDecode,     // persisted record failed to decode
  kConfig,     // run configuration invalid
  kEmbedding,  // no usable frames for an embedding
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

template <typename... Args>
std::string cat(Args&&... args) {
  std::ostringstream oss;
  (oss << ... << args);
  return oss.str();
}

template <typename... Args>
[[noreturn]] void raise(ErrorKind kind, Args&&... args) {
  throw Error(kind, cat(std::forward<Args>(args)...));
}

// ---------------------------------------------------------------------------
// Hashing and deterministic keyed randomness.
//
// All random draws in this library are counter-based: a 64-bit stream key is
// derived from the seeds and string identifiers that define the draw, and the
// n-th value of the stream is a pure function of (key, n). Results therefore
// do not depend on evaluation order or thread scheduling.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Hasher {
 public:
  Hasher& add_bytes(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ull;
    }
    return *this;
  }
  Hasher& add(std::string_view s) {
    add_bytes(s.data(), s.size());
    unsigned char sep = 0x1f;
    return add_bytes(&sep, 1);
  }
  Hasher& add(uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    return add_bytes(b, 8);
  }
  uint64_t value() const { return h_; }

 private:
  uint64_t h_ = 0xcbf29ce484222325ull;  // FNV-1a 64 offset basis
};

inline uint64_t fnv1a64(std::string_view s) { return Hasher().add(s).value(); }

// Deterministic stream of pseudo-random values addressed by (key, counter).
class KeyedRng {
 public:
  explicit KeyedRng(uint64_t key) : key_(key) {}

  uint64_t next_u64() {
    return splitmix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
  }
  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }
  // Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Lossless text encoding of binary64 values (C hexadecimal float form).
// ---------------------------------------------------------------------------

inline std::string encode_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

inline double decode_double(std::string_view token, bool* ok) {
  std::string s(token);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  *ok = (end != nullptr && *end == '\0' && end != s.c_str());
  return v;
}

// ---------------------------------------------------------------------------
// Small string helpers.
// ---------------------------------------------------------------------------

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string> split_char(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Identifiers used in manifests and records are single tokens.
inline bool is_valid_id(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Static-partition parallel loop. Work items write to disjoint slots, so the
// result is identical to the serial loop.
// ---------------------------------------------------------------------------

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = std::min<std::size_t>(n, hw ? hw : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first_error;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace voicecloak
