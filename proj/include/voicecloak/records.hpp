// include/voicecloak/records.hpp

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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "voicecloak/util.hpp"

namespace voicecloak {

// ---------------------------------------------------------------------------
// Versioned line-oriented record format shared by all persisted values
// (speaker models, assignment tables, evaluation reports).
//
//   voicecloak-record v1 <type>
//   <key> <token> [<token> ...]
//   ...
//   end
//
// Keys and tokens are whitespace-free. Floating-point tokens use the C
// hexadecimal float encoding, which round-trips binary64 exactly. A file
// whose header or trailer does not match decodes to an error, never to a
// partial value.
// ---------------------------------------------------------------------------

inline constexpr const char* kRecordMagic = "voicecloak-record";
inline constexpr const char* kRecordVersion = "v1";

class TextRecord {
 public:
  explicit TextRecord(std::string type) : type_(std::move(type)) {}

  const std::string& type() const { return type_; }

  TextRecord& add(const std::string& key, std::vector<std::string> tokens) {
    fields_.emplace_back(key, std::move(tokens));
    return *this;
  }
  TextRecord& add_str(const std::string& key, const std::string& value) {
    return add(key, {value});
  }
  TextRecord& add_u64(const std::string& key, uint64_t value) {
    return add(key, {std::to_string(value)});
  }
  TextRecord& add_double(const std::string& key, double value) {
    return add(key, {encode_double(value)});
  }
  TextRecord& add_doubles(const std::string& key, const std::vector<double>& values) {
    std::vector<std::string> tokens;
    tokens.reserve(values.size());
    for (double v : values) tokens.push_back(encode_double(v));
    return add(key, std::move(tokens));
  }

  std::string serialize() const {
    std::ostringstream out;
    out << kRecordMagic << ' ' << kRecordVersion << ' ' << type_ << '\n';
    for (const auto& [key, tokens] : fields_) {
      out << key;
      for (const auto& t : tokens) out << ' ' << t;
      out << '\n';
    }
    out << "end\n";
    return out.str();
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) raise(ErrorKind::kIo, "cannot write record: ", path.string());
    std::string s = serialize();
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    out.flush();
    if (!out) raise(ErrorKind::kIo, "write failure: ", path.string());
  }

  static TextRecord parse(const std::string& text, const std::string& expected_type) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
      raise(ErrorKind::kDecode, "empty record");
    auto head = split_ws(line);
    if (head.size() != 3 || head[0] != kRecordMagic)
      raise(ErrorKind::kDecode, "bad record header: '", line, "'");
    if (head[1] != kRecordVersion)
      raise(ErrorKind::kDecode, "unsupported record version '", head[1], "' (expected ",
            kRecordVersion, ")");
    if (head[2] != expected_type)
      raise(ErrorKind::kDecode, "record type '", head[2], "' where '", expected_type,
            "' was expected");
    TextRecord rec(head[2]);
    bool terminated = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line == "end") {
        terminated = true;
        break;
      }
      auto tokens = split_ws(line);
      if (tokens.empty()) continue;
      std::string key = tokens.front();
      tokens.erase(tokens.begin());
      rec.fields_.emplace_back(std::move(key), std::move(tokens));
    }
    if (!terminated) raise(ErrorKind::kDecode, "record missing 'end' trailer (truncated?)");
    return rec;
  }

  static TextRecord load(const std::filesystem::path& path, const std::string& expected_type) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::kIo, "cannot open record: ", path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      return parse(buf.str(), expected_type);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kDecode)
        raise(ErrorKind::kDecode, path.string(), ": ", e.what());
      throw;
    }
  }

  // Field access. Keys may repeat; get_all returns them in file order.
  std::vector<const std::vector<std::string>*> get_all(const std::string& key) const {
    std::vector<const std::vector<std::string>*> out;
    for (const auto& [k, tokens] : fields_)
      if (k == key) out.push_back(&tokens);
    return out;
  }

  const std::vector<std::string>& get(const std::string& key) const {
    for (const auto& [k, tokens] : fields_)
      if (k == key) return tokens;
    raise(ErrorKind::kDecode, "record missing field '", key, "'");
  }

  std::string get_str(const std::string& key) const {
    const auto& tokens = get(key);
    if (tokens.size() != 1)
      raise(ErrorKind::kDecode, "field '", key, "' should hold one token");
    return tokens[0];
  }

  uint64_t get_u64(const std::string& key) const {
    const std::string s = get_str(key);
    char* end = nullptr;
    uint64_t v = std::strtoull(s.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || end == s.c_str())
      raise(ErrorKind::kDecode, "field '", key, "' is not an integer: ", s);
    return v;
  }

  double get_double(const std::string& key) const {
    bool ok = false;
    double v = decode_double(get_str(key), &ok);
    if (!ok) raise(ErrorKind::kDecode, "field '", key, "' is not a float token");
    return v;
  }

  static std::vector<double> decode_doubles(const std::vector<std::string>& tokens,
                                            const std::string& key) {
    std::vector<double> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
      bool ok = false;
      double v = decode_double(t, &ok);
      if (!ok) raise(ErrorKind::kDecode, "field '", key, "' holds a bad float token: ", t);
      out.push_back(v);
    }
    return out;
  }

  std::vector<double> get_doubles(const std::string& key) const {
    return decode_doubles(get(key), key);
  }

  bool has(const std::string& key) const {
    for (const auto& [k, tokens] : fields_)
      if (k == key) return true;
    return false;
  }

 private:
  std::string type_;
  std::vector<std::pair<std::string, std::vector<std::string>>> fields_;
};

}  // namespace voicecloak
