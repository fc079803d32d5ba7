// include/voicecloak/manifest.hpp

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
#include <set>
#include <string>
#include <vector>

#include "voicecloak/util.hpp"
#include "voicecloak/wav.hpp"

namespace voicecloak {

enum class Split { kTrain, kEnroll, kTrial, kTargetPool };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kEnroll: return "enroll";
    case Split::kTrial: return "trial";
    case Split::kTargetPool: return "target-pool";
  }
  return "?";
}

inline Split split_from_name(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "enroll") return Split::kEnroll;
  if (name == "trial") return Split::kTrial;
  if (name == "target-pool") return Split::kTargetPool;
  raise(ErrorKind::kManifest, "unknown split tag: ", name);
}

struct ManifestEntry {
  std::string utterance_id;
  std::string speaker_id;
  std::string path;  // as written in the manifest; may be relative
  Split split = Split::kTrial;
};

// A dataset manifest: one audio file per line, CSV with a fixed header.
// Relative paths resolve against the directory of the manifest file.
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const ManifestEntry& e) const {
    std::filesystem::path p(e.path);
    return p.is_absolute() ? p : base_dir / p;
  }

  std::vector<ManifestEntry> in_split(Split s) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries)
      if (e.split == s) out.push_back(e);
    return out;
  }

  std::vector<std::string> speakers(Split s) const {
    std::set<std::string> uniq;
    for (const auto& e : entries)
      if (e.split == s) uniq.insert(e.speaker_id);
    return {uniq.begin(), uniq.end()};
  }

  std::vector<std::string> all_speakers() const {
    std::set<std::string> uniq;
    for (const auto& e : entries) uniq.insert(e.speaker_id);
    return {uniq.begin(), uniq.end()};
  }

  Utterance load_audio(const ManifestEntry& e) const {
    Utterance u = read_wav(resolve(e));
    u.utterance_id = e.utterance_id;
    u.speaker_id = e.speaker_id;
    return u;
  }

  // Duplicate utterance ids and missing files are manifest errors.
  void validate(bool check_files = true) const {
    std::set<std::string> seen;
    for (const auto& e : entries) {
      if (!is_valid_id(e.utterance_id))
        raise(ErrorKind::kManifest, "invalid utterance id: '", e.utterance_id, "'");
      if (!is_valid_id(e.speaker_id))
        raise(ErrorKind::kManifest, "invalid speaker id: '", e.speaker_id, "'");
      if (!seen.insert(e.utterance_id).second)
        raise(ErrorKind::kManifest, "duplicate utterance id: ", e.utterance_id);
      if (check_files && !std::filesystem::exists(resolve(e)))
        raise(ErrorKind::kManifest, "referenced audio file missing: ", resolve(e).string());
    }
  }
};

inline constexpr const char* kManifestHeader = "utterance_id,speaker_id,path,split";

inline Manifest load_manifest(const std::filesystem::path& path, bool check_files = true) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kIo, "cannot open manifest: ", path.string());
  Manifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path() : ".";
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::kManifest, "empty manifest: ", path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader)
    raise(ErrorKind::kManifest, "bad manifest header in ", path.string(), ": '", line, "'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_char(line, ',');
    if (fields.size() != 4)
      raise(ErrorKind::kManifest, "manifest line ", lineno, " has ", fields.size(),
            " fields, expected 4");
    ManifestEntry e;
    e.utterance_id = fields[0];
    e.speaker_id = fields[1];
    e.path = fields[2];
    e.split = split_from_name(fields[3]);
    m.entries.push_back(std::move(e));
  }
  m.validate(check_files);
  return m;
}

inline void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(ErrorKind::kIo, "cannot write manifest: ", path.string());
  out << kManifestHeader << "\n";
  for (const auto& e : m.entries)
    out << e.utterance_id << ',' << e.speaker_id << ',' << e.path << ','
        << split_name(e.split) << "\n";
  out.flush();
  if (!out) raise(ErrorKind::kIo, "write failure: ", path.string());
}

}  // namespace voicecloak
