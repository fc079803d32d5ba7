// include/voicecloak/synth.hpp

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
#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "voicecloak/manifest.hpp"
#include "voicecloak/util.hpp"
#include "voicecloak/wav.hpp"

namespace voicecloak {

// ---------------------------------------------------------------------------
// Desk-scale synthetic corpus: per-speaker harmonic voices with distinct
// formant resonances and log-normal pitch, deterministic given the seeds.
// Not speech, but separable the way speakers are, which is what the linkage
// evaluation needs.
// ---------------------------------------------------------------------------

struct SyntheticSpeakerSpec {
  std::string speaker_id;
  double f0_log_mean = std::log(140.0);  // log-Hz
  double f0_log_std = 0.08;              // log-Hz
  std::vector<double> formant_centers = {500.0, 1500.0, 2500.0};  // Hz
  std::vector<double> formant_bandwidths = {90.0, 120.0, 170.0};  // Hz
  uint64_t seed = 0;

  void check(int sample_rate) const {
    if (!is_valid_id(speaker_id))
      raise(ErrorKind::kParameter, "invalid speaker id: '", speaker_id, "'");
    if (!(f0_log_std > 0.0))
      raise(ErrorKind::kParameter, "f0_log_std must be positive for ", speaker_id);
    if (formant_centers.size() < 3 || formant_centers.size() > 4 ||
        formant_centers.size() != formant_bandwidths.size())
      raise(ErrorKind::kParameter, "expected 3-4 formants with bandwidths for ", speaker_id);
    double prev = 0.0;
    for (double f : formant_centers) {
      if (!(f > prev) || !(f < sample_rate / 2.0))
        raise(ErrorKind::kParameter, "formant centers must be increasing and below Nyquist (",
              speaker_id, ")");
      prev = f;
    }
  }
};

namespace synth_detail {

// Two-pole resonator with unit gain at its center frequency.
struct Resonator {
  double a1, a2, g, y1 = 0.0, y2 = 0.0;

  Resonator(double center_hz, double bandwidth_hz, int fs) {
    const double r = std::exp(-M_PI * bandwidth_hz / fs);
    const double theta = 2.0 * M_PI * center_hz / fs;
    a1 = 2.0 * r * std::cos(theta);
    a2 = -r * r;
    const std::complex<double> z = std::polar(1.0, theta);
    const std::complex<double> denom = 1.0 - a1 / z - a2 / (z * z);
    g = std::abs(denom);
  }
  double step(double x) {
    const double y = g * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace synth_detail

// One utterance: harmonic source with slowly drifting log-normal F0, gated by
// short silences, filtered by the speaker's formant resonances and
// peak-normalized to 0.9. Pure function of (spec, utterance index, duration,
// rate).
inline std::vector<double> synthesize_speech_like(const SyntheticSpeakerSpec& spec,
                                                  std::size_t utterance_index,
                                                  double duration_seconds, int sample_rate) {
  spec.check(sample_rate);
  const std::size_t n =
      static_cast<std::size_t>(std::llround(duration_seconds * sample_rate));
  if (n < 1024)
    raise(ErrorKind::kParameter, "duration ", duration_seconds,
          "s too short to hold one analysis frame");

  KeyedRng rng(Hasher()
                   .add(spec.seed)
                   .add("utterance")
                   .add(static_cast<uint64_t>(utterance_index))
                   .value());

  // Control-rate F0 contour: a slow AR(1) drift in the log domain.
  const std::size_t ctrl_hop = static_cast<std::size_t>(sample_rate / 100);
  const std::size_t num_ctrl = n / ctrl_hop + 2;
  std::vector<double> log_f0(num_ctrl);
  const double rho = 0.9;
  double g = rng.normal();
  for (std::size_t k = 0; k < num_ctrl; ++k) {
    log_f0[k] = spec.f0_log_mean + spec.f0_log_std * g;
    g = rho * g + std::sqrt(1.0 - rho * rho) * rng.normal();
  }
  double f0_max = 0.0;
  for (double lf : log_f0) f0_max = std::max(f0_max, std::exp(lf));

  // Voicing gate: leading/trailing silence plus one mid-utterance pause.
  const std::size_t edge = static_cast<std::size_t>(0.08 * sample_rate);
  const std::size_t ramp = static_cast<std::size_t>(0.02 * sample_rate);
  std::size_t pause_start = 0, pause_len = 0;
  if (duration_seconds >= 1.2) {
    pause_len = static_cast<std::size_t>(0.15 * sample_rate);
    const double at = 0.35 + 0.2 * rng.uniform01();
    pause_start = static_cast<std::size_t>(at * static_cast<double>(n));
  }
  auto gate = [&](std::size_t i) -> double {
    auto ramp_in = [&](std::size_t dist) {
      return dist >= ramp ? 1.0
                          : 0.5 - 0.5 * std::cos(M_PI * static_cast<double>(dist) / ramp);
    };
    if (i < edge || i >= n - std::min(n, edge)) return 0.0;
    double v = std::min(ramp_in(i - edge), ramp_in(n - edge - 1 - i));
    if (pause_len > 0) {
      if (i >= pause_start && i < pause_start + pause_len) return 0.0;
      const std::size_t d =
          i < pause_start ? pause_start - i : i - (pause_start + pause_len) + 1;
      v = std::min(v, ramp_in(d));
    }
    return v;
  };

  const std::size_t harmonics =
      std::max<std::size_t>(1, static_cast<std::size_t>(0.45 * sample_rate / f0_max));
  std::vector<double> phase(harmonics, 0.0);
  for (auto& p : phase) p = 2.0 * M_PI * rng.uniform01();

  std::vector<synth_detail::Resonator> filters;
  for (std::size_t f = 0; f < spec.formant_centers.size(); ++f)
    filters.emplace_back(spec.formant_centers[f], spec.formant_bandwidths[f], sample_rate);

  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double kpos = static_cast<double>(i) / static_cast<double>(ctrl_hop);
    const std::size_t k0 = static_cast<std::size_t>(kpos);
    const double frac = kpos - static_cast<double>(k0);
    const double lf = log_f0[k0] * (1.0 - frac) + log_f0[std::min(k0 + 1, num_ctrl - 1)] * frac;
    const double f0 = std::exp(lf);

    double src = 0.0;
    for (std::size_t h = 0; h < harmonics; ++h) {
      phase[h] += 2.0 * M_PI * (h + 1) * f0 / sample_rate;
      if (phase[h] > 2.0 * M_PI) phase[h] -= 2.0 * M_PI * std::floor(phase[h] / (2.0 * M_PI));
      src += std::sin(phase[h]) / static_cast<double>(h + 1);
    }
    src *= gate(i);
    double y = src;
    for (auto& filt : filters) y = filt.step(y);
    out[i] = y;
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double scale = 0.9 / peak;
    for (auto& v : out) v *= scale;
  }
  return out;
}

// Deterministic well-separated speaker specs: formant centers walk a level
// grid whose steps keep any two speakers at least ~150 Hz apart in F1 or F2,
// and pitch means cover roughly 95-240 Hz.
inline std::vector<SyntheticSpeakerSpec> default_speaker_specs(std::size_t count,
                                                               uint64_t seed,
                                                               const std::string& prefix = "spk") {
  static const double kF1[] = {350.0, 500.0, 650.0, 800.0};
  static const double kF2[] = {1000.0, 1300.0, 1600.0, 1900.0, 2200.0};
  std::vector<SyntheticSpeakerSpec> specs;
  specs.reserve(count);
  int width = 2;
  for (std::size_t c = count; c >= 100; c /= 10) ++width;
  for (std::size_t i = 0; i < count; ++i) {
    KeyedRng rng(Hasher().add(seed).add("speaker-spec").add(static_cast<uint64_t>(i)).value());
    SyntheticSpeakerSpec s;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "%s%0*zu", prefix.c_str(), width, i + 1);
    s.speaker_id = idbuf;
    const double golden = 0.6180339887498949;
    const double u = std::fmod(static_cast<double>(i) * golden, 1.0);
    s.f0_log_mean = std::log(95.0) + u * (std::log(240.0) - std::log(95.0));
    s.f0_log_std = 0.06 + 0.04 * rng.uniform01();
    const double cycle = static_cast<double>(i / 20) * 60.0;  // shift repeats of the grid
    const double j1 = (rng.uniform01() - 0.5) * 40.0;
    const double j2 = (rng.uniform01() - 0.5) * 40.0;
    const double j3 = (rng.uniform01() - 0.5) * 60.0;
    s.formant_centers = {kF1[i % 4] + j1 + cycle, kF2[(i / 4) % 5] + j2 + cycle,
                         2600.0 + static_cast<double>(i % 3) * 250.0 + j3};
    s.formant_bandwidths = {90.0, 120.0, 170.0};
    s.seed = rng.next_u64();
    specs.push_back(std::move(s));
  }
  return specs;
}

enum class CorpusSplitScheme {
  kEnrollTrial,  // first half of each speaker's utterances enroll, rest trial
  kTargetPool,   // every utterance tagged target-pool
};

// Generates audio files under out_dir and returns the manifest describing
// them (paths relative to out_dir). Byte-identical across repeated calls.
inline Manifest generate_synthetic_corpus(std::span<const SyntheticSpeakerSpec> specs,
                                          std::size_t utterances_per_speaker,
                                          double duration_seconds, int sample_rate,
                                          const std::filesystem::path& out_dir,
                                          CorpusSplitScheme scheme = CorpusSplitScheme::kEnrollTrial) {
  if (scheme == CorpusSplitScheme::kEnrollTrial && utterances_per_speaker < 2)
    raise(ErrorKind::kParameter,
          "need at least 2 utterances per speaker to fill enroll and trial splits");
  if (utterances_per_speaker < 1)
    raise(ErrorKind::kParameter, "utterances_per_speaker must be >= 1");
  std::filesystem::create_directories(out_dir);

  Manifest m;
  m.base_dir = out_dir;
  struct Job {
    const SyntheticSpeakerSpec* spec;
    std::size_t utt_index;
    ManifestEntry entry;
  };
  std::vector<Job> jobs;
  for (const auto& spec : specs) {
    spec.check(sample_rate);
    for (std::size_t j = 0; j < utterances_per_speaker; ++j) {
      ManifestEntry e;
      char ubuf[16];
      std::snprintf(ubuf, sizeof(ubuf), "_u%02zu", j);
      e.utterance_id = spec.speaker_id + ubuf;
      e.speaker_id = spec.speaker_id;
      e.path = e.utterance_id + ".wav";
      if (scheme == CorpusSplitScheme::kTargetPool)
        e.split = Split::kTargetPool;
      else
        e.split = j < utterances_per_speaker / 2 ? Split::kEnroll : Split::kTrial;
      jobs.push_back({&spec, j, std::move(e)});
    }
  }

  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    Utterance u;
    u.utterance_id = job.entry.utterance_id;
    u.speaker_id = job.entry.speaker_id;
    u.sample_rate = sample_rate;
    u.samples = synthesize_speech_like(*job.spec, job.utt_index, duration_seconds, sample_rate);
    write_wav(u, out_dir / job.entry.path);
  });
  for (auto& job : jobs) m.entries.push_back(std::move(job.entry));
  m.validate();
  return m;
}

}  // namespace voicecloak
