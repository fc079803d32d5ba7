// tests/test_analysis.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "voicecloak/analysis.hpp"

using namespace voicecloak;
using vc_test::make_noise;
using vc_test::make_tone;

TEST_CASE("pure tone is voiced with accurate F0", "[analysis]") {
  Utterance u = make_tone(220.0, 0.5, 2.0, 16000);
  FrameAnalysis fa = analyze(u);
  fa.check();
  std::size_t voiced = 0, near = 0;
  for (std::size_t t = 0; t < fa.num_frames(); ++t) {
    if (fa.voiced[t]) {
      ++voiced;
      if (std::abs(fa.f0[t] - 220.0) <= 1.0) ++near;
    }
  }
  REQUIRE(voiced >= fa.num_frames() * 9 / 10);
  REQUIRE(near == voiced);  // every voiced frame within 1 Hz
}

TEST_CASE("F0 estimator stays within 1 Hz across the search band", "[analysis]") {
  for (double f : {65.0, 100.0, 150.0, 220.0, 300.0, 390.0}) {
    Utterance u = make_tone(f, 0.5, 2.0, 16000);
    FrameAnalysis fa = analyze(u);
    std::size_t voiced = 0;
    for (std::size_t t = 0; t < fa.num_frames(); ++t) {
      if (!fa.voiced[t]) continue;
      ++voiced;
      REQUIRE(std::abs(fa.f0[t] - f) <= 1.0);
    }
    REQUIRE(voiced > fa.num_frames() / 2);
  }
}

TEST_CASE("white noise is mostly unvoiced", "[analysis]") {
  Utterance u = make_noise(0.3, 2.0, 16000, 4242);
  FrameAnalysis fa = analyze(u);
  std::size_t voiced = 0;
  for (auto v : fa.voiced) voiced += v;
  REQUIRE(voiced <= fa.num_frames() / 10);
}

TEST_CASE("all-zero signal is silent and unvoiced", "[analysis]") {
  Utterance u;
  u.sample_rate = 16000;
  u.samples.assign(4096, 0.0);
  FrameAnalysis fa = analyze(u);
  for (std::size_t t = 0; t < fa.num_frames(); ++t) {
    REQUIRE(fa.voiced[t] == 0);
    REQUIRE(fa.f0[t] == 0.0);
    REQUIRE(fa.energy[t] == 0.0);
  }
}

TEST_CASE("too-short input raises an analysis error", "[analysis]") {
  Utterance u;
  u.sample_rate = 16000;
  u.samples.assign(512, 0.1);
  REQUIRE_THROWS_AS(analyze(u), Error);
}

TEST_CASE("analyze-synthesize round trip is faithful", "[analysis]") {
  Utterance u = make_tone(440.0, 0.5, 1.0, 16000);
  FrameAnalysis fa = analyze(u);
  Utterance back = synthesize(fa);
  REQUIRE(back.samples.size() == (fa.num_frames() - 1) * fa.hop + fa.frame_length);
  const double snr = vc_test::segmental_snr_db(u.samples, back.samples, fa.frame_length);
  REQUIRE(snr >= 10.0);
}

TEST_CASE("zero envelope synthesizes silence", "[analysis]") {
  Utterance u = make_tone(200.0, 0.4, 0.5, 16000);
  FrameAnalysis fa = analyze(u);
  for (auto& env : fa.envelope) std::fill(env.begin(), env.end(), 0.0);
  Utterance out = synthesize(fa);
  for (double s : out.samples) REQUIRE(s == 0.0);
}

TEST_CASE("single frame synthesizes exactly frame_length samples", "[analysis]") {
  Utterance u = make_tone(200.0, 0.4, 0.065, 16000);  // 1040 samples, one frame
  FrameAnalysis fa = analyze(u);
  REQUIRE(fa.num_frames() == 1);
  Utterance out = synthesize(fa);
  REQUIRE(out.samples.size() == fa.frame_length);
}

TEST_CASE("voice activity thresholding", "[analysis]") {
  SECTION("constant amplitude at the threshold is active") {
    Utterance u;
    u.sample_rate = 16000;
    u.samples.assign(4096, 0.06);
    auto flags = voice_activity(u, 1024, 256, 0.06);
    for (auto f : flags) REQUIRE(f == 1);
  }
  SECTION("zeros are inactive") {
    Utterance u;
    u.sample_rate = 16000;
    u.samples.assign(4096, 0.0);
    auto flags = voice_activity(u, 1024, 256, 0.06);
    for (auto f : flags) REQUIRE(f == 0);
  }
  SECTION("sine of amplitude 0.2 is active (RMS ~ 0.141)") {
    Utterance u = make_tone(150.0, 0.2, 0.5, 16000);
    auto flags = voice_activity(u, 1024, 256, 0.06);
    std::size_t active = 0;
    for (auto f : flags) active += f;
    REQUIRE(active == flags.size());
  }
  SECTION("monotone in the threshold (property)") {
    Utterance u = make_noise(0.2, 1.0, 16000, 99);
    for (double lo : {0.01, 0.05, 0.1}) {
      auto a = voice_activity(u, 1024, 256, lo);
      auto b = voice_activity(u, 1024, 256, lo + 0.05);
      for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i]) REQUIRE(a[i]);  // raising the threshold never activates
    }
  }
  SECTION("threshold outside [0,1] is rejected") {
    Utterance u = make_noise(0.2, 0.5, 16000, 1);
    REQUIRE_THROWS_AS(voice_activity(u, 1024, 256, 1.5), Error);
  }
}

TEST_CASE("pitch shift identity and bypass", "[analysis]") {
  SECTION("ratio 1 keeps f0 exactly") {
    Utterance u = make_tone(220.0, 0.5, 1.0, 16000);
    FrameAnalysis fa = analyze(u);
    std::vector<double> ratios(fa.num_frames(), 1.0);
    FrameAnalysis out = shift_pitch(fa, ratios);
    for (std::size_t t = 0; t < fa.num_frames(); ++t) REQUIRE(out.f0[t] == fa.f0[t]);
    Utterance a = synthesize(fa);
    Utterance b = synthesize(out);
    REQUIRE(a.samples == b.samples);
  }
  SECTION("unvoiced noise passes through any ratio") {
    Utterance u = make_noise(0.3, 1.0, 16000, 5);
    FrameAnalysis fa = analyze(u);
    for (auto v : fa.voiced) REQUIRE(v == 0);
    std::vector<double> ratios(fa.num_frames(), 1.7);
    Utterance a = synthesize(fa);
    Utterance b = synthesize(shift_pitch(fa, ratios));
    REQUIRE(a.samples == b.samples);
  }
}

TEST_CASE("pitch shift by 1.5 lands near 330 Hz", "[analysis]") {
  Utterance u = make_tone(220.0, 0.5, 2.0, 16000);
  FrameAnalysis fa = analyze(u);
  std::vector<double> ratios(fa.num_frames(), 1.5);
  Utterance shifted = synthesize(shift_pitch(fa, ratios));
  FrameAnalysis re = analyze(shifted);
  double sum = 0.0;
  std::size_t voiced = 0;
  for (std::size_t t = 0; t < re.num_frames(); ++t)
    if (re.voiced[t]) {
      sum += re.f0[t];
      ++voiced;
    }
  REQUIRE(voiced > re.num_frames() / 2);
  const double mean_f0 = sum / static_cast<double>(voiced);
  REQUIRE(mean_f0 == Catch::Approx(330.0).epsilon(0.03));
}

TEST_CASE("pitch shift clamps at Nyquist/2 and counts it", "[analysis]") {
  Utterance u = make_tone(390.0, 0.5, 1.0, 16000);
  FrameAnalysis fa = analyze(u);
  std::vector<double> ratios(fa.num_frames(), 20.0);
  FrameAnalysis out = shift_pitch(fa, ratios);
  REQUIRE(out.clamped_frames > 0);
  for (std::size_t t = 0; t < out.num_frames(); ++t)
    if (out.voiced[t]) REQUIRE(out.f0[t] <= 16000.0 / 4.0 + 1e-9);
}

TEST_CASE("envelopes stay nonnegative through the pipeline (property)", "[analysis]") {
  Utterance u = make_tone(180.0, 0.5, 1.0, 16000);
  FrameAnalysis fa = analyze(u);
  std::vector<double> ratios(fa.num_frames(), 1.3);
  FrameAnalysis out = shift_pitch(fa, ratios);
  out.check();
  for (const auto& env : out.envelope)
    for (double v : env) REQUIRE(v >= 0.0);
}
