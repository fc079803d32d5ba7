// include/voicecloak/analysis.hpp

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
#include <cstdint>
#include <span>
#include <vector>

#include "voicecloak/fft.hpp"
#include "voicecloak/util.hpp"
#include "voicecloak/wav.hpp"

namespace voicecloak {

// ---------------------------------------------------------------------------
// Frame-level source-filter analysis.
//
// Each frame is decomposed into a smooth spectral envelope (cepstrally
// liftered log magnitude, with a pitch-adaptive quefrency cutoff), a
// fine-structure excitation ratio (magnitude / envelope), and the residual
// phase. synthesize() multiplies envelope and excitation back together, so
// the unmodified analysis resynthesizes the input up to window edge effects.
// ---------------------------------------------------------------------------

struct AnalysisConfig {
  std::size_t frame_length = 1024;  // power of two, >= 256
  std::size_t hop = 256;            // <= frame_length / 2
  double vad_threshold = 0.06;      // frame RMS gate, samples in [-1,1]
  double f0_min = 60.0;             // Hz
  double f0_max = 400.0;            // Hz
  double voicing_threshold = 0.3;   // normalized autocorrelation peak
};

struct FrameAnalysis {
  std::string utterance_id;
  std::string speaker_id;
  int sample_rate = 0;
  std::size_t frame_length = 0;
  std::size_t hop = 0;

  std::vector<double> f0;                           // Hz; 0 on unvoiced frames
  std::vector<uint8_t> voiced;                      // per-frame flag
  std::vector<std::vector<double>> envelope;        // frame_length/2+1 bins, >= 0
  std::vector<std::vector<double>> excitation;      // magnitude / envelope, >= 0
  std::vector<std::vector<double>> residual_phase;  // radians
  std::vector<double> energy;                       // frame RMS in [0,1]

  std::size_t clamped_frames = 0;  // pitch shifts limited at Nyquist/2

  std::size_t num_frames() const { return f0.size(); }
  std::size_t bins() const { return frame_length / 2 + 1; }

  void check() const {
    const std::size_t n = num_frames();
    if (voiced.size() != n || envelope.size() != n || excitation.size() != n ||
        residual_phase.size() != n || energy.size() != n)
      raise(ErrorKind::kContract, "frame analysis sequences disagree in length");
    for (std::size_t t = 0; t < n; ++t) {
      if (envelope[t].size() != bins() || excitation[t].size() != bins() ||
          residual_phase[t].size() != bins())
        raise(ErrorKind::kContract, "frame ", t, " has wrong bin count");
      for (double v : envelope[t])
        if (!(v >= 0.0)) raise(ErrorKind::kContract, "negative envelope value in frame ", t);
      if ((f0[t] == 0.0) == (voiced[t] != 0))
        raise(ErrorKind::kContract, "voicing flag inconsistent with f0 in frame ", t);
      if (voiced[t] && !(f0[t] < sample_rate / 2.0))
        raise(ErrorKind::kContract, "voiced f0 above Nyquist in frame ", t);
    }
  }
};

namespace dsp_detail {

inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

inline double frame_rms(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(x.size()));
}

// Normalized autocorrelation pitch estimate over one frame.
// Returns the interpolated peak lag in samples (0 when no acceptable peak)
// together with the peak correlation value.
struct PitchCandidate {
  double lag = 0.0;
  double corr = 0.0;
};

inline PitchCandidate autocorrelation_pitch(std::span<const double> frame, int sample_rate,
                                            double f0_min, double f0_max) {
  const std::size_t n = frame.size();
  std::size_t lag_min = static_cast<std::size_t>(std::floor(sample_rate / f0_max));
  std::size_t lag_max = static_cast<std::size_t>(std::ceil(sample_rate / f0_min));
  lag_max = std::min(lag_max, n / 2);
  if (lag_min < 2) lag_min = 2;
  if (lag_max <= lag_min + 2) return {};

  std::vector<double> r(lag_max + 2, 0.0);
  // Prefix sums of squares for the normalization terms.
  std::vector<double> sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) sq[i + 1] = sq[i] + frame[i] * frame[i];

  for (std::size_t tau = lag_min - 1; tau <= lag_max + 1 && tau < n; ++tau) {
    double dot = 0.0;
    const std::size_t m = n - tau;
    for (std::size_t i = 0; i < m; ++i) dot += frame[i] * frame[i + tau];
    const double e0 = sq[m];
    const double e1 = sq[n] - sq[tau];
    const double denom = std::sqrt(e0 * e1);
    r[tau] = denom > 0.0 ? dot / denom : 0.0;
  }

  double r_max = 0.0;
  for (std::size_t tau = lag_min; tau <= lag_max; ++tau) r_max = std::max(r_max, r[tau]);
  if (r_max <= 0.0) return {};

  // Shortest lag whose local maximum is close to the global one; this keeps
  // the fundamental when period multiples score equally well.
  std::size_t best = 0;
  for (std::size_t tau = lag_min; tau <= lag_max; ++tau) {
    if (r[tau] >= r[tau - 1] && r[tau] >= r[tau + 1] && r[tau] >= 0.98 * r_max) {
      best = tau;
      break;
    }
  }
  if (best == 0) {
    for (std::size_t tau = lag_min; tau <= lag_max; ++tau)
      if (r[tau] == r_max) {
        best = tau;
        break;
      }
  }

  // Parabolic refinement around the integer peak.
  double lag = static_cast<double>(best);
  const double rm = r[best - 1], r0 = r[best], rp = r[best + 1];
  const double denom = rm - 2.0 * r0 + rp;
  if (denom < 0.0) {
    double delta = 0.5 * (rm - rp) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    lag += delta;
  }
  return {lag, r[best]};
}

// Cepstral smoothing of the symmetric log-magnitude spectrum. The lifter
// keeps quefrencies below the cutoff with a short raised-cosine rolloff.
inline std::vector<double> smooth_log_spectrum(const std::vector<double>& log_mag_half,
                                               std::size_t fft_size, std::size_t cutoff) {
  const std::size_t half = fft_size / 2;
  std::vector<std::complex<double>> buf(fft_size);
  for (std::size_t i = 0; i <= half; ++i) buf[i] = log_mag_half[i];
  for (std::size_t i = 1; i < half; ++i) buf[fft_size - i] = log_mag_half[i];
  fft_inplace(buf, true);  // -> (real, symmetric) cepstrum

  const std::size_t roll = 4;
  auto lifter = [&](std::size_t q) -> double {
    if (q + roll < cutoff) return 1.0;
    if (q >= cutoff + roll) return 0.0;
    const double x = (static_cast<double>(q) - (static_cast<double>(cutoff) - roll)) /
                     (2.0 * roll);
    return 0.5 + 0.5 * std::cos(M_PI * x);
  };
  for (std::size_t i = 0; i < fft_size; ++i) {
    const std::size_t q = std::min(i, fft_size - i);
    buf[i] *= lifter(q);
  }
  fft_inplace(buf, false);
  std::vector<double> out(half + 1);
  for (std::size_t i = 0; i <= half; ++i) out[i] = buf[i].real();
  return out;
}

inline double wrap_pi(double x) {
  x = std::fmod(x + M_PI, 2.0 * M_PI);
  if (x < 0) x += 2.0 * M_PI;
  return x - M_PI;
}

}  // namespace dsp_detail

// Per-frame RMS gate; a frame is active when its RMS is >= threshold.
inline std::vector<uint8_t> voice_activity(const Utterance& u, std::size_t frame_length,
                                           std::size_t hop, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    raise(ErrorKind::kParameter, "VAD threshold must lie in [0,1], got ", threshold);
  if (hop == 0 || hop > frame_length / 2)
    raise(ErrorKind::kParameter, "hop must satisfy 0 < hop <= frame_length/2");
  if (u.samples.size() < frame_length)
    raise(ErrorKind::kParameter, "utterance shorter than one analysis frame");
  const std::size_t num_frames = (u.samples.size() - frame_length) / hop + 1;
  std::vector<uint8_t> flags(num_frames);
  for (std::size_t t = 0; t < num_frames; ++t) {
    std::span<const double> frame(u.samples.data() + t * hop, frame_length);
    flags[t] = dsp_detail::frame_rms(frame) >= threshold ? 1 : 0;
  }
  return flags;
}

inline FrameAnalysis analyze(const Utterance& u, const AnalysisConfig& cfg = {}) {
  const std::size_t n = cfg.frame_length;
  if (!is_power_of_two(n) || n < 256)
    raise(ErrorKind::kParameter, "frame_length must be a power of two >= 256, got ", n);
  if (cfg.hop == 0 || cfg.hop > n / 2)
    raise(ErrorKind::kParameter, "hop must satisfy 0 < hop <= frame_length/2");
  if (u.sample_rate <= 0) raise(ErrorKind::kParameter, "utterance has no sample rate");
  if (u.samples.size() < n)
    raise(ErrorKind::kParameter, "utterance '", u.utterance_id, "' shorter than one frame (",
          u.samples.size(), " < ", n, " samples)");

  const std::size_t num_frames = (u.samples.size() - n) / cfg.hop + 1;
  const std::size_t bins = n / 2 + 1;
  const std::vector<double> window = dsp_detail::hann_window(n);

  FrameAnalysis fa;
  fa.utterance_id = u.utterance_id;
  fa.speaker_id = u.speaker_id;
  fa.sample_rate = u.sample_rate;
  fa.frame_length = n;
  fa.hop = cfg.hop;
  fa.f0.resize(num_frames);
  fa.voiced.resize(num_frames);
  fa.envelope.resize(num_frames);
  fa.excitation.resize(num_frames);
  fa.residual_phase.resize(num_frames);
  fa.energy.resize(num_frames);

  parallel_for(num_frames, [&](std::size_t t) {
    std::span<const double> frame(u.samples.data() + t * cfg.hop, n);
    const double rms = dsp_detail::frame_rms(frame);
    fa.energy[t] = std::min(rms, 1.0);

    auto pitch = dsp_detail::autocorrelation_pitch(frame, u.sample_rate, cfg.f0_min, cfg.f0_max);
    double f0 = 0.0;
    bool voiced = false;
    if (pitch.lag > 0.0 && pitch.corr >= cfg.voicing_threshold &&
        rms >= cfg.vad_threshold) {
      f0 = u.sample_rate / pitch.lag;
      voiced = f0 >= cfg.f0_min * 0.9 && f0 <= cfg.f0_max * 1.1;
      if (!voiced) f0 = 0.0;
    }
    fa.f0[t] = f0;
    fa.voiced[t] = voiced ? 1 : 0;

    std::vector<double> windowed(n);
    for (std::size_t i = 0; i < n; ++i) windowed[i] = frame[i] * window[i];
    auto spec = real_fft(windowed);

    std::vector<double> log_mag(bins);
    std::vector<double> mag(bins);
    for (std::size_t i = 0; i < bins; ++i) {
      mag[i] = std::max(std::abs(spec[i]), 1e-10);
      log_mag[i] = std::log(mag[i]);
    }

    // Pitch-adaptive cutoff: about half the pitch period, so that harmonic
    // fine structure stays out of the envelope.
    const double f0_for_cut = voiced ? f0 : 200.0;
    std::size_t cutoff = static_cast<std::size_t>(
        std::lround(0.5 * u.sample_rate / f0_for_cut));
    cutoff = std::clamp<std::size_t>(cutoff, 16, n / 4);

    auto smooth = dsp_detail::smooth_log_spectrum(log_mag, n, cutoff);
    auto& env = fa.envelope[t];
    auto& exc = fa.excitation[t];
    auto& phase = fa.residual_phase[t];
    env.resize(bins);
    exc.resize(bins);
    phase.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
      env[i] = std::exp(smooth[i]);
      exc[i] = mag[i] / env[i];
      phase[i] = std::arg(spec[i]);
    }
  });
  return fa;
}

// Windowed overlap-add reconstruction. Unmodified analyses reproduce the
// input exactly wherever the window sum has support.
inline Utterance synthesize(const FrameAnalysis& fa) {
  fa.check();
  const std::size_t n = fa.frame_length;
  const std::size_t bins = fa.bins();
  const std::size_t num_frames = fa.num_frames();
  if (num_frames == 0) raise(ErrorKind::kContract, "cannot synthesize zero frames");
  const std::vector<double> window = dsp_detail::hann_window(n);

  const std::size_t out_len = (num_frames - 1) * fa.hop + n;
  std::vector<double> acc(out_len, 0.0);
  std::vector<double> wsum(out_len, 0.0);

  std::vector<std::vector<double>> frames(num_frames);
  parallel_for(num_frames, [&](std::size_t t) {
    std::vector<std::complex<double>> half(bins);
    for (std::size_t i = 0; i < bins; ++i) {
      const double m = fa.envelope[t][i] * fa.excitation[t][i];
      half[i] = std::polar(m, fa.residual_phase[t][i]);
    }
    frames[t] = half_spectrum_ifft(half, n);
  });
  for (std::size_t t = 0; t < num_frames; ++t) {
    const std::size_t off = t * fa.hop;
    for (std::size_t i = 0; i < n; ++i) {
      acc[off + i] += frames[t][i] * window[i];
      wsum[off + i] += window[i] * window[i];
    }
  }

  Utterance u;
  u.utterance_id = fa.utterance_id;
  u.speaker_id = fa.speaker_id;
  u.sample_rate = fa.sample_rate;
  u.samples.resize(out_len);
  double peak = 0.0;
  for (std::size_t i = 0; i < out_len; ++i) {
    u.samples[i] = wsum[i] > 1e-9 ? acc[i] / wsum[i] : 0.0;
    peak = std::max(peak, std::abs(u.samples[i]));
  }
  if (peak > 1.0)
    for (auto& s : u.samples) s /= peak;
  return u;
}

// Scales the harmonic spacing of voiced frames by the given per-frame ratio
// while leaving the spectral envelope untouched. The excitation magnitude is
// resampled along frequency; phases are rebuilt by propagating per-bin
// instantaneous frequency scaled by the ratio, so overlapping frames stay
// coherent at the shifted pitch. Unvoiced frames pass through unchanged.
inline FrameAnalysis shift_pitch(const FrameAnalysis& fa, std::span<const double> ratios) {
  fa.check();
  if (ratios.size() != fa.num_frames())
    raise(ErrorKind::kContract, "ratio sequence length ", ratios.size(),
          " does not match frame count ", fa.num_frames());
  for (double r : ratios)
    if (!(r > 0.0)) raise(ErrorKind::kContract, "pitch ratios must be positive");

  FrameAnalysis out = fa;
  const std::size_t bins = fa.bins();
  const double bin_advance = 2.0 * M_PI * static_cast<double>(fa.hop) /
                             static_cast<double>(fa.frame_length);
  const double f0_ceiling = fa.sample_rate / 4.0;  // Nyquist/2

  // Running output phase per bin; reset on every pass-through frame.
  std::vector<double> psi(bins, 0.0);
  bool psi_valid = false;

  for (std::size_t t = 0; t < fa.num_frames(); ++t) {
    double r = ratios[t];
    if (std::abs(r - 1.0) < 1e-12) r = 1.0;
    if (!fa.voiced[t] || r == 1.0) {
      // Pass-through frame: output equals input, restart phase tracking.
      psi = fa.residual_phase[t];
      psi_valid = true;
      continue;
    }
    if (fa.f0[t] * r > f0_ceiling) {
      r = f0_ceiling / fa.f0[t];
      ++out.clamped_frames;
    }
    out.f0[t] = fa.f0[t] * r;

    const auto& exc_in = fa.excitation[t];
    const auto& ph_in = fa.residual_phase[t];
    auto& exc_out = out.excitation[t];
    auto& ph_out = out.residual_phase[t];

    for (std::size_t j = 0; j < bins; ++j) {
      const double src = static_cast<double>(j) / r;
      if (src >= static_cast<double>(bins - 1)) {
        exc_out[j] = exc_in[bins - 1];
      } else {
        const std::size_t i0 = static_cast<std::size_t>(src);
        const double frac = src - static_cast<double>(i0);
        exc_out[j] = exc_in[i0] * (1.0 - frac) + exc_in[i0 + 1] * frac;
      }

      const std::size_t near =
          std::min<std::size_t>(static_cast<std::size_t>(std::lround(src)), bins - 1);
      double advance;
      if (t == 0 || !psi_valid) {
        advance = 0.0;
        psi[j] = ph_in[near];
      } else {
        const double expected = bin_advance * static_cast<double>(near);
        const double prev = fa.residual_phase[t - 1][near];
        advance = expected + dsp_detail::wrap_pi(ph_in[near] - prev - expected);
        psi[j] += r * advance;
      }
      ph_out[j] = dsp_detail::wrap_pi(psi[j]);
    }
    psi_valid = true;
  }
  return out;
}

}  // namespace voicecloak
