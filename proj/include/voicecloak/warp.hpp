// include/voicecloak/warp.hpp

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
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "voicecloak/util.hpp"

namespace voicecloak {

// ---------------------------------------------------------------------------
// Monotone warping functions on normalized frequency [0, pi].
//
// bilinear_warp  : principal argument of the Blaschke factor (z-a)/(1-az),
//                  z = e^{iw}; the log-bilinear map. Inverts under a -> -a.
// quadratic_warp : w + b*(w/pi - (w/pi)^2).
// composite_warp : quadratic after bilinear; the two-parameter family used
//                  for whole-utterance spectral disguise.
// power_warp     : pi*(w/pi)^g; the one-parameter per-class VTLN family.
//
// All of them fix 0 and pi and are strictly increasing for parameters in
// the supported ranges.
// ---------------------------------------------------------------------------

inline double bilinear_warp(double omega, double alpha) {
  if (!(std::abs(alpha) < 1.0))
    raise(ErrorKind::kDomain, "bilinear warp factor must satisfy |alpha| < 1, got ", alpha);
  if (!(omega >= -1e-12 && omega <= M_PI + 1e-12))
    raise(ErrorKind::kDomain, "frequency outside [0,pi]: ", omega);
  if (alpha == 0.0) return omega;
  omega = std::clamp(omega, 0.0, M_PI);
  const double s = std::sin(omega);
  const double c = std::cos(omega);
  // arg(z - alpha) - arg(1 - alpha*z)
  return std::atan2(s, c - alpha) - std::atan2(-alpha * s, 1.0 - alpha * c);
}

inline double quadratic_warp(double omega, double beta) {
  const double x = omega / M_PI;
  return omega + beta * (x - x * x);
}

inline double composite_warp(double omega, double alpha, double beta) {
  return quadratic_warp(bilinear_warp(omega, alpha), beta);
}

inline double power_warp(double omega, double gamma) {
  if (!(gamma > 0.0))
    raise(ErrorKind::kDomain, "power warp exponent must be positive, got ", gamma);
  if (!(omega >= -1e-12 && omega <= M_PI + 1e-12))
    raise(ErrorKind::kDomain, "frequency outside [0,pi]: ", omega);
  if (gamma == 1.0) return std::clamp(omega, 0.0, M_PI);
  omega = std::clamp(omega, 0.0, M_PI);
  return M_PI * std::pow(omega / M_PI, gamma);
}

// Integral over [0,pi] of |composite_warp(w) - w|, by the trapezoidal rule.
// This is the distortion strength used to box the sampled warp parameters.
inline double distortion_strength(double alpha, double beta,
                                  std::size_t quadrature_points = 20001) {
  if (quadrature_points < 1000)
    raise(ErrorKind::kParameter, "need >= 1000 quadrature points, got ", quadrature_points);
  const std::size_t n = quadrature_points;
  const double h = M_PI / static_cast<double>(n - 1);
  double acc = 0.0;
  double prev = 0.0;  // |w(0) - 0| = 0
  for (std::size_t i = 1; i < n; ++i) {
    const double omega = h * static_cast<double>(i);
    const double cur = std::abs(composite_warp(omega, alpha, beta) - omega);
    acc += 0.5 * (prev + cur) * h;
    prev = cur;
  }
  return acc;
}

// A validated warp choice, applicable to spectral envelopes.
struct WarpSpec {
  enum class Kind { kIdentity, kBilinearQuadratic, kPower };

  Kind kind = Kind::kIdentity;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 1.0;

  static WarpSpec identity() { return WarpSpec{}; }
  static WarpSpec bilinear_quadratic(double alpha, double beta) {
    WarpSpec s;
    s.kind = Kind::kBilinearQuadratic;
    s.alpha = alpha;
    s.beta = beta;
    return s;
  }
  static WarpSpec power(double gamma) {
    WarpSpec s;
    s.kind = Kind::kPower;
    s.gamma = gamma;
    return s;
  }

  double apply(double omega) const {
    switch (kind) {
      case Kind::kIdentity: return omega;
      case Kind::kBilinearQuadratic: return composite_warp(omega, alpha, beta);
      case Kind::kPower: return power_warp(omega, gamma);
    }
    return omega;
  }

  bool is_identity_map() const {
    switch (kind) {
      case Kind::kIdentity: return true;
      case Kind::kBilinearQuadratic: return alpha == 0.0 && beta == 0.0;
      case Kind::kPower: return gamma == 1.0;
    }
    return false;
  }

  std::string describe() const {
    switch (kind) {
      case Kind::kIdentity: return "identity";
      case Kind::kBilinearQuadratic:
        return cat("bilinear_quadratic(", alpha, ",", beta, ")");
      case Kind::kPower: return cat("power(", gamma, ")");
    }
    return "?";
  }

  // Rejects parameter choices whose induced map is not strictly increasing
  // on [0,pi]; checked on a fixed grid.
  void validate() const {
    switch (kind) {
      case Kind::kIdentity:
        return;
      case Kind::kPower:
        if (!(gamma > 0.0))
          raise(ErrorKind::kDomain, "power warp exponent must be positive, got ", gamma);
        return;
      case Kind::kBilinearQuadratic: {
        if (!(std::abs(alpha) < 1.0))
          raise(ErrorKind::kDomain, "|alpha| must be < 1, got ", alpha);
        const std::size_t grid = 512;
        double prev = 0.0;
        for (std::size_t i = 1; i <= grid; ++i) {
          const double omega = M_PI * static_cast<double>(i) / static_cast<double>(grid);
          const double w = composite_warp(omega, alpha, beta);
          if (!(w > prev))
            raise(ErrorKind::kContract, "warp ", describe(),
                  " is not strictly increasing near omega=", omega);
          prev = w;
        }
        return;
      }
    }
  }
};

// Pullback source positions for an envelope of the given bin count: entry j
// holds the fractional input bin at w^{-1}(omega_j), found by bisection.
// Computing these once per spec makes warping many frames cheap.
inline std::vector<double> warp_source_positions(const WarpSpec& spec, std::size_t bins) {
  if (bins < 2) raise(ErrorKind::kContract, "need at least 2 envelope bins");
  spec.validate();
  const std::size_t last = bins - 1;
  std::vector<double> pos(bins);
  for (std::size_t j = 0; j <= last; ++j) {
    if (j == 0 || j == last || spec.is_identity_map()) {
      pos[j] = static_cast<double>(j);  // endpoints are fixed by every warp
      continue;
    }
    const double target = M_PI * static_cast<double>(j) / static_cast<double>(last);
    double lo = 0.0, hi = M_PI;
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      if (spec.apply(mid) < target)
        lo = mid;
      else
        hi = mid;
    }
    pos[j] = 0.5 * (lo + hi) * static_cast<double>(last) / M_PI;
  }
  return pos;
}

inline std::vector<double> apply_warp_positions(std::span<const double> envelope,
                                                std::span<const double> positions) {
  if (envelope.size() != positions.size())
    raise(ErrorKind::kContract, "envelope/positions size mismatch");
  const std::size_t bins = envelope.size();
  std::vector<double> out(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    const double p = positions[j];
    const std::size_t i0 = std::min<std::size_t>(static_cast<std::size_t>(p), bins - 1);
    if (i0 >= bins - 1) {
      out[j] = envelope[bins - 1];
    } else {
      const double frac = p - static_cast<double>(i0);
      out[j] = envelope[i0] * (1.0 - frac) + envelope[i0 + 1] * frac;
    }
  }
  return out;
}

// Remaps an envelope along frequency: output bin j takes the input value at
// w^{-1}(omega_j) (linear interpolation between bins). Identity parameter
// choices return the input unchanged.
inline std::vector<double> warp_envelope(std::span<const double> envelope,
                                         const WarpSpec& spec) {
  for (double v : envelope)
    if (!(v >= 0.0)) raise(ErrorKind::kContract, "envelope must be nonnegative");
  if (spec.is_identity_map()) {
    spec.validate();
    return {envelope.begin(), envelope.end()};
  }
  return apply_warp_positions(envelope, warp_source_positions(spec, envelope.size()));
}

}  // namespace voicecloak
