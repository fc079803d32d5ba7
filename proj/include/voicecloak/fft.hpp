// include/voicecloak/fft.hpp

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

#include <complex>
#include <cstddef>
#include <vector>

#include "voicecloak/util.hpp"

namespace voicecloak {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey FFT. Size must be a power of two.
// The inverse transform includes the 1/N scaling.
inline void fft_inplace(std::vector<std::complex<double>>& x, bool inverse = false) {
  const std::size_t n = x.size();
  if (n <= 1) return;
  if (!is_power_of_two(n)) raise(ErrorKind::kContract, "fft size not a power of two: ", n);

  // Bit-reversal permutation.
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j > i) std::swap(x[i], x[j]);
    std::size_t m = n >> 1;
    while (m >= 1 && j >= m) {
      j -= m;
      m >>= 1;
    }
    j += m;
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t k = 0; k < n; k += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t i = 0; i < len / 2; ++i) {
        std::complex<double> u = x[k + i];
        std::complex<double> v = x[k + i + len / 2] * w;
        x[k + i] = u + v;
        x[k + i + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& c : x) c *= scale;
  }
}

// Forward FFT of a real frame; returns the full complex spectrum of length n.
inline std::vector<std::complex<double>> real_fft(const std::vector<double>& frame) {
  std::vector<std::complex<double>> spec(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) spec[i] = frame[i];
  fft_inplace(spec, false);
  return spec;
}

// Inverse FFT of a conjugate-symmetric half spectrum (bins 0..n/2); returns
// the real time-domain frame of length n.
inline std::vector<double> half_spectrum_ifft(const std::vector<std::complex<double>>& half,
                                              std::size_t n) {
  if (half.size() != n / 2 + 1)
    raise(ErrorKind::kContract, "half spectrum size ", half.size(), " does not match fft size ", n);
  std::vector<std::complex<double>> spec(n);
  for (std::size_t i = 0; i <= n / 2; ++i) spec[i] = half[i];
  for (std::size_t i = 1; i < n / 2; ++i) spec[n - i] = std::conj(half[i]);
  fft_inplace(spec, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
  return out;
}

}  // namespace voicecloak
