#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace vocalics {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT. data.size() must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& data, bool inverse = false) {
  const std::size_t n = data.size();
  if (n < 2) return;

  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * 3.14159265358979323846 / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : data) x /= static_cast<double>(n);
  }
}

// Magnitude spectrum of a real frame, zero-padded to n_fft (power of two).
// Returns n_fft/2 + 1 bins.
inline std::vector<double> magnitude_spectrum(const double* frame, std::size_t n,
                                              std::size_t n_fft) {
  std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
  for (std::size_t i = 0; i < n && i < n_fft; ++i) buf[i] = {frame[i], 0.0};
  fft_inplace(buf);
  std::vector<double> mag(n_fft / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

inline std::vector<double> power_spectrum(const double* frame, std::size_t n,
                                          std::size_t n_fft) {
  std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
  for (std::size_t i = 0; i < n && i < n_fft; ++i) buf[i] = {frame[i], 0.0};
  fft_inplace(buf);
  std::vector<double> pow(n_fft / 2 + 1);
  for (std::size_t k = 0; k < pow.size(); ++k) pow[k] = std::norm(buf[k]);
  return pow;
}

}  // namespace vocalics
