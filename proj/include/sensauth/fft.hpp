#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace sensauth {

// In-place iterative radix-2 Cooley-Tukey. Size must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

// DFT of a real series of arbitrary length. Power-of-two sizes go straight
// to radix-2; everything else through Bluestein's chirp-z transform, so cost
// stays O(n log n) for the window lengths segmentation produces.
inline std::vector<std::complex<double>> dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  if (n == 0) return out;
  if (n == 1) {
    out[0] = {x[0], 0.0};
    return out;
  }
  if ((n & (n - 1)) == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = {x[i], 0.0};
    fft_pow2(out, false);
    return out;
  }

  // Bluestein: X_k = conj(c_k) * (a ⊛ b)_k with a_j = x_j c_j,
  // b_j = conj(c_j), c_j = exp(-i pi j^2 / n). j^2 taken mod 2n keeps the
  // angle argument small.
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = (j * j) % (2 * n);
    const double ang = -std::numbers::pi * static_cast<double>(jm) / static_cast<double>(n);
    chirp[j] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<std::complex<double>> a(m), b(m);
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = x[j] * chirp[j];
    b[j] = std::conj(chirp[j]);
    if (j != 0) b[m - j] = std::conj(chirp[j]);
  }
  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
  fft_pow2(a, true);
  for (std::size_t k = 0; k < n; ++k) out[k] = std::conj(chirp[k]) * a[k];
  return out;
}

}  // namespace sensauth
