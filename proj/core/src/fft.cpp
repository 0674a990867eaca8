#include "fft.hpp"

#include <cmath>
#include <stdexcept>

namespace sfm::detail {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Radix2Fft::Radix2Fft(std::size_t n) : n_(n) {
  if (!is_pow2(n)) throw std::invalid_argument("Radix2Fft: size must be a power of two");
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  rev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1) << (log2n - 1 - b);
    rev_[i] = r;
  }
  w_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    w_[k] = {std::cos(ang), std::sin(ang)};
  }
}

void Radix2Fft::forward(std::complex<double>* a) const {
  for (std::size_t i = 0; i < n_; ++i)
    if (rev_[i] > i) std::swap(a[i], a[rev_[i]]);
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> t = w_[k * step] * a[start + k + half];
        const std::complex<double> u = a[start + k];
        a[start + k] = u + t;
        a[start + k + half] = u - t;
      }
    }
  }
}

Dft::Dft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("Dft: size must be >= 1");
  if (is_pow2(n)) {
    pow2_ = true;
    fft_ = std::make_unique<Radix2Fft>(n);
    return;
  }
  m_ = 1;
  while (m_ < 2 * n - 1) m_ <<= 1;
  fft_ = std::make_unique<Radix2Fft>(m_);
  chirp_.resize(n);
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small; exp(-i*pi*q/n) is 2n-periodic in q.
    const std::uint64_t q = (static_cast<std::uint64_t>(k) * k) % two_n;
    const double ang = -M_PI * static_cast<double>(q) / static_cast<double>(n);
    chirp_[k] = {std::cos(ang), std::sin(ang)};
  }
  bfft_.assign(m_, {0.0, 0.0});
  bfft_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) bfft_[k] = bfft_[m_ - k] = std::conj(chirp_[k]);
  fft_->forward(bfft_.data());
}

void Dft::forward(std::complex<double>* a) const {
  if (n_ == 1) return;
  if (pow2_) {
    fft_->forward(a);
    return;
  }
  std::vector<std::complex<double>> buf(m_, {0.0, 0.0});
  for (std::size_t k = 0; k < n_; ++k) buf[k] = a[k] * chirp_[k];
  fft_->forward(buf.data());
  for (std::size_t k = 0; k < m_; ++k) buf[k] *= bfft_[k];
  // Inverse FFT of the product via conjugation.
  for (std::size_t k = 0; k < m_; ++k) buf[k] = std::conj(buf[k]);
  fft_->forward(buf.data());
  const double inv_m = 1.0 / static_cast<double>(m_);
  for (std::size_t k = 0; k < n_; ++k) a[k] = std::conj(buf[k]) * inv_m * chirp_[k];
}

void Dft::inverse(std::complex<double>* a) const {
  for (std::size_t k = 0; k < n_; ++k) a[k] = std::conj(a[k]);
  forward(a);
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t k = 0; k < n_; ++k) a[k] = std::conj(a[k]) * inv_n;
}

Dct1d::Dct1d(int n)
    : n_(n),
      s0_(n > 0 ? std::sqrt(1.0 / n) : 0.0),
      s1_(n > 0 ? std::sqrt(2.0 / n) : 0.0),
      dft_(static_cast<std::size_t>(n > 0 ? n : 1)) {
  if (n < 1) throw std::invalid_argument("Dct1d: size must be >= 1");
  twiddle_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double ang = -M_PI * k / (2.0 * n);
    twiddle_[k] = {std::cos(ang), std::sin(ang)};
  }
}

// DCT-II via a same-length DFT of the even/odd reordered sequence
// v = [x0, x2, x4, ..., x5, x3, x1]:
//   C[k] = scale(k) * Re(exp(-i*pi*k/(2n)) * DFT(v)[k])
void Dct1d::forward(const double* in, double* out) const {
  if (n_ == 1) {
    out[0] = in[0];
    return;
  }
  std::vector<std::complex<double>> v(n_);
  int j = 0;
  for (int i = 0; i < n_; i += 2) v[j++] = in[i];
  j = n_ - 1;
  for (int i = 1; i < n_; i += 2) v[j--] = in[i];
  dft_.forward(v.data());
  out[0] = v[0].real() * s0_;
  for (int k = 1; k < n_; ++k) out[k] = (twiddle_[k] * v[k]).real() * s1_;
}

// Inverse of the mapping above. The DFT bins are rebuilt from the
// coefficients using the Hermitian symmetry of the reordered sequence:
//   V[k] = exp(+i*pi*k/(2n)) * (Chat[k] - i*Chat[n-k]),  V[0] = Chat[0].
void Dct1d::inverse(const double* in, double* out) const {
  if (n_ == 1) {
    out[0] = in[0];
    return;
  }
  std::vector<std::complex<double>> v(n_);
  v[0] = in[0] / s0_;
  for (int k = 1; k < n_; ++k) {
    const std::complex<double> c(in[k] / s1_, -in[n_ - k] / s1_);
    v[k] = std::conj(twiddle_[k]) * c;
  }
  dft_.inverse(v.data());
  int j = 0;
  for (int i = 0; i < n_; i += 2) out[i] = v[j++].real();
  j = n_ - 1;
  for (int i = 1; i < n_; i += 2) out[i] = v[j--].real();
}

}  // namespace sfm::detail
