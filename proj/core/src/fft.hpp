#pragma once

// Internal FFT machinery backing the fast DCT path. Not installed.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace sfm::detail {

// Iterative radix-2 decimation-in-time FFT. Size must be a power of two.
class Radix2Fft {
 public:
  explicit Radix2Fft(std::size_t n);
  std::size_t size() const { return n_; }
  void forward(std::complex<double>* a) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<std::complex<double>> w_;  // w_[k] = exp(-2*pi*i*k/n)
};

// DFT of arbitrary length: radix-2 when the length is a power of two,
// Bluestein's chirp-z algorithm otherwise.
class Dft {
 public:
  explicit Dft(std::size_t n);
  std::size_t size() const { return n_; }
  void forward(std::complex<double>* a) const;
  void inverse(std::complex<double>* a) const;  // includes the 1/n scale

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;  // Bluestein convolution length (power of two)
  bool pow2_ = false;
  std::unique_ptr<Radix2Fft> fft_;
  std::vector<std::complex<double>> chirp_;  // exp(-i*pi*k^2/n)
  std::vector<std::complex<double>> bfft_;   // FFT of the chirp filter
};

// Orthonormal 1D DCT-II (forward) and DCT-III (inverse), O(n log n).
class Dct1d {
 public:
  explicit Dct1d(int n);
  int size() const { return n_; }
  void forward(const double* in, double* out) const;
  void inverse(const double* in, double* out) const;

 private:
  int n_;
  double s0_, s1_;
  Dft dft_;
  std::vector<std::complex<double>> twiddle_;  // exp(-i*pi*k/(2n))
};

}  // namespace sfm::detail
