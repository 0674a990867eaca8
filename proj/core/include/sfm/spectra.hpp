#pragma once

// Frequency-domain analysis: radial PSD profiles, power-law fits, SNR curves,
// band splitting, and band-wise PSD gaps.

#include <cstdint>
#include <utility>
#include <vector>

#include "sfm/image.hpp"

namespace sfm {

// Radially binned power profile. bin_edges has values.size() + 1 entries and
// spans [0, 1] in units of the grid's nominal maximum radius
// r_max = sqrt(H^2 + W^2). values[i] is the mean squared DCT coefficient over
// the cells whose normalized radius falls in [edges[i], edges[i+1]); counts[i]
// is how many cells landed there (0 means the bin is empty and values[i] is 0).
struct RadialProfile {
  std::vector<double> bin_edges;
  std::vector<double> values;
  std::vector<std::int64_t> counts;

  int bins() const { return static_cast<int>(values.size()); }
  double center(int i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

enum class PsdWindow { none, hann };

// Mean-removed DCT periodogram, averaged over channels and radial bins. The
// DC cell is excluded (mean removal leaves it empty of signal). With the Hann
// window the squared spectrum is rescaled by N / sum(w^2) so broadband levels
// stay comparable to the unwindowed estimate. Requires min(H, W) >= 8 and
// bins >= 4.
RadialProfile radial_psd(const Image& img, int bins, PsdWindow window = PsdWindow::none);

struct PowerLawFit {
  double alpha = 0.0;      // S(r) ~ amplitude * r^(-alpha)
  double amplitude = 0.0;
  double r_lo = 0.0, r_hi = 0.0;
  double residual = 0.0;   // RMS residual in log space
};

// Least-squares line in log-log space over bins whose centers lie in
// [r_lo, r_hi]; empty and non-positive bins are skipped. Needs r_lo > 0 and at
// least four usable bins in range.
PowerLawFit fit_power_law(const RadialProfile& profile, double r_lo, double r_hi);

// Per-bin SNR against the flat noise PSD implied by AWGN of the given sigma
// (level sigma^2, in the squared sample units of the profile's source image).
RadialProfile snr_curve(const RadialProfile& signal, double noise_sigma);

// Splits an image into complementary DCT bands: low gets every coefficient
// with radius < cutoff (absolute units, like MaskSpec radii), high gets the
// rest. low + high reconstructs the image and the band energies are additive.
std::pair<Image, Image> band_split(const Image& img, double cutoff);

struct SpectralGap {
  double mean_db = 0.0;  // mean of 10*log10(ref/cand) over usable bins in band
  int bins_used = 0;
  int bins_excluded = 0;  // bins skipped for a zero reference or candidate
};

// Band-wise PSD gap between two profiles with identical binning. Positive
// values mean the candidate is missing energy relative to the reference.
// Bins where either side is zero would be +/-inf and are excluded from the
// mean but reported in bins_excluded.
SpectralGap spectral_gap(const RadialProfile& reference, const RadialProfile& candidate,
                         double r_lo, double r_hi);

}  // namespace sfm
