#include "sfm/spectra.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfm/transform.hpp"

namespace sfm {

RadialProfile radial_psd(const Image& img, int bins, PsdWindow window) {
  validate_image(img, "radial_psd");
  if (img.height < 8 || img.width < 8)
    throw std::invalid_argument("radial_psd: image must be at least 8x8");
  if (bins < 4) throw std::invalid_argument("radial_psd: need at least 4 bins");

  Image work = img;
  double win_power = 1.0;
  for (int c = 0; c < work.channels; ++c) {
    const double m = channel_mean(work, c);
    double* p = work.plane(c);
    const std::size_t n = work.plane_size();
    for (std::size_t i = 0; i < n; ++i) p[i] -= m;
  }
  if (window == PsdWindow::hann) {
    std::vector<double> wy(work.height), wx(work.width);
    for (int y = 0; y < work.height; ++y)
      wy[y] = 0.5 - 0.5 * std::cos(2.0 * M_PI * y / (work.height - 1));
    for (int x = 0; x < work.width; ++x)
      wx[x] = 0.5 - 0.5 * std::cos(2.0 * M_PI * x / (work.width - 1));
    double sumsq = 0.0;
    for (int y = 0; y < work.height; ++y)
      for (int x = 0; x < work.width; ++x) sumsq += wy[y] * wy[y] * wx[x] * wx[x];
    win_power = sumsq / static_cast<double>(work.plane_size());
    for (int c = 0; c < work.channels; ++c)
      for (int y = 0; y < work.height; ++y)
        for (int x = 0; x < work.width; ++x) work.at(y, x, c) *= wy[y] * wx[x];
  }

  const Spectrum spec = dct2_forward(work);
  const double r_max = std::hypot(static_cast<double>(img.height),
                                  static_cast<double>(img.width));
  RadialProfile prof;
  prof.bin_edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i)
    prof.bin_edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  prof.values.assign(bins, 0.0);
  prof.counts.assign(bins, 0);
  std::vector<double> acc(bins, 0.0);
  for (int c = 0; c < spec.channels; ++c) {
    for (int u = 0; u < spec.height; ++u) {
      for (int v = 0; v < spec.width; ++v) {
        if (u == 0 && v == 0) continue;  // DC carries no signal after mean removal
        const double rho = std::hypot(static_cast<double>(u), static_cast<double>(v)) / r_max;
        int idx = static_cast<int>(rho * bins);
        if (idx >= bins) idx = bins - 1;
        const double cv = spec.at(u, v, c);
        acc[idx] += cv * cv;
        ++prof.counts[idx];
      }
    }
  }
  for (int i = 0; i < bins; ++i)
    if (prof.counts[i] > 0)
      prof.values[i] = acc[i] / (static_cast<double>(prof.counts[i]) * win_power);
  return prof;
}

PowerLawFit fit_power_law(const RadialProfile& profile, double r_lo, double r_hi) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo))
    throw std::invalid_argument("fit_power_law: need 0 < r_lo < r_hi");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (int i = 0; i < profile.bins(); ++i) {
    const double c = profile.center(i);
    if (c < r_lo || c > r_hi) continue;
    if (profile.counts[i] <= 0 || !(profile.values[i] > 0.0)) continue;
    const double x = std::log(c);
    const double y = std::log(profile.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 4)
    throw std::invalid_argument("fit_power_law: fewer than 4 usable bins in range");
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  PowerLawFit fit;
  fit.alpha = -slope;
  fit.amplitude = std::exp(intercept);
  fit.r_lo = r_lo;
  fit.r_hi = r_hi;
  double rss = 0.0;
  for (int i = 0; i < profile.bins(); ++i) {
    const double c = profile.center(i);
    if (c < r_lo || c > r_hi) continue;
    if (profile.counts[i] <= 0 || !(profile.values[i] > 0.0)) continue;
    const double resid = std::log(profile.values[i]) - (intercept + slope * std::log(c));
    rss += resid * resid;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

RadialProfile snr_curve(const RadialProfile& signal, double noise_sigma) {
  if (!(noise_sigma > 0.0))
    throw std::invalid_argument("snr_curve: noise_sigma must be > 0");
  RadialProfile snr = signal;
  const double level = noise_sigma * noise_sigma;
  for (double& v : snr.values) v /= level;
  return snr;
}

std::pair<Image, Image> band_split(const Image& img, double cutoff) {
  validate_image(img, "band_split");
  if (!(cutoff >= 0.0)) throw std::invalid_argument("band_split: cutoff must be >= 0");
  Spectrum low = dct2_forward(img);
  Spectrum high = low;
  for (int c = 0; c < low.channels; ++c) {
    for (int u = 0; u < low.height; ++u) {
      for (int v = 0; v < low.width; ++v) {
        const double r = std::hypot(static_cast<double>(u), static_cast<double>(v));
        if (r < cutoff)
          high.at(u, v, c) = 0.0;
        else
          low.at(u, v, c) = 0.0;
      }
    }
  }
  return {dct2_inverse(low), dct2_inverse(high)};
}

SpectralGap spectral_gap(const RadialProfile& reference, const RadialProfile& candidate,
                         double r_lo, double r_hi) {
  if (reference.bin_edges.size() != candidate.bin_edges.size())
    throw std::invalid_argument("spectral_gap: profiles use different binning");
  for (std::size_t i = 0; i < reference.bin_edges.size(); ++i)
    if (std::abs(reference.bin_edges[i] - candidate.bin_edges[i]) > 1e-12)
      throw std::invalid_argument("spectral_gap: profiles use different binning");
  if (!(r_hi > r_lo)) throw std::invalid_argument("spectral_gap: need r_lo < r_hi");
  SpectralGap gap;
  double acc = 0.0;
  bool any_in_band = false;
  for (int i = 0; i < reference.bins(); ++i) {
    const double c = reference.center(i);
    if (c < r_lo || c > r_hi) continue;
    if (reference.counts[i] <= 0 || candidate.counts[i] <= 0) continue;
    any_in_band = true;
    if (!(reference.values[i] > 0.0) || !(candidate.values[i] > 0.0)) {
      ++gap.bins_excluded;  // ratio would be +/-inf
      continue;
    }
    acc += 10.0 * std::log10(reference.values[i] / candidate.values[i]);
    ++gap.bins_used;
  }
  if (!any_in_band)
    throw std::invalid_argument("spectral_gap: no populated bins inside the band");
  gap.mean_db = gap.bins_used > 0 ? acc / gap.bins_used
                                  : std::numeric_limits<double>::quiet_NaN();
  return gap;
}

}  // namespace sfm
