#pragma once

#include "imclean/cube.hpp"

#include <optional>
#include <vector>

namespace imclean::eval {

/// Root mean square about zero: sqrt(mean(x^2)).
double rms(const Matrix& values);

/// Per-bin order statistics of a metric, binned by masked fraction.
struct FractionBinStats {
  std::vector<double> edges;      // size n_bins + 1
  std::vector<Index> counts;      // size n_bins
  std::vector<double> p25, median, p75;  // NaN where count == 0
};

/// Bins (masked_fraction, value) pairs into [edges[i], edges[i+1]) intervals
/// (the last bin is closed on the right) and reports linearly interpolated
/// 25/50/75th percentiles per bin.
FractionBinStats bin_by_masked_fraction(
    const std::vector<std::pair<double, double>>& samples,
    const std::vector<double>& edges);

/// Default fraction bin edges: 0 to 0.4 in steps of 0.05.
std::vector<double> default_fraction_edges();

/// Ratio of the predicted-vs-foreground Pearson correlation over masked
/// cells to the one over unmasked cells. Ideal value 1.
double cm_cu(const Matrix& predicted, const Matrix& truth_foreground, const Mask& mask);

/// Single global-window SSIM with c1 = (k1 L)^2, c2 = (k2 L)^2.
double ssim(const Matrix& x, const Matrix& y, double dynamic_range,
            double k1 = 0.01, double k2 = 0.03);

/// Mean SSIM over all window x window patches (stride 1, uniform weights).
double ssim_sliding(const Matrix& x, const Matrix& y, double dynamic_range,
                    Index window, double k1 = 0.01, double k2 = 0.03);

/// 10 log10(MAX^2 / MSE) [dB]; +infinity when the inputs match exactly.
double psnr(const Matrix& x, const Matrix& y, double max_value);

/// Binned flat-sky angular power spectrum estimate.
struct ClEstimate {
  std::vector<double> bin_centers;  // mean multipole of the modes in each bin
  std::vector<double> cl;           // [mK^2]
  std::vector<Index> mode_counts;
  double pixel_rad = 0.0;
  double map_area_sr = 0.0;
};

/// a(l) = pixel^2 DFT(map); Cl = |a|^2 / Omega averaged over annuli
/// l = 2 pi |u|, zero mode excluded. Bins follow the same half-open
/// convention as bin_by_masked_fraction; empty bins are dropped.
ClEstimate angular_power_spectrum(const Matrix& map, double pixel_rad,
                                  const std::vector<double>& bin_edges);

struct SpectrumComparison {
  ClEstimate residual;   // channel-averaged
  ClEstimate fiducial;   // channel-averaged
  double mean_abs_dlog10 = 0.0;
  Index bins_compared = 0;
  Index bins_excluded = 0;  // non-positive Cl on either side
};

/// Channel-by-channel spectra of two congruent sky cubes, averaged over
/// channels, plus the mean |log10 residual - log10 fiducial| across bins.
SpectrumComparison spectrum_comparison(const SpectralCube& residual_cube,
                                       const SpectralCube& fiducial_cube,
                                       const std::vector<double>& bin_edges);

}  // namespace imclean::eval
