#include "imclean/evaluate.hpp"

#include "imclean/errors.hpp"
#include "imclean/parallel.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace imclean::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double interpolated_percentile(std::vector<double>& values, double q) {
  // Linear interpolation between order statistics, matching the common
  // numpy convention: position q * (n - 1).
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 1) return values[0];
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double w = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

// Bin index with half-open intervals [e_i, e_{i+1}); the last bin includes
// its upper edge. Returns -1 when out of range.
Index bin_index(double x, const std::vector<double>& edges) {
  if (x < edges.front() || x > edges.back()) return -1;
  if (x == edges.back()) return static_cast<Index>(edges.size()) - 2;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  return static_cast<Index>(it - edges.begin()) - 1;
}

struct Moments {
  double mean_x, mean_y, var_x, var_y, cov;
  std::size_t n;
};

template <typename Pick>
Moments accumulate_moments(const Matrix& x, const Matrix& y, Pick pick) {
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (Index r = 0; r < x.rows(); ++r)
    for (Index c = 0; c < x.cols(); ++c) {
      if (!pick(r, c)) continue;
      sx += x(r, c);
      sy += y(r, c);
      ++n;
    }
  Moments m{};
  m.n = n;
  if (n == 0) return m;
  m.mean_x = sx / static_cast<double>(n);
  m.mean_y = sy / static_cast<double>(n);
  double vxx = 0, vyy = 0, vxy = 0;
  for (Index r = 0; r < x.rows(); ++r)
    for (Index c = 0; c < x.cols(); ++c) {
      if (!pick(r, c)) continue;
      const double dx = x(r, c) - m.mean_x;
      const double dy = y(r, c) - m.mean_y;
      vxx += dx * dx;
      vyy += dy * dy;
      vxy += dx * dy;
    }
  m.var_x = vxx / static_cast<double>(n);
  m.var_y = vyy / static_cast<double>(n);
  m.cov = vxy / static_cast<double>(n);
  return m;
}

// Pearson r as sign(cov) * sqrt(cov^2 / (var_x var_y)): exact 1.0 for
// bitwise-identical inputs.
double pearson(const Moments& m, const char* region) {
  if (m.n < 2) throw ValueError(std::string("cm_cu: need >= 2 cells in ") + region);
  if (m.var_x == 0.0 || m.var_y == 0.0)
    throw ValueError(std::string("cm_cu: zero variance in ") + region);
  const double r2 = (m.cov * m.cov) / (m.var_x * m.var_y);
  return std::copysign(std::sqrt(r2), m.cov);
}

}  // namespace

double rms(const Matrix& values) {
  if (values.size() == 0) throw ValueError("rms: empty input");
  return std::sqrt(values.array().square().sum() / static_cast<double>(values.size()));
}

std::vector<double> default_fraction_edges() {
  std::vector<double> edges;
  for (int i = 0; i <= 8; ++i) edges.push_back(0.05 * i);
  return edges;
}

FractionBinStats bin_by_masked_fraction(
    const std::vector<std::pair<double, double>>& samples,
    const std::vector<double>& edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
    throw ValueError("bin_by_masked_fraction: edges must be increasing");
  const std::size_t n_bins = edges.size() - 1;
  std::vector<std::vector<double>> buckets(n_bins);
  for (const auto& [fraction, value] : samples) {
    const Index b = bin_index(fraction, edges);
    if (b >= 0) buckets[static_cast<std::size_t>(b)].push_back(value);
  }
  FractionBinStats out;
  out.edges = edges;
  out.counts.resize(n_bins);
  out.p25.assign(n_bins, kNaN);
  out.median.assign(n_bins, kNaN);
  out.p75.assign(n_bins, kNaN);
  for (std::size_t b = 0; b < n_bins; ++b) {
    out.counts[b] = static_cast<Index>(buckets[b].size());
    if (buckets[b].empty()) continue;
    out.p25[b] = interpolated_percentile(buckets[b], 0.25);
    out.median[b] = interpolated_percentile(buckets[b], 0.50);
    out.p75[b] = interpolated_percentile(buckets[b], 0.75);
  }
  return out;
}

double cm_cu(const Matrix& predicted, const Matrix& truth_foreground, const Mask& mask) {
  require_congruent(predicted, mask.flags);
  require_congruent(truth_foreground, mask.flags);
  const auto masked = accumulate_moments(predicted, truth_foreground,
                                         [&](Index r, Index c) { return mask.flags(r, c); });
  const auto unmasked = accumulate_moments(predicted, truth_foreground,
                                           [&](Index r, Index c) { return !mask.flags(r, c); });
  const double c_m = pearson(masked, "masked region");
  const double c_u = pearson(unmasked, "unmasked region");
  if (std::abs(c_u) < 1e-12) throw ValueError("cm_cu: unmasked correlation vanishes");
  return c_m / c_u;
}

double ssim(const Matrix& x, const Matrix& y, double dynamic_range, double k1, double k2) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw ValueError("ssim: shape mismatch");
  if (!(dynamic_range > 0.0)) throw ValueError("ssim: dynamic range must be > 0");
  const auto m = accumulate_moments(x, y, [](Index, Index) { return true; });
  const double c1 = (k1 * dynamic_range) * (k1 * dynamic_range);
  const double c2 = (k2 * dynamic_range) * (k2 * dynamic_range);
  const double num = (2.0 * m.mean_x * m.mean_y + c1) * (2.0 * m.cov + c2);
  const double den = (m.mean_x * m.mean_x + m.mean_y * m.mean_y + c1) * (m.var_x + m.var_y + c2);
  return num / den;
}

double ssim_sliding(const Matrix& x, const Matrix& y, double dynamic_range, Index window,
                    double k1, double k2) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw ValueError("ssim: shape mismatch");
  if (window < 2 || window > x.rows() || window > x.cols())
    throw ValueError("ssim_sliding: window out of range");
  double total = 0.0;
  Index count = 0;
  for (Index r = 0; r + window <= x.rows(); ++r)
    for (Index c = 0; c + window <= x.cols(); ++c) {
      total += ssim(x.block(r, c, window, window), y.block(r, c, window, window),
                    dynamic_range, k1, k2);
      ++count;
    }
  return total / static_cast<double>(count);
}

double psnr(const Matrix& x, const Matrix& y, double max_value) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw ValueError("psnr: shape mismatch");
  if (!(max_value > 0.0)) throw ValueError("psnr: max value must be > 0");
  const double mse = (x - y).array().square().sum() / static_cast<double>(x.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse);
}

ClEstimate angular_power_spectrum(const Matrix& map, double pixel_rad,
                                  const std::vector<double>& bin_edges) {
  if (map.rows() != map.cols()) throw ValueError("angular_power_spectrum: map must be square");
  if (!(pixel_rad > 0.0)) throw ValueError("angular_power_spectrum: pixel size must be > 0");
  if (bin_edges.size() < 2 || !std::is_sorted(bin_edges.begin(), bin_edges.end()))
    throw ValueError("angular_power_spectrum: edges must be increasing");

  const Index n = map.rows();
  const double area = static_cast<double>(n) * static_cast<double>(n) * pixel_rad * pixel_rad;
  const double du = 1.0 / (static_cast<double>(n) * pixel_rad);
  const double pix2 = pixel_rad * pixel_rad;

  const auto spectrum = fft::forward_2d(map.data(), static_cast<int>(n));

  const std::size_t n_bins = bin_edges.size() - 1;
  std::vector<double> power(n_bins, 0.0), l_sum(n_bins, 0.0);
  std::vector<Index> counts(n_bins, 0);
  for (Index ky = 0; ky < n; ++ky) {
    const double fy = static_cast<double>(ky <= n / 2 ? ky : ky - n) * du;
    for (Index kx = 0; kx < n; ++kx) {
      if (ky == 0 && kx == 0) continue;
      const double fx = static_cast<double>(kx <= n / 2 ? kx : kx - n) * du;
      const double l = 2.0 * std::numbers::pi * std::hypot(fx, fy);
      const Index b = bin_index(l, bin_edges);
      if (b < 0) continue;
      const std::complex<double> a = pix2 * spectrum[static_cast<std::size_t>(ky * n + kx)];
      power[static_cast<std::size_t>(b)] += std::norm(a) / area;
      l_sum[static_cast<std::size_t>(b)] += l;
      ++counts[static_cast<std::size_t>(b)];
    }
  }

  ClEstimate out;
  out.pixel_rad = pixel_rad;
  out.map_area_sr = area;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (counts[b] == 0) continue;
    out.bin_centers.push_back(l_sum[b] / static_cast<double>(counts[b]));
    out.cl.push_back(power[b] / static_cast<double>(counts[b]));
    out.mode_counts.push_back(counts[b]);
  }
  return out;
}

namespace {

// Channel-averaged spectrum of a gridded cube.
ClEstimate channel_averaged_spectrum(const SpectralCube& cube,
                                     const std::vector<double>& bin_edges) {
  if (!cube.grid || cube.grid->nx != cube.grid->ny)
    throw ValueError("spectrum_comparison: cube needs a square sky grid");
  const Index n = cube.grid->nx;
  const Index n_ch = cube.channels();
  std::vector<ClEstimate> per_channel(static_cast<std::size_t>(n_ch));
  parallel_for(static_cast<std::size_t>(n_ch), [&](std::size_t c) {
    Matrix map(n, n);
    for (Index p = 0; p < n * n; ++p) map(p / n, p % n) = cube.data(p, static_cast<Index>(c));
    per_channel[c] = angular_power_spectrum(map, cube.grid->pixel_rad, bin_edges);
  });
  ClEstimate avg = per_channel[0];
  for (std::size_t c = 1; c < per_channel.size(); ++c) {
    if (per_channel[c].cl.size() != avg.cl.size())
      throw Error("spectrum_comparison: inconsistent bins across channels");
    for (std::size_t b = 0; b < avg.cl.size(); ++b) avg.cl[b] += per_channel[c].cl[b];
  }
  for (auto& v : avg.cl) v /= static_cast<double>(n_ch);
  return avg;
}

}  // namespace

SpectrumComparison spectrum_comparison(const SpectralCube& residual_cube,
                                       const SpectralCube& fiducial_cube,
                                       const std::vector<double>& bin_edges) {
  if (residual_cube.rows() != fiducial_cube.rows() ||
      residual_cube.channels() != fiducial_cube.channels())
    throw ValueError("spectrum_comparison: cubes must be congruent");
  SpectrumComparison out;
  out.residual = channel_averaged_spectrum(residual_cube, bin_edges);
  out.fiducial = channel_averaged_spectrum(fiducial_cube, bin_edges);
  double sum = 0.0;
  for (std::size_t b = 0; b < out.residual.cl.size(); ++b) {
    const double r = out.residual.cl[b];
    const double f = out.fiducial.cl[b];
    if (r <= 0.0 || f <= 0.0) {
      ++out.bins_excluded;
      continue;
    }
    sum += std::abs(std::log10(r) - std::log10(f));
    ++out.bins_compared;
  }
  out.mean_abs_dlog10 = out.bins_compared > 0 ? sum / static_cast<double>(out.bins_compared) : 0.0;
  return out;
}

}  // namespace imclean::eval
