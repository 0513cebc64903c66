#include "imclean/cube.hpp"

#include "imclean/errors.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace imclean {

void FrequencyAxis::validate() const {
  if (!(width_hz > 0.0)) throw ValueError("FrequencyAxis: channel width must be > 0");
  if (n_channels < 1) throw ValueError("FrequencyAxis: need at least one channel");
  if (!std::isfinite(start_hz) || !std::isfinite(width_hz))
    throw ValueError("FrequencyAxis: non-finite frequency");
}

void SpectralCube::validate() const {
  axis.validate();
  if (data.cols() != axis.n_channels)
    throw ValueError("SpectralCube: column count " + std::to_string(data.cols()) +
                     " does not match axis channels " + std::to_string(axis.n_channels));
  if (!data.allFinite()) throw ValueError("SpectralCube: non-finite values present");
  if (grid) {
    if (grid->nx < 1 || grid->ny < 1 || !(grid->pixel_rad > 0.0))
      throw ValueError("SpectralCube: invalid sky grid");
    if (grid->nx * grid->ny != data.rows())
      throw ValueError("SpectralCube: sky grid pixel count does not match row count");
  }
}

void require_congruent(const SpectralCube& cube, const Mask& mask) {
  require_congruent(cube.data, mask.flags);
}

void require_congruent(const Matrix& data, const BoolMatrix& mask) {
  if (data.rows() != mask.rows() || data.cols() != mask.cols())
    throw ValueError("mask shape (" + std::to_string(mask.rows()) + "x" +
                     std::to_string(mask.cols()) + ") does not match data (" +
                     std::to_string(data.rows()) + "x" + std::to_string(data.cols()) + ")");
}

std::pair<SpectralCube, Mask> downsample_channels(const SpectralCube& cube,
                                                  const Mask& mask, Index factor) {
  require_congruent(cube, mask);
  if (factor < 1) throw ValueError("downsample_channels: factor must be >= 1");

  const Index n_in = cube.channels();
  const Index n_out = n_in / factor;
  if (n_out < 1) throw ValueError("downsample_channels: factor exceeds channel count");
  if (n_out * factor != n_in)
    std::fprintf(stderr, "[imclean] warning: dropping %lld trailing channels (factor %lld does not divide %lld)\n",
                 static_cast<long long>(n_in - n_out * factor), static_cast<long long>(factor),
                 static_cast<long long>(n_in));

  SpectralCube out;
  out.axis = FrequencyAxis{cube.axis.start_hz, cube.axis.width_hz * static_cast<double>(factor), n_out};
  out.grid = cube.grid;
  out.data = Matrix::Zero(cube.rows(), n_out);
  Mask out_mask = Mask::zeros(cube.rows(), n_out);

  for (Index r = 0; r < cube.rows(); ++r) {
    for (Index g = 0; g < n_out; ++g) {
      double sum = 0.0;
      Index used = 0;
      for (Index c = g * factor; c < (g + 1) * factor; ++c) {
        if (mask.flags(r, c)) continue;
        sum += cube.data(r, c);
        ++used;
      }
      if (used == 0) {
        out_mask.flags(r, g) = true;
      } else {
        out.data(r, g) = sum / static_cast<double>(used);
      }
    }
  }
  return {std::move(out), std::move(out_mask)};
}

SpectralCube fill_empty_channels(const SpectralCube& cube, const Mask& mask) {
  require_congruent(cube, mask);
  SpectralCube out = cube;

  // Channels where no row has valid data.
  std::vector<Index> empty;
  for (Index c = 0; c < cube.channels(); ++c) {
    if (mask.flags.col(c).all()) empty.push_back(c);
  }
  if (empty.empty()) return out;

  Index degenerate_rows = 0;
  for (Index r = 0; r < cube.rows(); ++r) {
    double sum = 0.0;
    Index used = 0;
    for (Index c = 0; c < cube.channels(); ++c) {
      if (mask.flags(r, c)) continue;
      sum += cube.data(r, c);
      ++used;
    }
    const double fill = used > 0 ? sum / static_cast<double>(used) : 0.0;
    if (used == 0) ++degenerate_rows;
    for (Index c : empty) out.data(r, c) = fill;
  }
  if (degenerate_rows > 0)
    std::fprintf(stderr, "[imclean] warning: %lld rows had no unmasked data; filled with 0\n",
                 static_cast<long long>(degenerate_rows));
  return out;
}

}  // namespace imclean
