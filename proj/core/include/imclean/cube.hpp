#pragma once

#include <Eigen/Core>

#include <optional>
#include <utility>

namespace imclean {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

/// Evenly spaced frequency channels; channel i is centred at
/// start_hz + (i + 0.5) * width_hz.
struct FrequencyAxis {
  double start_hz = 0.0;
  double width_hz = 0.0;
  Index n_channels = 0;

  double frequency(Index channel) const {
    return start_hz + (static_cast<double>(channel) + 0.5) * width_hz;
  }
  void validate() const;
  bool operator==(const FrequencyAxis&) const = default;
};

/// Optional 2-D sky layout of the cube rows (row-major nx * ny pixels).
struct SkyGrid {
  Index nx = 0;
  Index ny = 0;
  double pixel_rad = 0.0;
  bool operator==(const SkyGrid&) const = default;
};

/// A (lines-of-sight x channels) brightness-temperature array in mK.
struct SpectralCube {
  Matrix data;
  FrequencyAxis axis;
  std::optional<SkyGrid> grid;

  Index rows() const { return data.rows(); }
  Index channels() const { return data.cols(); }
  void validate() const;
  bool operator==(const SpectralCube&) const = default;
};

/// Boolean flags congruent with a cube; true = contaminated.
struct Mask {
  BoolMatrix flags;

  Index rows() const { return flags.rows(); }
  Index channels() const { return flags.cols(); }
  Index count() const { return flags.count(); }
  double fraction() const {
    return flags.size() == 0 ? 0.0
                             : static_cast<double>(flags.count()) /
                                   static_cast<double>(flags.size());
  }
  static Mask zeros(Index rows, Index cols) { return Mask{BoolMatrix::Constant(rows, cols, false)}; }
};

/// A fixed-size (cycles x channels) window cut from a cube.
struct PatchSample {
  Matrix data;
  BoolMatrix mask;
  double masked_fraction = 0.0;
  Index origin_row = 0;
  Index origin_channel = 0;
};

/// Throws ValueError unless mask shape matches the cube.
void require_congruent(const SpectralCube& cube, const Mask& mask);
void require_congruent(const Matrix& data, const BoolMatrix& mask);

/// Averages every `factor` channels into one, skipping masked cells.
/// Output mask is set where a whole channel group is masked. A trailing
/// remainder group (factor not dividing n_channels) is dropped with a
/// warning.
std::pair<SpectralCube, Mask> downsample_channels(const SpectralCube& cube,
                                                  const Mask& mask, Index factor);

/// Replaces every fully-masked channel with per-row means over that row's
/// unmasked cells. Rows without any unmasked cell get 0. Partially masked
/// channels are left untouched.
SpectralCube fill_empty_channels(const SpectralCube& cube, const Mask& mask);

}  // namespace imclean
