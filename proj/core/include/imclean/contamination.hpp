#pragma once

#include "imclean/cube.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace imclean::contam {

/// Synthetic interference model standing in for transplanted real RFI.
struct RfiModel {
  double broadband_rate = 0.0;          // expected bursts per 1000 cycles
  Index broadband_width_min = 4;        // burst extent in channels
  Index broadband_width_max = 32;
  double narrowband_channel_prob = 0.0; // chance a channel is persistently bad
  double outlier_rate = 0.0;            // per-cell probability
  double amplitude_scale_min = 10.0;    // in multiples of the clean-data RMS
  double amplitude_scale_max = 1000.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FlagReport {
  Mask mask;
  std::vector<Index> flagged_channels;
  Index outlier_count = 0;
  int iterations = 0;
};

/// Adds synthetic RFI; the returned truth mask marks exactly the modified
/// cells. Amplitudes are positive, log-uniform in
/// [amplitude_scale_min, amplitude_scale_max] x RMS(cube).
std::pair<SpectralCube, Mask> inject_rfi(const SpectralCube& cube, const RfiModel& model);

/// Transplants recorded interference instead of the synthetic model: adds
/// rfi_template values to the cube wherever template_mask is set. Shapes
/// must be congruent.
std::pair<SpectralCube, Mask> apply_rfi_template(const SpectralCube& cube,
                                                 const SpectralCube& rfi_template,
                                                 const Mask& template_mask);

/// Flags channels whose mean lies outside mean +- 3 sigma of the channel
/// means, iterating on the surviving channels (up to max_iterations, or a
/// single pass for the literal one-shot rule).
FlagReport flag_channels(const SpectralCube& cube, int max_iterations = 10);

/// Flags cells outside mean +- 3 sigma of their row, with row statistics
/// over cells not already in prior_mask (or over everything, for the
/// include-all compatibility mode). Single pass; fully masked rows are
/// skipped. The returned mask holds only the newly flagged cells.
FlagReport flag_outliers(const SpectralCube& cube, const Mask& prior_mask,
                         bool include_masked_in_stats = false);

/// Element-wise OR of two congruent masks.
Mask combine_flags(const Mask& a, const Mask& b);

/// Draws floor(3 n1 n2 / S^2) random S x S windows; windows whose masked
/// fraction exceeds max_fraction are discarded without replacement.
std::vector<PatchSample> extract_patches(const SpectralCube& cube, const Mask& mask,
                                         Index patch_size = 256, double max_fraction = 0.40,
                                         std::uint64_t seed = 0);

/// Persists patches as cube/mask file pairs plus an index CSV with columns
/// id, origin_row, origin_channel, masked_fraction.
void write_patches(const std::filesystem::path& dir, const std::vector<PatchSample>& patches,
                   const FrequencyAxis& axis);
std::vector<PatchSample> read_patches(const std::filesystem::path& dir);

/// Index CSV only (no payload files); used when full patch export is off.
void write_patch_index(const std::filesystem::path& csv_path,
                       const std::vector<PatchSample>& patches,
                       const std::string& config_hash = {});

}  // namespace imclean::contam
