#pragma once

#include "imclean/cube.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace imclean::restore {

/// Fills masked cells from surrounding data. Contract: unmasked cells are
/// returned bit-identical, the output is finite everywhere, and the result
/// is deterministic in the inputs.
class Restorer {
 public:
  virtual ~Restorer() = default;
  virtual std::string name() const = 0;
  virtual Matrix restore(const Matrix& data, const Mask& mask) const = 0;
};

/// Masked cells <- mean of the row's unmasked cells; fully masked rows fall
/// back to the global unmasked mean, or 0 when nothing is unmasked.
Matrix mean_fill_restore(const Matrix& data, const Mask& mask);

struct PolyRestoreResult {
  Matrix restored;
  Index fallback_rows = 0;  // rows with too few unmasked cells for the fit
};

/// Per-row least-squares polynomial over the unmasked cells, evaluated at
/// the masked ones. Channel index is normalized to [-1, 1] before fitting.
/// Unflagged interference would wreck a plain fit, so cells deviating by
/// more than clip_sigma robust sigmas are dropped and the fit repeated
/// (clip_rounds times; 0 = plain least squares). Rows with fewer than
/// order+1 usable cells fall back to mean filling.
PolyRestoreResult spectral_poly_restore(const Matrix& data, const Mask& mask, int order = 2,
                                        double clip_sigma = 4.0, int clip_rounds = 2);

struct LowRankRestoreResult {
  Matrix restored;
  int iterations = 0;
  bool converged = false;
};

/// Iterative truncated-SVD completion: masked cells start at the mean fill
/// and are repeatedly replaced by the rank-r reconstruction until their RMS
/// change drops below tol * RMS(data).
LowRankRestoreResult low_rank_restore(const Matrix& data, const Mask& mask, Index rank = 4,
                                      double tol = 1e-6, int max_iter = 100);

struct IngestReport {
  bool accepted = false;
  double max_deviation = 0.0;
  Index deviating_cells = 0;
};

/// Validates an externally restored cube (e.g. a DNN output): unmasked
/// cells must match the original within tolerance * max|original|;
/// anything else is rejected. On rejection a CSV report
/// (row, channel, expected, found, deviation) is written next to the
/// restored file when report_path is non-empty.
Matrix ingest_external_restoration(const Matrix& original, const Mask& mask,
                                   const std::filesystem::path& restored_path,
                                   double tolerance = 1e-6,
                                   const std::filesystem::path& report_path = {},
                                   IngestReport* report = nullptr);

/// Restorer wrappers.
std::unique_ptr<Restorer> make_mean_fill_restorer();
std::unique_ptr<Restorer> make_spectral_poly_restorer(int order = 2);
std::unique_ptr<Restorer> make_low_rank_restorer(Index rank = 4, double tol = 1e-6,
                                                 int max_iter = 100);
std::unique_ptr<Restorer> make_external_restorer(std::filesystem::path restored_path,
                                                 double tolerance = 1e-6);

/// Ties one restoration to its correlation-metric inputs.
struct RestorationRecord {
  std::string restorer_name;
  double masked_fraction = 0.0;
  const Matrix* predicted = nullptr;
  const Matrix* truth_foreground = nullptr;
  const Mask* mask = nullptr;

  /// Throws unless all references are set and shape-congruent.
  void validate() const;
};

struct DatasetVariants {
  SpectralCube original;            // a) untouched
  SpectralCube outliers_restored;   // b) restored at outlier positions
  SpectralCube channels_restored;   // c) restored at RFI channels
  SpectralCube fully_restored;      // d) restored at the union
};

/// The four comparison datasets of the restoration study.
DatasetVariants restore_dataset_variants(const SpectralCube& cube, const Mask& channel_mask,
                                         const Mask& outlier_mask, const Restorer& restorer);

}  // namespace imclean::restore
