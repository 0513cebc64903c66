#include "imclean/restore.hpp"

#include "imclean/contamination.hpp"
#include "imclean/cube_io.hpp"
#include "imclean/errors.hpp"
#include "imclean/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace imclean::restore {

namespace {

double global_unmasked_mean(const Matrix& data, const Mask& mask, bool* any_unmasked) {
  double sum = 0.0;
  Index n = 0;
  for (Index r = 0; r < data.rows(); ++r)
    for (Index c = 0; c < data.cols(); ++c)
      if (!mask.flags(r, c)) {
        sum += data(r, c);
        ++n;
      }
  *any_unmasked = n > 0;
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace

Matrix mean_fill_restore(const Matrix& data, const Mask& mask) {
  require_congruent(data, mask.flags);
  bool any_unmasked = false;
  const double global_mean = global_unmasked_mean(data, mask, &any_unmasked);
  if (!any_unmasked)
    std::fprintf(stderr, "[imclean] warning: mean_fill_restore on fully masked data; filling 0\n");

  Matrix out = data;
  for (Index r = 0; r < data.rows(); ++r) {
    double sum = 0.0;
    Index n = 0;
    for (Index c = 0; c < data.cols(); ++c)
      if (!mask.flags(r, c)) {
        sum += data(r, c);
        ++n;
      }
    const double fill = n > 0 ? sum / static_cast<double>(n) : global_mean;
    for (Index c = 0; c < data.cols(); ++c)
      if (mask.flags(r, c)) out(r, c) = fill;
  }
  return out;
}

PolyRestoreResult spectral_poly_restore(const Matrix& data, const Mask& mask, int order,
                                        double clip_sigma, int clip_rounds) {
  require_congruent(data, mask.flags);
  if (order < 0) throw ValueError("spectral_poly_restore: order must be >= 0");
  if (!(clip_sigma > 0.0)) throw ValueError("spectral_poly_restore: clip_sigma must be > 0");
  const Index n = data.cols();

  // Normalized channel coordinate in [-1, 1] keeps the Vandermonde
  // well-conditioned over long spectra.
  std::vector<double> x(static_cast<std::size_t>(n));
  for (Index c = 0; c < n; ++c)
    x[static_cast<std::size_t>(c)] =
        n > 1 ? -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(n - 1) : 0.0;

  bool any_unmasked = false;
  const double global_mean = global_unmasked_mean(data, mask, &any_unmasked);

  PolyRestoreResult result;
  result.restored = data;
  std::vector<Index> fallback_count(static_cast<std::size_t>(data.rows()), 0);

  parallel_for(static_cast<std::size_t>(data.rows()), [&](std::size_t rr) {
    const Index r = static_cast<Index>(rr);
    std::vector<Index> usable;
    for (Index c = 0; c < n; ++c)
      if (!mask.flags(r, c)) usable.push_back(c);
    if (static_cast<Index>(usable.size()) == n) return;  // nothing to fill

    const auto mean_fill_row = [&] {
      double fill = global_mean;
      if (!usable.empty()) {
        double s = 0.0;
        for (Index c : usable) s += data(r, c);
        fill = s / static_cast<double>(usable.size());
      }
      for (Index c = 0; c < n; ++c)
        if (mask.flags(r, c)) result.restored(r, c) = fill;
      fallback_count[rr] = 1;
    };
    if (static_cast<int>(usable.size()) < order + 1) {
      mean_fill_row();
      return;
    }

    const auto fit = [&](const std::vector<Index>& cells) {
      Matrix vand(static_cast<Index>(cells.size()), order + 1);
      Eigen::VectorXd rhs(static_cast<Index>(cells.size()));
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const double xi = x[static_cast<std::size_t>(cells[i])];
        double p = 1.0;
        for (int j = 0; j <= order; ++j) {
          vand(static_cast<Index>(i), j) = p;
          p *= xi;
        }
        rhs(static_cast<Index>(i)) = data(r, cells[i]);
      }
      return Eigen::VectorXd(vand.colPivHouseholderQr().solve(rhs));
    };
    const auto evaluate = [&](const Eigen::VectorXd& coef, Index c) {
      double p = 1.0, v = 0.0;
      for (int j = 0; j <= order; ++j) {
        v += coef(j) * p;
        p *= x[static_cast<std::size_t>(c)];
      }
      return v;
    };

    Eigen::VectorXd coef = fit(usable);
    for (int round = 0; round < clip_rounds; ++round) {
      // Robust scale from the median absolute residual; cells further than
      // clip_sigma of it are treated as unflagged interference.
      std::vector<double> abs_res;
      abs_res.reserve(usable.size());
      for (Index c : usable) abs_res.push_back(std::abs(data(r, c) - evaluate(coef, c)));
      std::vector<double> sorted = abs_res;
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
      const double mad = sorted[sorted.size() / 2];
      const double scale = 1.4826 * mad;
      if (!(scale > 0.0)) break;
      std::vector<Index> kept;
      kept.reserve(usable.size());
      for (std::size_t i = 0; i < usable.size(); ++i)
        if (abs_res[i] <= clip_sigma * scale) kept.push_back(usable[i]);
      if (kept.size() == usable.size()) break;
      if (static_cast<int>(kept.size()) < order + 1) break;  // keep the last sane fit
      usable.swap(kept);
      coef = fit(usable);
    }

    for (Index c = 0; c < n; ++c)
      if (mask.flags(r, c)) result.restored(r, c) = evaluate(coef, c);
  });

  for (Index f : fallback_count) result.fallback_rows += f;
  return result;
}

LowRankRestoreResult low_rank_restore(const Matrix& data, const Mask& mask, Index rank,
                                      double tol, int max_iter) {
  require_congruent(data, mask.flags);
  if (rank < 1 || rank > std::min(data.rows(), data.cols()))
    throw ValueError("low_rank_restore: rank out of range");
  if (!data.allFinite()) throw ValueError("low_rank_restore: non-finite input");

  LowRankRestoreResult result;
  result.restored = mean_fill_restore(data, mask);
  const Index n_masked = mask.count();
  if (n_masked == 0) {
    result.converged = true;
    return result;
  }
  const double data_rms =
      std::sqrt(data.array().square().sum() / static_cast<double>(data.size()));
  const double threshold = tol * (data_rms > 0.0 ? data_rms : 1.0);

  for (int it = 0; it < max_iter; ++it) {
    Eigen::BDCSVD<Matrix> svd(result.restored, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index p = std::min(rank, svd.singularValues().size());
    const Matrix approx = svd.matrixU().leftCols(p) *
                          svd.singularValues().head(p).asDiagonal() *
                          svd.matrixV().leftCols(p).transpose();
    double change2 = 0.0;
    for (Index r = 0; r < data.rows(); ++r)
      for (Index c = 0; c < data.cols(); ++c)
        if (mask.flags(r, c)) {
          const double d = approx(r, c) - result.restored(r, c);
          change2 += d * d;
          result.restored(r, c) = approx(r, c);
        }
    result.iterations = it + 1;
    if (std::sqrt(change2 / static_cast<double>(n_masked)) < threshold) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Matrix ingest_external_restoration(const Matrix& original, const Mask& mask,
                                   const std::filesystem::path& restored_path,
                                   double tolerance, const std::filesystem::path& report_path,
                                   IngestReport* report) {
  require_congruent(original, mask.flags);
  const SpectralCube restored = read_cube(restored_path);
  if (restored.data.rows() != original.rows() || restored.data.cols() != original.cols())
    throw ValueError("ingest_external_restoration: shape mismatch in " + restored_path.string());
  if (!restored.data.allFinite())
    throw ContractViolation("ingest_external_restoration: non-finite values in " +
                            restored_path.string());

  const double scale = std::max(original.array().abs().maxCoeff(), 1e-300);
  const double limit = tolerance * scale;

  IngestReport local;
  struct Deviation {
    Index row, channel;
    double expected, found;
  };
  std::vector<Deviation> bad;
  for (Index r = 0; r < original.rows(); ++r)
    for (Index c = 0; c < original.cols(); ++c) {
      if (mask.flags(r, c)) continue;  // masked cells are the restorer's to change
      const double dev = std::abs(restored.data(r, c) - original(r, c));
      if (dev > limit) {
        ++local.deviating_cells;
        if (bad.size() < 10000) bad.push_back({r, c, original(r, c), restored.data(r, c)});
      }
      local.max_deviation = std::max(local.max_deviation, dev);
    }
  local.accepted = local.deviating_cells == 0;
  if (report) *report = local;

  if (!local.accepted) {
    if (!report_path.empty()) {
      std::ofstream os(report_path);
      os.precision(17);
      os << "row,channel,expected,found,deviation\n";
      for (const auto& d : bad)
        os << d.row << ',' << d.channel << ',' << d.expected << ',' << d.found << ','
           << std::abs(d.found - d.expected) << "\n";
    }
    throw ContractViolation("external restoration altered " +
                            std::to_string(local.deviating_cells) +
                            " unmasked cells (max deviation " +
                            std::to_string(local.max_deviation) + ")");
  }
  return restored.data;
}

namespace {

class MeanFillRestorer final : public Restorer {
 public:
  std::string name() const override { return "mean_fill"; }
  Matrix restore(const Matrix& data, const Mask& mask) const override {
    return mean_fill_restore(data, mask);
  }
};

class SpectralPolyRestorer final : public Restorer {
 public:
  explicit SpectralPolyRestorer(int order) : order_(order) {}
  std::string name() const override { return "spectral_poly"; }
  Matrix restore(const Matrix& data, const Mask& mask) const override {
    return spectral_poly_restore(data, mask, order_).restored;
  }

 private:
  int order_;
};

class LowRankRestorer final : public Restorer {
 public:
  LowRankRestorer(Index rank, double tol, int max_iter)
      : rank_(rank), tol_(tol), max_iter_(max_iter) {}
  std::string name() const override { return "low_rank"; }
  Matrix restore(const Matrix& data, const Mask& mask) const override {
    return low_rank_restore(data, mask, std::min(rank_, std::min(data.rows(), data.cols())),
                            tol_, max_iter_)
        .restored;
  }

 private:
  Index rank_;
  double tol_;
  int max_iter_;
};

class ExternalRestorer final : public Restorer {
 public:
  ExternalRestorer(std::filesystem::path path, double tol)
      : path_(std::move(path)), tol_(tol) {}
  std::string name() const override { return "external"; }
  Matrix restore(const Matrix& data, const Mask& mask) const override {
    return ingest_external_restoration(data, mask, path_, tol_,
                                       path_.string() + ".rejects.csv");
  }

 private:
  std::filesystem::path path_;
  double tol_;
};

}  // namespace

std::unique_ptr<Restorer> make_mean_fill_restorer() {
  return std::make_unique<MeanFillRestorer>();
}
std::unique_ptr<Restorer> make_spectral_poly_restorer(int order) {
  return std::make_unique<SpectralPolyRestorer>(order);
}
std::unique_ptr<Restorer> make_low_rank_restorer(Index rank, double tol, int max_iter) {
  return std::make_unique<LowRankRestorer>(rank, tol, max_iter);
}
std::unique_ptr<Restorer> make_external_restorer(std::filesystem::path restored_path,
                                                 double tolerance) {
  return std::make_unique<ExternalRestorer>(std::move(restored_path), tolerance);
}

void RestorationRecord::validate() const {
  if (predicted == nullptr || truth_foreground == nullptr || mask == nullptr)
    throw ValueError("RestorationRecord: unset references");
  require_congruent(*predicted, mask->flags);
  require_congruent(*truth_foreground, mask->flags);
}

DatasetVariants restore_dataset_variants(const SpectralCube& cube, const Mask& channel_mask,
                                         const Mask& outlier_mask, const Restorer& restorer) {
  require_congruent(cube, channel_mask);
  require_congruent(cube, outlier_mask);

  DatasetVariants v;
  v.original = cube;
  v.outliers_restored = cube;
  v.outliers_restored.data = restorer.restore(cube.data, outlier_mask);
  v.channels_restored = cube;
  v.channels_restored.data = restorer.restore(cube.data, channel_mask);
  v.fully_restored = cube;
  v.fully_restored.data =
      restorer.restore(cube.data, contam::combine_flags(channel_mask, outlier_mask));
  return v;
}

}  // namespace imclean::restore
