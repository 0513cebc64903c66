#pragma once

#include "imclean/cube.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace imclean::clean {

struct CleanResult {
  Matrix residual;
  int removed_components = 0;
  std::string method;
  std::vector<double> component_strengths;  // singular values or |kurtosis| per source
};

/// Subtracts a per-row least-squares polynomial of the given order over the
/// normalized channel index.
CleanResult remove_polyfit(const Matrix& data, int order = 2);

struct SvdDecomposition {
  Matrix u;                      // m x p
  Eigen::VectorXd singular_values;  // p, non-increasing
  Matrix v;                      // n x p
};

/// Thin SVD with a deterministic sign convention: the largest-magnitude
/// entry of each left vector is positive.
SvdDecomposition svd_decompose(const Matrix& data);

/// Zeroes the k largest singular values and reconstructs; equivalently
/// subtracts the rank-k approximation.
CleanResult remove_svd_modes(const Matrix& data, Index k);

/// E[y^4] - 3 E[y^2]^2 with plain sample moments. Needs >= 4 samples.
double kurtosis(const Eigen::Ref<const Eigen::VectorXd>& samples);

struct WhitenResult {
  Matrix whitened;            // p x channels, identity sample covariance
  Matrix whitening;           // p x measurements
  Eigen::VectorXd channel_means;  // per-measurement mean across channels
  Index dropped_dimensions = 0;
};

/// Centers each row (mean across channels) and projects onto the principal
/// subspace scaled to unit variance. Directions with eigenvalue below
/// 1e-12 * lambda_max are dropped.
WhitenResult whiten(const Matrix& data);

struct IcaResult {
  Matrix mixing;        // measurements x n_components
  Matrix sources;       // n_components x channels
  Matrix whitening;     // as returned by whiten()
  Eigen::VectorXd channel_means;
  std::vector<double> source_kurtoses;
  int n_iterations = 0;
  bool converged = false;
};

enum class IcaContrast { kCubic, kLogCosh };

/// Symmetric fixed-point FastICA, cubic (kurtosis) contrast by default.
/// Components are ordered by decreasing mixing-column energy and
/// sign-normalized so the largest-magnitude source entry is positive.
IcaResult fastica(const Matrix& data, Index n_components = 4, double tol = 1e-4,
                  int max_iter = 200, std::uint64_t seed = 0,
                  IcaContrast contrast = IcaContrast::kCubic);

/// Residual after subtracting the FastICA reconstruction of n components.
/// Channel means removed during whitening stay removed unless
/// add_back_means. n_components == 0 returns the input unchanged.
CleanResult remove_ica_components(const Matrix& data, Index n_components = 4,
                                  std::uint64_t seed = 0, bool add_back_means = false,
                                  IcaContrast contrast = IcaContrast::kCubic);

}  // namespace imclean::clean
