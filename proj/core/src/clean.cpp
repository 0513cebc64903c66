#include "imclean/clean.hpp"

#include "imclean/errors.hpp"
#include "imclean/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imclean::clean {

namespace {

// Largest-|entry| of each column of u made positive; v follows.
void fix_signs(Matrix& u, Matrix& v) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    if (u(arg, j) < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

// W <- (W W^T)^{-1/2} W. Symmetric so no component ordering is imposed.
Matrix symmetric_decorrelation(const Matrix& w) {
  const Matrix gram = w * w.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  if (es.info() != Eigen::Success) throw Error("fastica: eigendecomposition failed");
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().array().max(1e-300).rsqrt();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
}

}  // namespace

CleanResult remove_polyfit(const Matrix& data, int order) {
  if (order < 0) throw ValueError("remove_polyfit: order must be >= 0");
  const Index n = data.cols();
  if (n <= order) throw ValueError("remove_polyfit: order must be below the channel count");

  Matrix vand(n, order + 1);
  for (Index c = 0; c < n; ++c) {
    const double x = n > 1 ? -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(n - 1)
                           : 0.0;
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
      vand(c, j) = p;
      p *= x;
    }
  }
  // All rows share the channel grid, so one pseudoinverse serves every row:
  // coefficients = data * pinv^T, fit = coefficients * V^T.
  const Matrix gram = vand.transpose() * vand;
  const Matrix pinv_t = gram.ldlt().solve(vand.transpose()).transpose();  // n x (order+1)

  CleanResult out;
  out.method = "polyfit";
  out.removed_components = order + 1;
  out.residual = data - (data * pinv_t) * vand.transpose();
  return out;
}

SvdDecomposition svd_decompose(const Matrix& data) {
  if (!data.allFinite()) throw ValueError("svd_decompose: non-finite input");
  Eigen::BDCSVD<Matrix> svd(data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw Error("svd_decompose: SVD did not converge");
  SvdDecomposition out;
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.singular_values = svd.singularValues();
  fix_signs(out.u, out.v);
  return out;
}

CleanResult remove_svd_modes(const Matrix& data, Index k) {
  const Index p = std::min(data.rows(), data.cols());
  if (k < 0 || k > p) throw ValueError("remove_svd_modes: k out of range");
  CleanResult out;
  out.method = "svd";
  out.removed_components = static_cast<int>(k);
  if (k == 0) {
    out.residual = data;
    return out;
  }
  const SvdDecomposition svd = svd_decompose(data);
  out.component_strengths.assign(svd.singular_values.data(),
                                 svd.singular_values.data() + svd.singular_values.size());
  out.residual = data - svd.u.leftCols(k) * svd.singular_values.head(k).asDiagonal() *
                            svd.v.leftCols(k).transpose();
  return out;
}

double kurtosis(const Eigen::Ref<const Eigen::VectorXd>& samples) {
  if (samples.size() < 4) throw ValueError("kurtosis: need at least 4 samples");
  const double m2 = samples.array().square().mean();
  const double m4 = samples.array().square().square().mean();
  return m4 - 3.0 * m2 * m2;
}

WhitenResult whiten(const Matrix& data) {
  if (data.cols() < 2) throw ValueError("whiten: need at least 2 channels");
  if (data.isZero(0.0)) throw ValueError("whiten: all-zero data");
  const Index m = data.rows();
  const Index c = data.cols();

  WhitenResult out;
  out.channel_means = data.rowwise().mean();
  Matrix centered = data;
  centered.colwise() -= out.channel_means;

  // Covariance over channel samples is (1/c) X X^T; its eigensystem comes
  // from the thin SVD of X without forming the m x m matrix.
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-6 * sv(0) : 0.0;  // sqrt of the 1e-12 eigen cutoff
  Index p = 0;
  while (p < sv.size() && sv(p) > cutoff) ++p;
  if (p == 0) throw ValueError("whiten: data has no variance");
  out.dropped_dimensions = std::min(m, c) - p;

  const double sqrt_c = std::sqrt(static_cast<double>(c));
  out.whitening =
      (sqrt_c * sv.head(p).array().inverse()).matrix().asDiagonal() *
      svd.matrixU().leftCols(p).transpose();
  out.whitened = out.whitening * centered;
  return out;
}

IcaResult fastica(const Matrix& data, Index n_components, double tol, int max_iter,
                  std::uint64_t seed, IcaContrast contrast) {
  if (n_components < 1) throw ValueError("fastica: need at least one component");
  WhitenResult white = whiten(data);
  if (n_components > white.whitened.rows())
    throw ValueError("fastica: n_components exceeds the whitened dimension " +
                     std::to_string(white.whitened.rows()));
  // Reduce to the n_components leading principal directions (they arrive
  // sorted by eigenvalue); the contrast then only rotates within that
  // subspace, so A S spans exactly the whitened subspace kept here.
  white.whitened = Matrix(white.whitened.topRows(n_components));
  white.whitening = Matrix(white.whitening.topRows(n_components));
  const Index p = white.whitened.rows();
  const Index c = white.whitened.cols();

  // Seeded unmixing init, decorrelated before iterating.
  const rng::CounterRng r(seed, rng::streams::kIcaInit);
  Matrix w(n_components, p);
  for (Index i = 0; i < n_components; ++i)
    for (Index j = 0; j < p; ++j)
      w(i, j) = r.gaussian_at(static_cast<std::uint64_t>(i * p + j));
  w = symmetric_decorrelation(w);

  IcaResult out;
  const Matrix& z = white.whitened;
  const double inv_c = 1.0 / static_cast<double>(c);
  for (int it = 0; it < max_iter; ++it) {
    const Matrix proj = w * z;  // n x c
    Matrix w_new;
    if (contrast == IcaContrast::kCubic) {
      // Kurtosis fixed point: w <- E[z (w^T z)^3] - 3 w.
      const Matrix cubed = proj.array().cube().matrix();
      w_new = inv_c * (cubed * z.transpose()) - 3.0 * w;
    } else {
      // log-cosh: w <- E[z tanh(w^T z)] - E[1 - tanh^2(w^T z)] w.
      const Matrix g = proj.array().tanh().matrix();
      const Eigen::VectorXd g_prime_mean =
          (1.0 - g.array().square()).rowwise().mean().matrix();
      w_new = inv_c * (g * z.transpose()) - g_prime_mean.asDiagonal() * w;
    }
    w_new = symmetric_decorrelation(w_new);
    const double delta =
        1.0 - (w_new.array() * w.array()).rowwise().sum().abs().minCoeff();
    w = w_new;
    out.n_iterations = it + 1;
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }

  out.sources = w * z;  // n x c, unit sample covariance
  // Mixing back in original coordinates: A = (1/c) X_c S^T since S S^T = c I.
  Matrix centered = data;
  centered.colwise() -= white.channel_means;
  out.mixing = inv_c * (centered * out.sources.transpose());

  // Deterministic presentation: order components by mixing-column energy,
  // then make the largest-|entry| source sample positive.
  std::vector<Index> order(static_cast<std::size_t>(n_components));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::RowVectorXd energy = out.mixing.colwise().squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return energy(a) > energy(b); });
  const Matrix mixing = out.mixing;
  const Matrix sources = out.sources;
  for (Index i = 0; i < n_components; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    Eigen::RowVectorXd s_row = sources.row(src);
    Eigen::VectorXd a_col = mixing.col(src);
    Index arg = 0;
    s_row.cwiseAbs().maxCoeff(&arg);
    if (s_row(arg) < 0.0) {
      s_row = -s_row;
      a_col = -a_col;
    }
    out.sources.row(i) = s_row;
    out.mixing.col(i) = a_col;
  }

  out.whitening = white.whitening;
  out.channel_means = white.channel_means;
  for (Index i = 0; i < n_components; ++i)
    out.source_kurtoses.push_back(kurtosis(out.sources.row(i).transpose()));
  return out;
}

CleanResult remove_ica_components(const Matrix& data, Index n_components, std::uint64_t seed,
                                  bool add_back_means, IcaContrast contrast) {
  CleanResult out;
  out.method = "ica";
  out.removed_components = static_cast<int>(n_components);
  if (n_components == 0) {
    out.residual = data;
    return out;
  }
  const IcaResult ica = fastica(data, n_components, 1e-4, 200, seed, contrast);
  Matrix centered = data;
  centered.colwise() -= ica.channel_means;
  out.residual = centered - ica.mixing * ica.sources;
  if (add_back_means) out.residual.colwise() += ica.channel_means;
  for (double k : ica.source_kurtoses) out.component_strengths.push_back(std::abs(k));
  return out;
}

}  // namespace imclean::clean
