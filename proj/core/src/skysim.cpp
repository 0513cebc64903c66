#include "imclean/skysim.hpp"

#include "imclean/errors.hpp"
#include "imclean/parallel.hpp"
#include "imclean/rng.hpp"
#include "fft.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <complex>
#include <numbers>

namespace imclean::skysim {

namespace {

constexpr double kPi = std::numbers::pi;

// Cholesky factor of a nominally PSD matrix, escalating a diagonal jitter up
// to 1e-10 * trace/n before giving up.
Matrix cholesky_with_jitter(const Matrix& g) {
  const double scale = g.trace() / static_cast<double>(g.rows());
  for (double rel : {0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10}) {
    Matrix jittered = g;
    jittered.diagonal().array() += rel * scale;
    Eigen::LLT<Matrix> llt(jittered);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw ValueError("covariance not PSD");
}

struct ModeInfo {
  Index index;    // row-major position on the n x n grid
  Index mirror;   // position of the conjugate mode
  double scale;   // sqrt(area * (l_ref/l)^beta), before the 1/sqrt(2) split
  bool self_conjugate;
};

// Canonical half of the Fourier grid; the zero mode is excluded.
std::vector<ModeInfo> canonical_modes(Index n, double pixel_rad, double l_ref, double beta) {
  const double area = static_cast<double>(n) * static_cast<double>(n) * pixel_rad * pixel_rad;
  const double du = 1.0 / (static_cast<double>(n) * pixel_rad);
  std::vector<ModeInfo> modes;
  modes.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) / 2 + 2);
  for (Index ky = 0; ky < n; ++ky) {
    const double fy = static_cast<double>(ky <= n / 2 ? ky : ky - n) * du;
    for (Index kx = 0; kx < n; ++kx) {
      const Index m = ky * n + kx;
      if (m == 0) continue;
      const Index m_mirror = ((n - ky) % n) * n + (n - kx) % n;
      if (m > m_mirror) continue;
      const double fx = static_cast<double>(kx <= n / 2 ? kx : kx - n) * du;
      const double l = 2.0 * kPi * std::hypot(fx, fy);
      const double s_l = std::pow(l_ref / l, beta);
      modes.push_back({m, m_mirror, std::sqrt(area * s_l), m == m_mirror});
    }
  }
  return modes;
}

}  // namespace

void CosmologyParams::validate() const {
  for (double v : {omega_b, omega_m, omega_lambda, h, x_hi}) {
    if (!(v > 0.0 && v < 1.5)) throw ValueError("CosmologyParams: parameters must lie in (0, 1.5)");
  }
  if (std::abs(omega_m + omega_lambda - 1.0) > 0.01)
    throw ValueError("CosmologyParams: omega_m + omega_lambda must equal 1 within 0.01");
}

void ForegroundModel::validate() const {
  if (amplitude_mk2 < 0.0) throw ValueError("ForegroundModel: amplitude must be >= 0");
  if (!(xi > 0.0)) throw ValueError("ForegroundModel: xi must be > 0");
  if (!(l_ref > 0.0) || !(nu_ref_hz > 0.0))
    throw ValueError("ForegroundModel: pivots must be > 0");
}

std::vector<ForegroundModel> default_foregrounds() {
  return {
      {"synchrotron", 700.0, 2.4, 2.80, 4.0, 1000.0, 130.0e6},
      {"point_sources", 57.0, 1.1, 2.07, 1.0, 1000.0, 130.0e6},
      {"galactic_freefree", 0.088, 3.0, 2.15, 35.0, 1000.0, 130.0e6},
      {"extragalactic_freefree", 0.014, 1.0, 2.10, 35.0, 1000.0, 130.0e6},
  };
}

double SkyPatchSpec::pixel_rad() const {
  return (ra_max_deg - ra_min_deg) * kPi / 180.0 / static_cast<double>(n_pix);
}

void SkyPatchSpec::validate() const {
  if (!(ra_max_deg > ra_min_deg)) throw ValueError("SkyPatchSpec: empty RA range");
  if (!(dec_max_deg > dec_min_deg)) throw ValueError("SkyPatchSpec: empty dec range");
  if (n_pix < 8 || n_pix % 2 != 0) throw ValueError("SkyPatchSpec: n_pix must be even and >= 8");
  const double ra_span = ra_max_deg - ra_min_deg;
  const double dec_span = dec_max_deg - dec_min_deg;
  if (std::abs(ra_span - dec_span) > 1e-9 * std::max(ra_span, dec_span))
    throw ValueError("SkyPatchSpec: RA and dec spans must match (square pixels)");
  axis.validate();
}

void HiFieldSpec::validate() const {
  if (cl_amplitude < 0.0) throw ValueError("HiFieldSpec: cl_amplitude must be >= 0");
  if (!(frequency_coherence > 0.0))
    throw ValueError("HiFieldSpec: frequency_coherence must be > 0");
}

double redshift_of_frequency(double nu_hz) {
  if (!(nu_hz > 0.0) || nu_hz > kNu21Hz)
    throw ValueError("redshift_of_frequency: frequency must lie in (0, nu_21]");
  return kNu21Hz / nu_hz - 1.0;
}

double brightness_temperature(const CosmologyParams& cosmo, double z, double delta_hi) {
  if (z < 0.0) throw ValueError("brightness_temperature: z must be >= 0");
  const double zp1 = 1.0 + z;
  const double hubble = std::sqrt(cosmo.omega_m * zp1 * zp1 * zp1 + cosmo.omega_lambda);
  return 190.55 * cosmo.omega_b * cosmo.h * zp1 * zp1 * cosmo.x_hi / hubble * (1.0 + delta_hi);
}

double hi_mass_per_cell(const CosmologyParams& cosmo, double z, double cell_volume,
                        double delta_hi) {
  if (z < 0.0) throw ValueError("hi_mass_per_cell: z must be >= 0");
  if (!(cell_volume > 0.0)) throw ValueError("hi_mass_per_cell: cell volume must be > 0");
  // Cell volume is an opaque positive scalar; the Mpc^3 vs (Mpc/h)^3
  // convention is the caller's.
  return kHiMassCoefficient * cell_volume * cosmo.omega_b * cosmo.x_hi / cosmo.h *
         (1.0 + delta_hi);
}

double foreground_cl(const ForegroundModel& model, double l, double nu1_hz, double nu2_hz) {
  if (!(l > 0.0)) throw ValueError("foreground_cl: l must be > 0");
  if (!(nu1_hz > 0.0) || !(nu2_hz > 0.0))
    throw ValueError("foreground_cl: frequencies must be > 0");
  const double log_ratio = std::log(nu1_hz / nu2_hz);
  return model.amplitude_mk2 * std::pow(model.l_ref / l, model.beta) *
         std::pow(model.nu_ref_hz * model.nu_ref_hz / (nu1_hz * nu2_hz), model.alpha) *
         std::exp(-log_ratio * log_ratio / (2.0 * model.xi * model.xi));
}

Matrix frequency_covariance(const ForegroundModel& model, const FrequencyAxis& axis) {
  axis.validate();
  model.validate();
  const Index n = axis.n_channels;
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    const double nu_i = axis.frequency(i);
    for (Index j = 0; j <= i; ++j) {
      const double nu_j = axis.frequency(j);
      const double log_ratio = std::log(nu_i / nu_j);
      const double v = model.amplitude_mk2 *
                       std::pow(model.nu_ref_hz * model.nu_ref_hz / (nu_i * nu_j), model.alpha) *
                       std::exp(-log_ratio * log_ratio / (2.0 * model.xi * model.xi));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  if (model.amplitude_mk2 > 0.0) cholesky_with_jitter(g);  // PSD contract check
  return g;
}

SpectralCube generate_correlated_field(const SkyPatchSpec& spec, const ForegroundModel& model,
                                       std::uint64_t seed, std::uint64_t component_id,
                                       Index max_block_channels) {
  spec.validate();
  model.validate();

  const Index n = spec.n_pix;
  const Index n_ch = spec.axis.n_channels;
  const double pixel = spec.pixel_rad();
  const double area = static_cast<double>(n) * static_cast<double>(n) * pixel * pixel;

  SpectralCube cube;
  cube.axis = spec.axis;
  cube.grid = SkyGrid{n, n, pixel};
  cube.data = Matrix::Zero(n * n, n_ch);
  if (model.amplitude_mk2 == 0.0) return cube;

  const Matrix chol = cholesky_with_jitter(frequency_covariance(model, spec.axis));
  const std::vector<ModeInfo> modes = canonical_modes(n, pixel, model.l_ref, model.beta);
  const Index n_modes = static_cast<Index>(modes.size());
  const rng::CounterRng noise(seed, rng::streams::kFieldNoise + component_id);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  // Channel blocks keep the per-channel spectra buffers bounded; mode chunks
  // bound the scratch normals. Blocking is fixed by sizes only, so the split
  // never affects values.
  const Index mode_chunk = 16384;
  Index block = max_block_channels > 0
                    ? max_block_channels
                    : std::max<Index>(1, static_cast<Index>(
                                             128e6 / (static_cast<double>(n) * n * 16.0)));
  block = std::min(block, n_ch);

  std::vector<std::vector<std::complex<double>>> spectra(static_cast<std::size_t>(block));
  Matrix z_re, z_im, y_re, y_im;
  for (Index c0 = 0; c0 < n_ch; c0 += block) {
    const Index bc = std::min(block, n_ch - c0);
    for (Index b = 0; b < bc; ++b)
      spectra[static_cast<std::size_t>(b)].assign(static_cast<std::size_t>(n) * n, {0.0, 0.0});

    for (Index m0 = 0; m0 < n_modes; m0 += mode_chunk) {
      const Index mc = std::min(mode_chunk, n_modes - m0);
      z_re.resize(n_ch, mc);
      z_im.resize(n_ch, mc);
      parallel_for(static_cast<std::size_t>(mc), [&](std::size_t jj) {
        const Index j = static_cast<Index>(jj);
        const ModeInfo& mode = modes[static_cast<std::size_t>(m0 + j)];
        const std::uint64_t slot = static_cast<std::uint64_t>(mode.index);
        if (mode.self_conjugate) {
          for (Index c = 0; c < n_ch; ++c) {
            z_re(c, j) = mode.scale * noise.gaussian_at(slot, 2 * static_cast<std::uint64_t>(c));
            z_im(c, j) = 0.0;
          }
        } else {
          const double s = mode.scale * inv_sqrt2;
          for (Index c = 0; c < n_ch; ++c) {
            z_re(c, j) = s * noise.gaussian_at(slot, 2 * static_cast<std::uint64_t>(c));
            z_im(c, j) = s * noise.gaussian_at(slot, 2 * static_cast<std::uint64_t>(c) + 1);
          }
        }
      });
      y_re.noalias() = chol.middleRows(c0, bc) * z_re;
      y_im.noalias() = chol.middleRows(c0, bc) * z_im;
      for (Index b = 0; b < bc; ++b) {
        auto& spec_c = spectra[static_cast<std::size_t>(b)];
        for (Index j = 0; j < mc; ++j) {
          const ModeInfo& mode = modes[static_cast<std::size_t>(m0 + j)];
          const std::complex<double> a(y_re(b, j), y_im(b, j));
          spec_c[static_cast<std::size_t>(mode.index)] = a;
          spec_c[static_cast<std::size_t>(mode.mirror)] = std::conj(a);
        }
      }
    }

    parallel_for(static_cast<std::size_t>(bc), [&](std::size_t b) {
      auto& spec_c = spectra[b];
      fft::transform_2d(spec_c.data(), static_cast<int>(n), +1);
      const double norm = 1.0 / area;
      const Index c = c0 + static_cast<Index>(b);
      for (Index p = 0; p < n * n; ++p)
        cube.data(p, c) = spec_c[static_cast<std::size_t>(p)].real() * norm;
    });
  }
  return cube;
}

SpectralCube generate_hi_cube(const SkyPatchSpec& spec, const CosmologyParams& cosmo,
                              const HiFieldSpec& hi, std::uint64_t seed) {
  cosmo.validate();
  hi.validate();
  ForegroundModel delta_model{"hi_overdensity", hi.cl_amplitude, hi.cl_slope,
                              0.0,  hi.frequency_coherence, 1000.0, 130.0e6};
  SpectralCube cube = generate_correlated_field(spec, delta_model, seed, /*component_id=*/0);
  for (Index c = 0; c < cube.channels(); ++c) {
    if (hi.lognormal && hi.cl_amplitude > 0.0) {
      // delta = exp(g)/<exp(g)> - 1, mean-normalized per channel.
      Eigen::ArrayXd e = cube.data.col(c).array().exp();
      cube.data.col(c) = (e / e.mean() - 1.0).matrix();
    }
    const double z = redshift_of_frequency(spec.axis.frequency(c));
    const double mean_t = brightness_temperature(cosmo, z, 0.0);
    // T = mean_t * (1 + delta); delta kept as drawn (no clamping at -1).
    cube.data.col(c) = mean_t * (cube.data.col(c).array() + 1.0).matrix();
  }
  return cube;
}

SkyRealization compose_sky(const SkyPatchSpec& spec, const CosmologyParams& cosmo,
                           const HiFieldSpec& hi,
                           const std::vector<ForegroundModel>& foregrounds,
                           std::uint64_t seed) {
  SkyRealization out;
  out.hi = generate_hi_cube(spec, cosmo, hi, seed);
  out.foreground.axis = spec.axis;
  out.foreground.grid = out.hi.grid;
  out.foreground.data = Matrix::Zero(out.hi.rows(), out.hi.channels());
  for (std::size_t i = 0; i < foregrounds.size(); ++i) {
    out.foreground.data +=
        generate_correlated_field(spec, foregrounds[i], seed, 1 + static_cast<std::uint64_t>(i)).data;
  }
  out.total = out.hi;
  out.total.data = out.hi.data + out.foreground.data;
  return out;
}

}  // namespace imclean::skysim
