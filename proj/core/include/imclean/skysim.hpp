#pragma once

#include "imclean/cube.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace imclean::skysim {

/// Rest-frame 21-cm line frequency [Hz].
inline constexpr double kNu21Hz = 1420.405751768e6;
/// Solar-mass prefactor of the per-cell HI mass relation.
inline constexpr double kHiMassCoefficient = 2.775e11;

struct CosmologyParams {
  double omega_b = 0.049;
  double omega_m = 0.315;
  double omega_lambda = 0.685;
  double h = 0.67;
  double x_hi = 0.01;

  void validate() const;
};

/// Cross-frequency angular power spectrum model
///   C_l(nu1, nu2) = A (l_ref/l)^beta (nu_ref^2/(nu1 nu2))^alpha
///                   * exp(-log^2(nu1/nu2) / (2 xi^2))
struct ForegroundModel {
  std::string name;
  double amplitude_mk2 = 0.0;  // A  [mK^2]
  double beta = 0.0;           // multipole slope
  double alpha = 0.0;          // frequency slope
  double xi = 1.0;             // log-frequency correlation length
  double l_ref = 1000.0;
  double nu_ref_hz = 130.0e6;

  void validate() const;
};

/// The four standard foreground components with their pivot amplitudes.
std::vector<ForegroundModel> default_foregrounds();

/// Flat-sky patch geometry. Pixels must be square, so the RA and dec spans
/// must agree; n_pix must be even and at least 8.
struct SkyPatchSpec {
  double ra_min_deg = 20.0;
  double ra_max_deg = 50.0;
  double dec_min_deg = 25.0;
  double dec_max_deg = 55.0;
  Index n_pix = 512;
  FrequencyAxis axis;

  double pixel_rad() const;
  void validate() const;
};

/// Power-law angular spectrum of the HI overdensity field with a
/// log-frequency coherence length; stands in for a full cosmological P(k).
struct HiFieldSpec {
  double cl_amplitude = 1.5e-6;
  double cl_slope = 2.0;
  // Log-frequency correlation length. The default decorrelates over a few
  // hundred kHz, far shorter than the foreground coherence, which is what
  // separates the two in the spectral domain.
  double frequency_coherence = 5.0e-4;
  // Map the Gaussian draw through exp() (per-channel mean-normalized) so the
  // overdensity stays above -1. Off by default: the linear field is used
  // as drawn.
  bool lognormal = false;

  void validate() const;
};

/// z such that nu_21/(1+z) = nu. Requires 0 < nu <= nu_21.
double redshift_of_frequency(double nu_hz);

/// Mean 21-cm brightness temperature [mK] of a cell with HI overdensity
/// delta_hi at redshift z.
double brightness_temperature(const CosmologyParams& cosmo, double z, double delta_hi);

/// Total HI mass [M_sun] of a cell of comoving volume cell_volume.
/// Diagnostic only; map generation goes through brightness_temperature.
double hi_mass_per_cell(const CosmologyParams& cosmo, double z, double cell_volume,
                        double delta_hi);

/// C_l(nu1, nu2) of a foreground component [mK^2].
double foreground_cl(const ForegroundModel& model, double l, double nu1_hz, double nu2_hz);

/// Frequency part of the separable model: G(i,j) = A (nu_ref^2/(nu_i nu_j))^alpha
/// * exp(-log^2(nu_i/nu_j)/(2 xi^2)) over the axis channels.
Matrix frequency_covariance(const ForegroundModel& model, const FrequencyAxis& axis);

/// Gaussian random cube whose ensemble cross-frequency angular spectrum is
/// the component model. Deterministic in (seed, component_id) regardless of
/// thread count or internal blocking. max_block_channels caps how many
/// per-channel Fourier grids are held at once (0 = derive from a memory
/// budget); every draw is addressed by (mode, channel), so the blocking
/// cannot change values.
SpectralCube generate_correlated_field(const SkyPatchSpec& spec, const ForegroundModel& model,
                                       std::uint64_t seed, std::uint64_t component_id = 0,
                                       Index max_block_channels = 0);

/// HI brightness-temperature cube: Gaussian overdensity field mapped through
/// brightness_temperature at each channel's redshift.
SpectralCube generate_hi_cube(const SkyPatchSpec& spec, const CosmologyParams& cosmo,
                              const HiFieldSpec& hi, std::uint64_t seed);

struct SkyRealization {
  SpectralCube total;
  SpectralCube hi;
  SpectralCube foreground;
};

/// total = hi + sum of foreground components, exactly. Component i uses the
/// sub-stream (seed, i) of the master seed.
SkyRealization compose_sky(const SkyPatchSpec& spec, const CosmologyParams& cosmo,
                           const HiFieldSpec& hi,
                           const std::vector<ForegroundModel>& foregrounds,
                           std::uint64_t seed);

}  // namespace imclean::skysim
