#pragma once

#include "imclean/contamination.hpp"
#include "imclean/skysim.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace imclean::config {

enum class Profile { kDesk, kPaper };

/// Resolved run configuration. Field defaults are the desk profile; the
/// paper profile swaps in the full observation geometry.
struct RunConfig {
  // run
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware concurrency

  // sky
  skysim::SkyPatchSpec sky;
  skysim::CosmologyParams cosmology;
  skysim::HiFieldSpec hi;
  std::vector<std::string> foreground_names = {"synchrotron", "point_sources",
                                               "galactic_freefree", "extragalactic_freefree"};
  std::vector<skysim::ForegroundModel> foreground_overrides;
  bool allow_empty_foregrounds = false;

  // rfi + flagging
  contam::RfiModel rfi;
  std::string rfi_template_cube;  // IMC1 + IMM1 pair; replaces the synthetic
  std::string rfi_template_mask;  // model when both are set
  int flag_max_iterations = 10;  // 1 reproduces the literal single-pass rule
  bool flag_include_masked_in_stats = false;

  // restore
  std::string restorer = "spectral_poly";  // mean_fill | spectral_poly | low_rank | external
  int restore_poly_order = 2;
  Index restore_rank = 4;
  double restore_tol = 1e-6;
  int restore_max_iter = 100;
  std::string restore_external_path;

  // clean
  std::vector<std::string> clean_methods = {"polyfit", "svd", "ica"};
  int clean_poly_order = 2;
  Index svd_modes = 4;        // modes removed for residual/spectrum outputs
  Index svd_sweep_max = 20;   // RMS-vs-modes study covers k in [0, sweep_max]
  Index ica_components = 4;
  std::string ica_contrast = "cubic";  // cubic | logcosh
  bool svd_center = false;
  bool ica_add_back_means = false;

  // downsample
  Index downsample_factor = 20;

  // evaluate
  std::vector<double> fraction_edges;  // empty = 0..0.4 step 0.05
  std::vector<double> cl_bin_edges;    // empty = derived from sky geometry
  Index patch_size = 128;
  double patch_max_fraction = 0.40;
  bool export_patches = false;
  bool rms_about_mean = false;
  Index ssim_window = 0;  // 0 = single global window

  /// Constructs the foreground model list: Table-row defaults selected by
  /// name, with explicit overrides replacing same-named entries.
  std::vector<skysim::ForegroundModel> resolve_foregrounds() const;

  /// Resolved Cl bin edges (derived from the sky geometry when unset).
  std::vector<double> resolve_cl_bins() const;
  std::vector<double> resolve_fraction_edges() const;

  void validate() const;

  /// Canonical key=value rendering of every resolved field; input to the
  /// config hash and the validate-config listing.
  std::string canonical_text() const;
};

RunConfig profile_defaults(Profile profile);

/// Parses a config file on top of profile defaults. Unknown keys are fatal.
RunConfig parse_file(const std::filesystem::path& path, Profile profile = Profile::kDesk);
RunConfig parse_text(const std::string& text, Profile profile = Profile::kDesk);

}  // namespace imclean::config
