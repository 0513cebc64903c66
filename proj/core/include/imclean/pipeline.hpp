#pragma once

#include "imclean/config.hpp"
#include "imclean/manifest.hpp"

#include <filesystem>
#include <vector>

namespace imclean::pipeline {

// Stage artifact names inside the output directory.
namespace files {
inline constexpr const char* kResolvedConfig = "resolved_config.txt";
inline constexpr const char* kTruthTotal = "truth.total.imc";
inline constexpr const char* kTruthHi = "truth.hi.imc";
inline constexpr const char* kTruthFg = "truth.fg.imc";
inline constexpr const char* kContaminated = "contaminated.imc";
inline constexpr const char* kMaskTruth = "mask.truth.imm";
inline constexpr const char* kMaskChannels = "mask.channels.imm";
inline constexpr const char* kMaskOutliers = "mask.outliers.imm";
inline constexpr const char* kMaskDetected = "mask.detected.imm";
inline constexpr const char* kFlagReport = "flag_report.csv";
inline constexpr const char* kSummary = "summary.csv";

/// restored.<variant>.imc for variant in {a, b, c, d}.
std::string restored(char variant);
/// residual.<method>.<variant>.imc
std::string residual(const std::string& method, char variant);
/// rms_fraction.<method>.<variant>.csv
std::string rms_fraction(const std::string& method, char variant);
/// rms_vs_modes.<variant>.csv (SVD sweep)
std::string rms_vs_modes(char variant);
/// spectrum.<method>.<variant>.csv
std::string spectrum(const std::string& method, char variant);
/// cleanlog.<method>.<variant>.csv
std::string clean_log(const std::string& method, char variant);
}  // namespace files

std::string config_hash(const config::RunConfig& cfg);

/// Applies the config's thread cap to the process-wide worker pool.
void apply_thread_config(const config::RunConfig& cfg);

using FileList = std::vector<std::filesystem::path>;

/// Stage 1: simulate the truth sky; writes truth cubes + resolved config.
FileList run_simulate(const config::RunConfig& cfg);

/// Stage 2: inject RFI and run the 3-sigma flagging; needs stage 1 files.
FileList run_contaminate(const config::RunConfig& cfg);

/// Stage 3: build the four restoration variants; needs stage 2 files.
FileList run_restore(const config::RunConfig& cfg);

/// Stage 4: downsample, remove foregrounds, and evaluate; needs stages 1-3.
FileList run_clean_eval(const config::RunConfig& cfg);

/// All stages in order; returns the verified manifest (also written to
/// manifest.json / timings.json in the output directory).
RunManifest run_all(const config::RunConfig& cfg);

}  // namespace imclean::pipeline
