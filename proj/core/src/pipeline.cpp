#include "imclean/pipeline.hpp"

#include "imclean/clean.hpp"
#include "imclean/contamination.hpp"
#include "imclean/cube_io.hpp"
#include "imclean/errors.hpp"
#include "imclean/evaluate.hpp"
#include "imclean/parallel.hpp"
#include "imclean/restore.hpp"
#include "imclean/skysim.hpp"
#include "imclean/version.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>
#include <tuple>

namespace imclean::pipeline {

namespace fs = std::filesystem;

namespace files {
std::string restored(char variant) { return std::string("restored.") + variant + ".imc"; }
std::string residual(const std::string& method, char variant) {
  return "residual." + method + "." + variant + ".imc";
}
std::string rms_fraction(const std::string& method, char variant) {
  return "rms_fraction." + method + "." + variant + ".csv";
}
std::string rms_vs_modes(char variant) { return std::string("rms_vs_modes.") + variant + ".csv"; }
std::string spectrum(const std::string& method, char variant) {
  return "spectrum." + method + "." + variant + ".csv";
}
std::string clean_log(const std::string& method, char variant) {
  return "cleanlog." + method + "." + variant + ".csv";
}
}  // namespace files

namespace {

constexpr char kVariants[] = {'a', 'b', 'c', 'd'};

std::ofstream open_csv(const fs::path& path, const std::string& hash) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string());
  os.precision(17);
  os << "# config_hash=" << hash << "\n";
  return os;
}

double rms_of(const Matrix& m, bool about_mean) {
  if (m.size() == 0) throw ValueError("rms: empty input");
  if (!about_mean) return eval::rms(m);
  const double mean = m.mean();
  return std::sqrt((m.array() - mean).square().sum() / static_cast<double>(m.size()));
}

std::unique_ptr<restore::Restorer> build_restorer(const config::RunConfig& cfg) {
  if (cfg.restorer == "mean_fill") return restore::make_mean_fill_restorer();
  if (cfg.restorer == "spectral_poly")
    return restore::make_spectral_poly_restorer(cfg.restore_poly_order);
  if (cfg.restorer == "low_rank")
    return restore::make_low_rank_restorer(cfg.restore_rank, cfg.restore_tol,
                                           cfg.restore_max_iter);
  if (cfg.restorer == "external")
    return restore::make_external_restorer(cfg.restore_external_path);
  throw ConfigError("unknown restorer " + cfg.restorer);
}

Mask and_not(const Mask& a, const Mask& b) { return Mask{a.flags && !b.flags}; }

clean::IcaContrast contrast_of(const config::RunConfig& cfg) {
  return cfg.ica_contrast == "logcosh" ? clean::IcaContrast::kLogCosh
                                       : clean::IcaContrast::kCubic;
}

// Removal dispatch shared by the cube-level and patch-level paths.
clean::CleanResult run_method(const config::RunConfig& cfg, const std::string& method,
                              const Matrix& data) {
  if (method == "polyfit") return clean::remove_polyfit(data, cfg.clean_poly_order);
  if (method == "svd") {
    if (!cfg.svd_center) return clean::remove_svd_modes(data, cfg.svd_modes);
    Matrix centered = data;
    const Eigen::RowVectorXd col_means = data.colwise().mean();
    centered.rowwise() -= col_means;
    return clean::remove_svd_modes(centered, cfg.svd_modes);
  }
  if (method == "ica")
    return clean::remove_ica_components(data, cfg.ica_components, cfg.seed,
                                        cfg.ica_add_back_means, contrast_of(cfg));
  throw ConfigError("unknown clean method " + method);
}

struct VariantData {
  char label;
  SpectralCube full;      // full resolution, restored per the variant
  Mask residual_mask;     // detected cells this variant did not restore
  SpectralCube reduced;   // downsampled + empty channels filled
};

}  // namespace

std::string config_hash(const config::RunConfig& cfg) {
  return sha256_hex(cfg.canonical_text());
}

void apply_thread_config(const config::RunConfig& cfg) {
  const int n = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  set_worker_threads(n > 0 ? n : 1);
}

FileList run_simulate(const config::RunConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  FileList written;

  {
    std::ofstream os(out / files::kResolvedConfig, std::ios::trunc);
    if (!os) throw IoError("cannot write resolved config");
    os << cfg.canonical_text();
    written.push_back(out / files::kResolvedConfig);
  }

  const auto sky = skysim::compose_sky(cfg.sky, cfg.cosmology, cfg.hi,
                                       cfg.resolve_foregrounds(), cfg.seed);
  write_cube(sky.total, out / files::kTruthTotal);
  write_cube(sky.hi, out / files::kTruthHi);
  write_cube(sky.foreground, out / files::kTruthFg);
  written.push_back(out / files::kTruthTotal);
  written.push_back(out / files::kTruthHi);
  written.push_back(out / files::kTruthFg);
  return written;
}

FileList run_contaminate(const config::RunConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  const std::string hash = config_hash(cfg);
  const SpectralCube truth = read_cube(out / files::kTruthTotal);

  SpectralCube contaminated;
  Mask truth_mask;
  if (!cfg.rfi_template_cube.empty()) {
    // Transplanted interference: recorded template + its mask.
    const SpectralCube rfi_template = read_cube(cfg.rfi_template_cube);
    const Mask template_mask = read_mask(cfg.rfi_template_mask);
    std::tie(contaminated, truth_mask) =
        contam::apply_rfi_template(truth, rfi_template, template_mask);
  } else {
    contam::RfiModel rfi = cfg.rfi;
    rfi.seed = cfg.seed;
    std::tie(contaminated, truth_mask) = contam::inject_rfi(truth, rfi);
  }

  const auto channel_report = contam::flag_channels(contaminated, cfg.flag_max_iterations);
  const auto outlier_report = contam::flag_outliers(contaminated, channel_report.mask,
                                                    cfg.flag_include_masked_in_stats);
  const Mask detected = contam::combine_flags(channel_report.mask, outlier_report.mask);

  FileList written;
  write_cube(contaminated, out / files::kContaminated);
  written.push_back(out / files::kContaminated);
  const auto& axis = contaminated.axis;
  write_mask(truth_mask, out / files::kMaskTruth, axis, contaminated.grid);
  write_mask(channel_report.mask, out / files::kMaskChannels, axis, contaminated.grid);
  write_mask(outlier_report.mask, out / files::kMaskOutliers, axis, contaminated.grid);
  write_mask(detected, out / files::kMaskDetected, axis, contaminated.grid);
  written.push_back(out / files::kMaskTruth);
  written.push_back(out / files::kMaskChannels);
  written.push_back(out / files::kMaskOutliers);
  written.push_back(out / files::kMaskDetected);

  auto os = open_csv(out / files::kFlagReport, hash);
  os << "stat,value\n";
  os << "flagged_channel_count," << channel_report.flagged_channels.size() << "\n";
  os << "channel_flag_iterations," << channel_report.iterations << "\n";
  os << "outlier_count," << outlier_report.outlier_count << "\n";
  os << "truth_masked_fraction," << truth_mask.fraction() << "\n";
  os << "detected_masked_fraction," << detected.fraction() << "\n";
  for (Index c : channel_report.flagged_channels) os << "flagged_channel," << c << "\n";
  written.push_back(out / files::kFlagReport);
  return written;
}

FileList run_restore(const config::RunConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  const SpectralCube contaminated = read_cube(out / files::kContaminated);
  const Mask channel_mask = read_mask(out / files::kMaskChannels);
  const Mask outlier_mask = read_mask(out / files::kMaskOutliers);

  restore::DatasetVariants variants;
  if (cfg.restorer == "external") {
    // One externally restored cube supplies values for every masked cell
    // (validated against the union mask); the variants differ by which
    // masked cells accept those values.
    const Mask union_mask = contam::combine_flags(channel_mask, outlier_mask);
    const Matrix external = restore::ingest_external_restoration(
        contaminated.data, union_mask, cfg.restore_external_path, 1e-6,
        out / "external_rejects.csv");
    const auto splice = [&](const Mask& m) {
      SpectralCube v = contaminated;
      for (Index r = 0; r < v.rows(); ++r)
        for (Index c = 0; c < v.channels(); ++c)
          if (m.flags(r, c)) v.data(r, c) = external(r, c);
      return v;
    };
    variants.original = contaminated;
    variants.outliers_restored = splice(outlier_mask);
    variants.channels_restored = splice(channel_mask);
    variants.fully_restored = splice(union_mask);
  } else {
    const auto restorer = build_restorer(cfg);
    variants = restore::restore_dataset_variants(contaminated, channel_mask, outlier_mask,
                                                 *restorer);
    // Built-in restorers must hand back unmasked cells bit-identical.
    const auto check = [&](const SpectralCube& v, const Mask& m, char label) {
      for (Index r = 0; r < v.rows(); ++r)
        for (Index c = 0; c < v.channels(); ++c)
          if (!m.flags(r, c) && v.data(r, c) != contaminated.data(r, c))
            throw ContractViolation(std::string("restorer altered unmasked cell in variant ") +
                                    label);
    };
    check(variants.outliers_restored, outlier_mask, 'b');
    check(variants.channels_restored, channel_mask, 'c');
    check(variants.fully_restored, contam::combine_flags(channel_mask, outlier_mask), 'd');
  }

  FileList written;
  const SpectralCube* cubes[4] = {&variants.original, &variants.outliers_restored,
                                  &variants.channels_restored, &variants.fully_restored};
  for (int i = 0; i < 4; ++i) {
    const fs::path p = out / files::restored(kVariants[i]);
    write_cube(*cubes[i], p);
    written.push_back(p);
  }
  return written;
}

FileList run_clean_eval(const config::RunConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  const std::string hash = config_hash(cfg);
  FileList written;

  const SpectralCube truth_hi = read_cube(out / files::kTruthHi);
  const SpectralCube truth_fg = read_cube(out / files::kTruthFg);
  const Mask channel_mask = read_mask(out / files::kMaskChannels);
  const Mask outlier_mask = read_mask(out / files::kMaskOutliers);
  const Mask detected = contam::combine_flags(channel_mask, outlier_mask);

  // Assemble the four variants with the cells each one still cannot trust.
  std::vector<VariantData> variants;
  for (char label : kVariants) {
    VariantData v;
    v.label = label;
    v.full = read_cube(out / files::restored(label));
    switch (label) {
      case 'a': v.residual_mask = detected; break;
      case 'b': v.residual_mask = and_not(detected, outlier_mask); break;
      case 'c': v.residual_mask = and_not(detected, channel_mask); break;
      default:  v.residual_mask = Mask::zeros(detected.rows(), detected.channels());
    }
    auto [reduced, reduced_mask] = downsample_channels(v.full, v.residual_mask,
                                                       cfg.downsample_factor);
    v.reduced = fill_empty_channels(reduced, reduced_mask);
    variants.push_back(std::move(v));
  }

  // Fiducial: the HI truth put through the same channel averaging.
  const Mask no_mask = Mask::zeros(truth_hi.rows(), truth_hi.channels());
  const SpectralCube fiducial =
      downsample_channels(truth_hi, no_mask, cfg.downsample_factor).first;

  const auto cl_bins = cfg.resolve_cl_bins();
  const auto fraction_edges = cfg.resolve_fraction_edges();

  // Fiducial channel-averaged spectrum, written once.
  {
    const auto cmp = eval::spectrum_comparison(fiducial, fiducial, cl_bins);
    auto os = open_csv(out / "spectrum.fiducial.csv", hash);
    os << "l_center,mode_count,cl_value\n";
    for (std::size_t b = 0; b < cmp.fiducial.cl.size(); ++b)
      os << cmp.fiducial.bin_centers[b] << ',' << cmp.fiducial.mode_counts[b] << ','
         << cmp.fiducial.cl[b] << "\n";
    written.push_back(out / "spectrum.fiducial.csv");
  }

  // Restoration-quality metrics per variant (full resolution, vs truth FG).
  struct VariantMetrics {
    double cm_cu = std::numeric_limits<double>::quiet_NaN();
    double ssim = std::numeric_limits<double>::quiet_NaN();
    double psnr = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<VariantMetrics> vmetrics(4);
  const double fg_range = truth_fg.data.maxCoeff() - truth_fg.data.minCoeff();
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const auto& v = variants[i];
    restore::RestorationRecord record;
    record.restorer_name = cfg.restorer;
    record.masked_fraction = detected.fraction();
    record.predicted = &v.full.data;
    record.truth_foreground = &truth_fg.data;
    record.mask = &detected;
    record.validate();
    try {
      vmetrics[i].cm_cu = eval::cm_cu(*record.predicted, *record.truth_foreground, *record.mask);
    } catch (const ValueError&) {
      // degenerate mask or variance: leave NaN
    }
    if (fg_range > 0.0) {
      vmetrics[i].ssim =
          cfg.ssim_window > 1
              ? eval::ssim_sliding(v.full.data, truth_fg.data, fg_range, cfg.ssim_window)
              : eval::ssim(v.full.data, truth_fg.data, fg_range);
      vmetrics[i].psnr = eval::psnr(v.full.data, truth_fg.data, fg_range);
    }
  }

  // Patch sets are drawn once per variant; identical seeds give identical
  // windows across variants, so comparisons are paired.
  std::vector<std::vector<PatchSample>> patches(4);
  for (std::size_t i = 0; i < variants.size(); ++i) {
    patches[i] = contam::extract_patches(variants[i].full, detected, cfg.patch_size,
                                         cfg.patch_max_fraction, cfg.seed);
    const std::string index_name =
        std::string("patches.") + variants[i].label + ".index.csv";
    auto os = open_csv(out / index_name, hash);
    os << "id,origin_row,origin_channel,masked_fraction\n";
    for (std::size_t p = 0; p < patches[i].size(); ++p)
      os << p << ',' << patches[i][p].origin_row << ',' << patches[i][p].origin_channel << ','
         << patches[i][p].masked_fraction << "\n";
    written.push_back(out / index_name);
    if (cfg.export_patches) {
      const fs::path dir = out / "patches" / std::string(1, variants[i].label);
      contam::write_patches(dir, patches[i], variants[i].full.axis);
      written.push_back(dir / "index.csv");
    }
  }

  // SVD mode sweep per variant (Eckart-Young energies from one SVD/patch).
  if (std::find(cfg.clean_methods.begin(), cfg.clean_methods.end(), "svd") !=
      cfg.clean_methods.end()) {
    for (std::size_t i = 0; i < variants.size(); ++i) {
      auto os = open_csv(out / files::rms_vs_modes(variants[i].label), hash);
      os << "k,patch_count,p25,median,p75\n";
      const Index max_k = std::min<Index>(cfg.svd_sweep_max, cfg.patch_size);
      std::vector<std::vector<double>> rms_per_patch(patches[i].size());
      parallel_for(patches[i].size(), [&](std::size_t p) {
        const auto& patch = patches[i][p];
        const auto svd = clean::svd_decompose(patch.data);
        const auto& sv = svd.singular_values;
        double energy = sv.array().square().sum();
        const double cells = static_cast<double>(patch.data.size());
        for (Index k = 0; k <= max_k; ++k) {
          if (k > 0 && k <= sv.size()) energy -= sv(k - 1) * sv(k - 1);
          rms_per_patch[p].push_back(std::sqrt(std::max(energy, 0.0) / cells));
        }
      });
      std::vector<std::vector<double>> rms_per_k(static_cast<std::size_t>(max_k) + 1);
      for (const auto& row : rms_per_patch)
        for (std::size_t k = 0; k < row.size(); ++k) rms_per_k[k].push_back(row[k]);
      for (Index k = 0; k <= max_k; ++k) {
        auto& values = rms_per_k[static_cast<std::size_t>(k)];
        if (values.empty()) {
          os << k << ",0,nan,nan,nan\n";
          continue;
        }
        std::vector<std::pair<double, double>> tagged;
        for (double v : values) tagged.emplace_back(0.0, v);
        const auto stats = eval::bin_by_masked_fraction(tagged, {-0.5, 0.5});
        os << k << ',' << values.size() << ',' << stats.p25[0] << ',' << stats.median[0] << ','
           << stats.p75[0] << "\n";
      }
      written.push_back(out / files::rms_vs_modes(variants[i].label));
    }
  }

  // Per method x variant: residual cube, spectra, fraction-binned patch RMS.
  auto summary = open_csv(out / files::kSummary, hash);
  summary << "method,variant,rms,cm_cu,ssim,psnr,delta_log_cl\n";
  for (const auto& method : cfg.clean_methods) {
    for (std::size_t i = 0; i < variants.size(); ++i) {
      const auto& v = variants[i];
      const auto result = run_method(cfg, method, v.reduced.data);

      SpectralCube residual_cube = v.reduced;
      residual_cube.data = result.residual;
      const fs::path residual_path = out / files::residual(method, v.label);
      write_cube(residual_cube, residual_path);
      written.push_back(residual_path);

      const auto cmp = eval::spectrum_comparison(residual_cube, fiducial, cl_bins);
      {
        auto os = open_csv(out / files::spectrum(method, v.label), hash);
        os << "l_center,mode_count,cl_value\n";
        for (std::size_t b = 0; b < cmp.residual.cl.size(); ++b)
          os << cmp.residual.bin_centers[b] << ',' << cmp.residual.mode_counts[b] << ','
             << cmp.residual.cl[b] << "\n";
        written.push_back(out / files::spectrum(method, v.label));
      }

      {
        auto os = open_csv(out / files::clean_log(method, v.label), hash);
        os << "method,variant,parameter,value\n";
        os << method << ',' << v.label << ",removed_components," << result.removed_components
           << "\n";
        for (std::size_t s = 0; s < result.component_strengths.size(); ++s)
          os << method << ',' << v.label << ",component_" << s << ','
             << result.component_strengths[s] << "\n";
        written.push_back(out / files::clean_log(method, v.label));
      }

      // Patch-level RMS binned by masked fraction.
      constexpr double kSkipped = -1.0;
      std::vector<double> patch_rms(patches[i].size(), kSkipped);
      parallel_for(patches[i].size(), [&](std::size_t p) {
        try {
          const auto patch_result = run_method(cfg, method, patches[i][p].data);
          patch_rms[p] = rms_of(patch_result.residual, cfg.rms_about_mean);
        } catch (const ValueError&) {
          // degenerate patch for this method (e.g. no usable dimensions)
        }
      });
      std::vector<std::pair<double, double>> samples;
      for (std::size_t p = 0; p < patches[i].size(); ++p)
        if (patch_rms[p] != kSkipped)
          samples.emplace_back(patches[i][p].masked_fraction, patch_rms[p]);
      const auto stats = eval::bin_by_masked_fraction(samples, fraction_edges);
      {
        auto os = open_csv(out / files::rms_fraction(method, v.label), hash);
        os << "bin_lo,bin_hi,count,p25,median,p75\n";
        for (std::size_t b = 0; b + 1 < stats.edges.size(); ++b)
          os << stats.edges[b] << ',' << stats.edges[b + 1] << ',' << stats.counts[b] << ','
             << stats.p25[b] << ',' << stats.median[b] << ',' << stats.p75[b] << "\n";
        written.push_back(out / files::rms_fraction(method, v.label));
      }

      summary << method << ',' << v.label << ',' << rms_of(result.residual, cfg.rms_about_mean)
              << ',' << vmetrics[i].cm_cu << ',' << vmetrics[i].ssim << ',';
      if (std::isinf(vmetrics[i].psnr))
        summary << "exact";
      else
        summary << vmetrics[i].psnr;
      summary << ',' << cmp.mean_abs_dlog10 << "\n";
    }
  }
  written.push_back(out / files::kSummary);
  return written;
}

RunManifest run_all(const config::RunConfig& cfg) {
  cfg.validate();
  apply_thread_config(cfg);
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);

  RunManifest manifest;
  manifest.config_hash = config_hash(cfg);
  manifest.version = kVersion;

  using Stage = FileList (*)(const config::RunConfig&);
  const std::pair<const char*, Stage> stages[] = {
      {"simulate", &run_simulate},
      {"contaminate", &run_contaminate},
      {"restore", &run_restore},
      {"clean_eval", &run_clean_eval},
  };
  for (const auto& [name, stage] : stages) {
    const auto start = std::chrono::steady_clock::now();
    FileList written;
    try {
      written = stage(cfg);
    } catch (const Error&) {
      std::fprintf(stderr, "[imclean] stage %s failed\n", name);
      throw;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    manifest.timings.push_back({name, elapsed.count()});
    for (const auto& f : written) manifest.add_file(out, f);
  }

  manifest.verify(out);
  manifest.write(out);
  return manifest;
}

}  // namespace imclean::pipeline
