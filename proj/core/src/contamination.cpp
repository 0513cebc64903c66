#include "imclean/contamination.hpp"

#include "imclean/cube_io.hpp"
#include "imclean/errors.hpp"
#include "imclean/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace imclean::contam {

namespace {

double cube_rms(const Matrix& data) {
  return std::sqrt(data.array().square().sum() / static_cast<double>(data.size()));
}

// Log-uniform amplitude in [lo, hi] * rms from one uniform draw.
double amplitude(double u, double lo, double hi, double rms) {
  return rms * lo * std::pow(hi / lo, u);
}

struct MeanSigma {
  double mean = 0.0;
  double sigma = 0.0;
  Index n = 0;
};

MeanSigma mean_sigma(const std::vector<double>& v) {
  MeanSigma out;
  out.n = static_cast<Index>(v.size());
  if (v.empty()) return out;
  double s = 0.0;
  for (double x : v) s += x;
  out.mean = s / static_cast<double>(v.size());
  double q = 0.0;
  for (double x : v) q += (x - out.mean) * (x - out.mean);
  out.sigma = std::sqrt(q / static_cast<double>(v.size()));
  return out;
}

}  // namespace

void RfiModel::validate() const {
  if (narrowband_channel_prob < 0.0 || narrowband_channel_prob > 1.0)
    throw ValueError("RfiModel: narrowband_channel_prob must lie in [0,1]");
  if (outlier_rate < 0.0 || outlier_rate > 1.0)
    throw ValueError("RfiModel: outlier_rate must lie in [0,1]");
  if (broadband_rate < 0.0) throw ValueError("RfiModel: broadband_rate must be >= 0");
  if (broadband_width_min < 1 || broadband_width_max < broadband_width_min)
    throw ValueError("RfiModel: broadband width range must be positive and ordered");
  if (!(amplitude_scale_min > 0.0) || amplitude_scale_max < amplitude_scale_min)
    throw ValueError("RfiModel: amplitude range must be positive and ordered");
}

std::pair<SpectralCube, Mask> inject_rfi(const SpectralCube& cube, const RfiModel& model) {
  model.validate();
  if (!cube.data.allFinite()) throw ValueError("inject_rfi: cube must be finite");

  SpectralCube out = cube;
  Mask truth = Mask::zeros(cube.rows(), cube.channels());
  const double rms = cube_rms(cube.data);
  const Index rows = cube.rows();
  const Index cols = cube.channels();

  // Persistent narrowband channels: a log-uniform base level per channel,
  // modulated cycle-to-cycle so the contamination is not a rank-one
  // structure the way a constant offset would be.
  {
    rng::CounterRng channel_rng(model.seed, rng::streams::kRfiNarrowband);
    rng::CounterRng cell_rng(model.seed, rng::streams::kRfiNarrowbandCell);
    for (Index c = 0; c < cols; ++c) {
      const std::uint64_t slot = static_cast<std::uint64_t>(c);
      if (channel_rng.uniform_at(slot, 0) >= model.narrowband_channel_prob) continue;
      const double base = amplitude(channel_rng.uniform_at(slot, 1), model.amplitude_scale_min,
                                    model.amplitude_scale_max, rms);
      if (base == 0.0) continue;
      for (Index i = 0; i < rows; ++i) {
        const std::uint64_t cell = static_cast<std::uint64_t>(i * cols + c);
        // log-uniform modulation in [1/4, 4]
        const double factor = 0.25 * std::pow(16.0, cell_rng.uniform_at(cell, 0));
        out.data(i, c) += base * factor;
        truth.flags(i, c) = true;
      }
    }
  }

  // Broadband bursts: one cycle wide, a contiguous channel span each.
  {
    rng::Sequence seq(model.seed, rng::streams::kRfiBroadband);
    // Deterministic Poisson count via inversion on one uniform.
    const double lambda = model.broadband_rate * static_cast<double>(rows) / 1000.0;
    Index n_bursts = 0;
    if (lambda > 0.0) {
      double u = seq.next_uniform();
      double p = std::exp(-lambda);
      double cdf = p;
      while (u > cdf && n_bursts < 64 * (1 + static_cast<Index>(lambda))) {
        ++n_bursts;
        p *= lambda / static_cast<double>(n_bursts);
        cdf += p;
      }
    }
    for (Index b = 0; b < n_bursts; ++b) {
      const Index row = static_cast<Index>(seq.next_below(static_cast<std::uint64_t>(rows)));
      const Index span = model.broadband_width_min +
                         static_cast<Index>(seq.next_below(static_cast<std::uint64_t>(
                             model.broadband_width_max - model.broadband_width_min + 1)));
      const Index width = std::min(span, cols);
      const Index start = static_cast<Index>(
          seq.next_below(static_cast<std::uint64_t>(cols - width + 1)));
      const double base = amplitude(seq.next_uniform(), model.amplitude_scale_min,
                                    model.amplitude_scale_max, rms);
      if (base == 0.0) continue;
      for (Index c = start; c < start + width; ++c) {
        const double factor = 0.5 * std::pow(4.0, seq.next_uniform());  // [1/2, 2]
        if (!truth.flags(row, c)) out.data(row, c) += base * factor;
        truth.flags(row, c) = true;
      }
    }
  }

  // Scattered outliers: one Bernoulli + amplitude per cell.
  if (model.outlier_rate > 0.0) {
    rng::CounterRng r(model.seed, rng::streams::kRfiOutliers);
    for (Index i = 0; i < rows; ++i) {
      for (Index c = 0; c < cols; ++c) {
        const std::uint64_t slot = static_cast<std::uint64_t>(i * cols + c);
        if (r.uniform_at(slot, 0) >= model.outlier_rate) continue;
        const double amp = amplitude(r.uniform_at(slot, 1), model.amplitude_scale_min,
                                     model.amplitude_scale_max, rms);
        if (amp == 0.0) continue;
        if (!truth.flags(i, c)) out.data(i, c) += amp;
        truth.flags(i, c) = true;
      }
    }
  }

  return {std::move(out), std::move(truth)};
}

std::pair<SpectralCube, Mask> apply_rfi_template(const SpectralCube& cube,
                                                 const SpectralCube& rfi_template,
                                                 const Mask& template_mask) {
  require_congruent(cube, template_mask);
  if (rfi_template.rows() != cube.rows() || rfi_template.channels() != cube.channels())
    throw ValueError("apply_rfi_template: template shape does not match the cube");
  if (!rfi_template.data.allFinite())
    throw ValueError("apply_rfi_template: non-finite template values");

  SpectralCube out = cube;
  Mask truth = Mask::zeros(cube.rows(), cube.channels());
  for (Index r = 0; r < cube.rows(); ++r)
    for (Index c = 0; c < cube.channels(); ++c) {
      if (!template_mask.flags(r, c)) continue;
      out.data(r, c) += rfi_template.data(r, c);
      truth.flags(r, c) = true;
    }
  return {std::move(out), std::move(truth)};
}

FlagReport flag_channels(const SpectralCube& cube, int max_iterations) {
  if (cube.channels() < 2) throw ValueError("flag_channels: need at least 2 channels");
  const Index cols = cube.channels();
  std::vector<double> channel_mean(static_cast<std::size_t>(cols));
  for (Index c = 0; c < cols; ++c)
    channel_mean[static_cast<std::size_t>(c)] = cube.data.col(c).mean();

  std::vector<bool> flagged(static_cast<std::size_t>(cols), false);
  FlagReport report;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<double> surviving;
    for (Index c = 0; c < cols; ++c)
      if (!flagged[static_cast<std::size_t>(c)])
        surviving.push_back(channel_mean[static_cast<std::size_t>(c)]);
    if (surviving.size() < 2) break;
    const MeanSigma ms = mean_sigma(surviving);
    if (ms.sigma == 0.0) break;  // degenerate: nothing to flag
    bool changed = false;
    for (Index c = 0; c < cols; ++c) {
      if (flagged[static_cast<std::size_t>(c)]) continue;
      const double m = channel_mean[static_cast<std::size_t>(c)];
      if (m < ms.mean - 3.0 * ms.sigma || m > ms.mean + 3.0 * ms.sigma) {
        flagged[static_cast<std::size_t>(c)] = true;
        changed = true;
      }
    }
    report.iterations = it + 1;
    if (!changed) break;
  }

  report.mask = Mask::zeros(cube.rows(), cols);
  for (Index c = 0; c < cols; ++c) {
    if (!flagged[static_cast<std::size_t>(c)]) continue;
    report.flagged_channels.push_back(c);
    report.mask.flags.col(c) = true;
  }
  return report;
}

FlagReport flag_outliers(const SpectralCube& cube, const Mask& prior_mask,
                         bool include_masked_in_stats) {
  require_congruent(cube, prior_mask);
  FlagReport report;
  report.mask = Mask::zeros(cube.rows(), cube.channels());
  report.iterations = 1;
  for (Index r = 0; r < cube.rows(); ++r) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(cube.channels()));
    for (Index c = 0; c < cube.channels(); ++c)
      if (include_masked_in_stats || !prior_mask.flags(r, c)) values.push_back(cube.data(r, c));
    if (values.empty()) continue;  // fully masked row
    const MeanSigma ms = mean_sigma(values);
    if (ms.sigma == 0.0) continue;
    for (Index c = 0; c < cube.channels(); ++c) {
      if (prior_mask.flags(r, c)) continue;
      const double v = cube.data(r, c);
      if (v < ms.mean - 3.0 * ms.sigma || v > ms.mean + 3.0 * ms.sigma) {
        report.mask.flags(r, c) = true;
        ++report.outlier_count;
      }
    }
  }
  return report;
}

Mask combine_flags(const Mask& a, const Mask& b) {
  if (a.rows() != b.rows() || a.channels() != b.channels())
    throw ValueError("combine_flags: shape mismatch");
  return Mask{a.flags || b.flags};
}

std::vector<PatchSample> extract_patches(const SpectralCube& cube, const Mask& mask,
                                         Index patch_size, double max_fraction,
                                         std::uint64_t seed) {
  require_congruent(cube, mask);
  const Index n1 = cube.rows();
  const Index n2 = cube.channels();
  if (patch_size < 1) throw ValueError("extract_patches: patch size must be >= 1");
  if (n1 < patch_size || n2 < patch_size)
    throw ValueError("extract_patches: cube smaller than patch size");

  const Index attempts = static_cast<Index>(
      3.0 * static_cast<double>(n1) * static_cast<double>(n2) /
      (static_cast<double>(patch_size) * static_cast<double>(patch_size)));

  const rng::CounterRng r(seed, rng::streams::kPatchOrigins);
  std::vector<PatchSample> out;
  const double cells = static_cast<double>(patch_size) * static_cast<double>(patch_size);
  for (Index d = 0; d < attempts; ++d) {
    const std::uint64_t slot = static_cast<std::uint64_t>(d);
    const auto draw = [&](std::uint64_t idx, Index bound) {
      return static_cast<Index>(
          (static_cast<unsigned __int128>(r.uint64_at(slot, idx)) *
           static_cast<std::uint64_t>(bound)) >> 64);
    };
    const Index row0 = draw(0, n1 - patch_size + 1);
    const Index ch0 = draw(1, n2 - patch_size + 1);

    PatchSample p;
    p.origin_row = row0;
    p.origin_channel = ch0;
    p.mask = mask.flags.block(row0, ch0, patch_size, patch_size);
    p.masked_fraction = static_cast<double>(p.mask.count()) / cells;
    if (p.masked_fraction > max_fraction) continue;  // discarded, not redrawn
    p.data = cube.data.block(row0, ch0, patch_size, patch_size);
    out.push_back(std::move(p));
  }
  return out;
}

void write_patch_index(const std::filesystem::path& csv_path,
                       const std::vector<PatchSample>& patches,
                       const std::string& config_hash) {
  std::ofstream os(csv_path);
  if (!os) throw IoError("cannot open " + csv_path.string());
  if (!config_hash.empty()) os << "# config_hash=" << config_hash << "\n";
  os << "id,origin_row,origin_channel,masked_fraction\n";
  os.precision(17);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    os << i << ',' << patches[i].origin_row << ',' << patches[i].origin_channel << ','
       << patches[i].masked_fraction << "\n";
  }
  if (!os) throw IoError("write failure on " + csv_path.string());
}

void write_patches(const std::filesystem::path& dir, const std::vector<PatchSample>& patches,
                   const FrequencyAxis& axis) {
  std::filesystem::create_directories(dir);
  write_patch_index(dir / "index.csv", patches);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    SpectralCube c;
    c.data = p.data;
    c.axis = FrequencyAxis{axis.frequency(p.origin_channel) - 0.5 * axis.width_hz,
                           axis.width_hz, p.data.cols()};
    write_cube(c, dir / ("patch_" + std::to_string(i) + ".imc"));
    write_mask(Mask{p.mask}, dir / ("patch_" + std::to_string(i) + ".imm"), c.axis);
  }
}

std::vector<PatchSample> read_patches(const std::filesystem::path& dir) {
  std::ifstream is(dir / "index.csv");
  if (!is) throw IoError("cannot open " + (dir / "index.csv").string());
  std::vector<PatchSample> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("id,", 0) == 0) continue;
    PatchSample p;
    std::size_t id = 0;
    char comma;
    std::istringstream ls(line);
    ls >> id >> comma >> p.origin_row >> comma >> p.origin_channel >> comma >> p.masked_fraction;
    if (!ls) throw IoError("malformed patch index line: " + line);
    const SpectralCube c = read_cube(dir / ("patch_" + std::to_string(id) + ".imc"));
    p.data = c.data;
    p.mask = read_mask(dir / ("patch_" + std::to_string(id) + ".imm")).flags;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace imclean::contam
