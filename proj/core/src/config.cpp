#include "imclean/config.hpp"

#include "imclean/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace imclean::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + value + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": '" + value + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad unsigned value for " + key + ": '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: bad boolean value for " + key + ": '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
  return out;
}

skysim::ForegroundModel* find_override(std::vector<skysim::ForegroundModel>& v,
                                       const std::string& name) {
  for (auto& m : v)
    if (m.name == name) return &m;
  return nullptr;
}

// foreground.<name>.<field> override; creates the component entry on first use.
bool apply_foreground_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string prefix = "foreground.";
  if (key.rfind(prefix, 0) != 0) return false;
  const std::string rest = key.substr(prefix.size());
  const auto dot = rest.find('.');
  if (dot == std::string::npos) return false;
  const std::string name = rest.substr(0, dot);
  const std::string field = rest.substr(dot + 1);

  skysim::ForegroundModel* m = find_override(cfg.foreground_overrides, name);
  if (m == nullptr) {
    // Start from the Table-row default when the name matches a known
    // component, otherwise from a blank model.
    skysim::ForegroundModel base;
    base.name = name;
    for (const auto& d : skysim::default_foregrounds())
      if (d.name == name) base = d;
    cfg.foreground_overrides.push_back(base);
    m = &cfg.foreground_overrides.back();
  }
  if (field == "amplitude_mk2") m->amplitude_mk2 = parse_double(key, value);
  else if (field == "beta") m->beta = parse_double(key, value);
  else if (field == "alpha") m->alpha = parse_double(key, value);
  else if (field == "xi") m->xi = parse_double(key, value);
  else if (field == "l_ref") m->l_ref = parse_double(key, value);
  else if (field == "nu_ref_hz") m->nu_ref_hz = parse_double(key, value);
  else throw ConfigError("config: unknown key '" + key + "'");
  return true;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"run.seed", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_uint(k, v);
         c.seed_set = true;
       }},
      {"run.output_dir", [](RunConfig& c, const std::string&, const std::string& v) {
         c.output_dir = v;
       }},
      {"run.threads", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.threads = static_cast<int>(parse_int(k, v));
       }},
      {"sky.n_pix", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sky.n_pix = static_cast<Index>(parse_int(k, v));
       }},
      {"sky.ra_min_deg", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sky.ra_min_deg = parse_double(k, v);
       }},
      {"sky.ra_max_deg", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sky.ra_max_deg = parse_double(k, v);
       }},
      {"sky.dec_min_deg", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sky.dec_min_deg = parse_double(k, v);
       }},
      {"sky.dec_max_deg", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sky.dec_max_deg = parse_double(k, v);
       }},
      {"sky.n_channels", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sky.axis.n_channels = static_cast<Index>(parse_int(k, v));
       }},
      {"sky.start_frequency_hz", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sky.axis.start_hz = parse_double(k, v);
       }},
      {"sky.channel_width_hz", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sky.axis.width_hz = parse_double(k, v);
       }},
      {"cosmology.omega_b", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cosmology.omega_b = parse_double(k, v);
       }},
      {"cosmology.omega_m", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cosmology.omega_m = parse_double(k, v);
       }},
      {"cosmology.omega_lambda", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cosmology.omega_lambda = parse_double(k, v);
       }},
      {"cosmology.h", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cosmology.h = parse_double(k, v);
       }},
      {"cosmology.x_hi", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cosmology.x_hi = parse_double(k, v);
       }},
      {"hi.cl_amplitude", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.hi.cl_amplitude = parse_double(k, v);
       }},
      {"hi.cl_slope", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.hi.cl_slope = parse_double(k, v);
       }},
      {"hi.frequency_coherence", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.hi.frequency_coherence = parse_double(k, v);
       }},
      {"hi.lognormal", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.hi.lognormal = parse_bool(k, v);
       }},
      {"foreground.components", [](RunConfig& c, const std::string&, const std::string& v) {
         c.foreground_names = split_list(v);
       }},
      {"foreground.allow_empty", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.allow_empty_foregrounds = parse_bool(k, v);
       }},
      {"rfi.broadband_rate", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rfi.broadband_rate = parse_double(k, v);
       }},
      {"rfi.broadband_width_min", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rfi.broadband_width_min = static_cast<Index>(parse_int(k, v));
       }},
      {"rfi.broadband_width_max", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rfi.broadband_width_max = static_cast<Index>(parse_int(k, v));
       }},
      {"rfi.narrowband_channel_prob", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rfi.narrowband_channel_prob = parse_double(k, v);
       }},
      {"rfi.outlier_rate", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rfi.outlier_rate = parse_double(k, v);
       }},
      {"rfi.amplitude_scale_min", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rfi.amplitude_scale_min = parse_double(k, v);
       }},
      {"rfi.amplitude_scale_max", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rfi.amplitude_scale_max = parse_double(k, v);
       }},
      {"rfi.template_cube", [](RunConfig& c, const std::string&, const std::string& v) {
         c.rfi_template_cube = v;
       }},
      {"rfi.template_mask", [](RunConfig& c, const std::string&, const std::string& v) {
         c.rfi_template_mask = v;
       }},
      {"flag.max_iterations", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.flag_max_iterations = static_cast<int>(parse_int(k, v));
       }},
      {"flag.include_masked_in_stats", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.flag_include_masked_in_stats = parse_bool(k, v);
       }},
      {"restore.method", [](RunConfig& c, const std::string&, const std::string& v) {
         c.restorer = v;
       }},
      {"restore.poly_order", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.restore_poly_order = static_cast<int>(parse_int(k, v));
       }},
      {"restore.rank", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.restore_rank = static_cast<Index>(parse_int(k, v));
       }},
      {"restore.tol", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.restore_tol = parse_double(k, v);
       }},
      {"restore.max_iter", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.restore_max_iter = static_cast<int>(parse_int(k, v));
       }},
      {"restore.external_path", [](RunConfig& c, const std::string&, const std::string& v) {
         c.restore_external_path = v;
       }},
      {"clean.methods", [](RunConfig& c, const std::string&, const std::string& v) {
         c.clean_methods = split_list(v);
       }},
      {"clean.poly_order", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.clean_poly_order = static_cast<int>(parse_int(k, v));
       }},
      {"clean.svd_modes", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.svd_modes = static_cast<Index>(parse_int(k, v));
       }},
      {"clean.svd_sweep_max", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.svd_sweep_max = static_cast<Index>(parse_int(k, v));
       }},
      {"clean.ica_components", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ica_components = static_cast<Index>(parse_int(k, v));
       }},
      {"clean.ica_contrast", [](RunConfig& c, const std::string&, const std::string& v) {
         c.ica_contrast = v;
       }},
      {"clean.svd_center", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.svd_center = parse_bool(k, v);
       }},
      {"clean.ica_add_back_means", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ica_add_back_means = parse_bool(k, v);
       }},
      {"downsample.factor", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.downsample_factor = static_cast<Index>(parse_int(k, v));
       }},
      {"evaluate.fraction_edges", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fraction_edges = parse_double_list(k, v);
       }},
      {"evaluate.cl_bins", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cl_bin_edges = parse_double_list(k, v);
       }},
      {"evaluate.export_patches", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.export_patches = parse_bool(k, v);
       }},
      {"evaluate.rms_about_mean", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rms_about_mean = parse_bool(k, v);
       }},
      {"evaluate.ssim_window", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ssim_window = static_cast<Index>(parse_int(k, v));
       }},
      {"patch.size", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.patch_size = static_cast<Index>(parse_int(k, v));
       }},
      {"patch.max_fraction", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.patch_max_fraction = parse_double(k, v);
       }},
  };

  const auto it = setters.find(key);
  if (it != setters.end()) {
    it->second(cfg, key, value);
    return;
  }
  if (apply_foreground_key(cfg, key, value)) return;
  throw ConfigError("config: unknown key '" + key + "'");
}

}  // namespace

RunConfig profile_defaults(Profile profile) {
  RunConfig cfg;
  cfg.sky.ra_min_deg = 20.0;
  cfg.sky.ra_max_deg = 50.0;
  cfg.sky.dec_min_deg = 25.0;
  cfg.sky.dec_max_deg = 55.0;
  cfg.sky.axis.start_hz = 800.0e6;
  if (profile == Profile::kPaper) {
    cfg.sky.n_pix = 512;
    cfg.sky.axis.n_channels = 1080;
    cfg.patch_size = 256;
    cfg.downsample_factor = 20;  // 1080 -> 54 channels
    cfg.rfi.broadband_width_max = 32;
    cfg.rfi.amplitude_scale_min = 10.0;
    cfg.rfi.amplitude_scale_max = 1000.0;
  } else {
    cfg.sky.n_pix = 128;
    cfg.sky.axis.n_channels = 216;
    cfg.patch_size = 128;
    // Scaled so the analysis cube keeps the 54 channels of the full
    // protocol, and so the 3-sigma flagger (<= 10 clip iterations) keeps
    // its recall up to ~40% contamination.
    cfg.downsample_factor = 4;  // 216 -> 54 channels
    cfg.rfi.broadband_width_max = 16;
    cfg.rfi.amplitude_scale_min = 30.0;
    cfg.rfi.amplitude_scale_max = 300.0;
  }
  cfg.sky.axis.width_hz = 20.0e6 / static_cast<double>(cfg.sky.axis.n_channels);
  cfg.rfi.broadband_rate = 2.0;
  cfg.rfi.broadband_width_min = 4;
  cfg.rfi.narrowband_channel_prob = 0.08;
  cfg.rfi.outlier_rate = 0.0005;
  return cfg;
}

std::vector<skysim::ForegroundModel> RunConfig::resolve_foregrounds() const {
  std::vector<skysim::ForegroundModel> out;
  const auto defaults = skysim::default_foregrounds();
  for (const auto& name : foreground_names) {
    const skysim::ForegroundModel* found = nullptr;
    for (const auto& m : foreground_overrides)
      if (m.name == name) found = &m;
    if (found == nullptr) {
      for (const auto& m : defaults)
        if (m.name == name) found = &m;
    }
    if (found == nullptr)
      throw ConfigError("config: foreground component '" + name +
                        "' has no definition (set foreground." + name + ".* keys)");
    out.push_back(*found);
  }
  return out;
}

std::vector<double> RunConfig::resolve_fraction_edges() const {
  if (!fraction_edges.empty()) return fraction_edges;
  std::vector<double> edges;
  for (int i = 0; i <= 8; ++i) edges.push_back(0.05 * i);
  return edges;
}

std::vector<double> RunConfig::resolve_cl_bins() const {
  if (!cl_bin_edges.empty()) return cl_bin_edges;
  const double pixel = sky.pixel_rad();
  const double l_fund = 2.0 * std::numbers::pi / (static_cast<double>(sky.n_pix) * pixel);
  const double l_nyquist = std::numbers::pi / pixel;
  const double lo = std::max(2.0 * l_fund, 40.0);
  const double hi = 0.9 * l_nyquist;
  const int n_bins = 10;
  std::vector<double> edges;
  for (int i = 0; i <= n_bins; ++i)
    edges.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n_bins));
  return edges;
}

void RunConfig::validate() const {
  if (!seed_set) throw ConfigError("config: run.seed is required (no environment entropy)");
  try {
    sky.validate();
    cosmology.validate();
    hi.validate();
    rfi.validate();
    for (const auto& m : resolve_foregrounds()) m.validate();
  } catch (const ValueError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (foreground_names.empty() && !allow_empty_foregrounds)
    throw ConfigError("config: foreground.components is empty "
                      "(set foreground.allow_empty = true to simulate HI only)");
  if (rfi_template_cube.empty() != rfi_template_mask.empty())
    throw ConfigError("config: rfi.template_cube and rfi.template_mask go together");
  if (restorer != "mean_fill" && restorer != "spectral_poly" && restorer != "low_rank" &&
      restorer != "external")
    throw ConfigError("config: unknown restore.method '" + restorer + "'");
  if (restorer == "external" && restore_external_path.empty())
    throw ConfigError("config: restore.method external needs restore.external_path");
  for (const auto& m : clean_methods)
    if (m != "polyfit" && m != "svd" && m != "ica")
      throw ConfigError("config: unknown clean method '" + m + "'");
  if (ica_contrast != "cubic" && ica_contrast != "logcosh")
    throw ConfigError("config: clean.ica_contrast must be cubic or logcosh");
  if (downsample_factor < 1) throw ConfigError("config: downsample.factor must be >= 1");
  if (flag_max_iterations < 1) throw ConfigError("config: flag.max_iterations must be >= 1");
  if (patch_size < 2) throw ConfigError("config: patch.size must be >= 2");
  if (patch_size > sky.n_pix * sky.n_pix || patch_size > sky.axis.n_channels)
    throw ConfigError("config: patch.size exceeds the cube dimensions");
  if (!(patch_max_fraction >= 0.0 && patch_max_fraction <= 1.0))
    throw ConfigError("config: patch.max_fraction must lie in [0, 1]");
  if (svd_modes < 0 || svd_sweep_max < 0 || ica_components < 0)
    throw ConfigError("config: component counts must be >= 0");
  const auto fr = resolve_fraction_edges();
  if (fr.size() < 2 || !std::is_sorted(fr.begin(), fr.end()))
    throw ConfigError("config: evaluate.fraction_edges must be increasing");
  const auto cl = resolve_cl_bins();
  if (cl.size() < 2 || !std::is_sorted(cl.begin(), cl.end()))
    throw ConfigError("config: evaluate.cl_bins must be increasing");
}

std::string RunConfig::canonical_text() const {
  // Identifies the experiment: run.output_dir and run.threads are execution
  // knobs that cannot affect results and stay out of the hash.
  std::ostringstream os;
  os.precision(17);
  os << "run.seed = " << seed << "\n";
  os << "sky.n_pix = " << sky.n_pix << "\n";
  os << "sky.ra_min_deg = " << sky.ra_min_deg << "\n";
  os << "sky.ra_max_deg = " << sky.ra_max_deg << "\n";
  os << "sky.dec_min_deg = " << sky.dec_min_deg << "\n";
  os << "sky.dec_max_deg = " << sky.dec_max_deg << "\n";
  os << "sky.n_channels = " << sky.axis.n_channels << "\n";
  os << "sky.start_frequency_hz = " << sky.axis.start_hz << "\n";
  os << "sky.channel_width_hz = " << sky.axis.width_hz << "\n";
  os << "cosmology.omega_b = " << cosmology.omega_b << "\n";
  os << "cosmology.omega_m = " << cosmology.omega_m << "\n";
  os << "cosmology.omega_lambda = " << cosmology.omega_lambda << "\n";
  os << "cosmology.h = " << cosmology.h << "\n";
  os << "cosmology.x_hi = " << cosmology.x_hi << "\n";
  os << "hi.cl_amplitude = " << hi.cl_amplitude << "\n";
  os << "hi.cl_slope = " << hi.cl_slope << "\n";
  os << "hi.frequency_coherence = " << hi.frequency_coherence << "\n";
  os << "hi.lognormal = " << (hi.lognormal ? "true" : "false") << "\n";
  for (const auto& m : resolve_foregrounds()) {
    os << "foreground." << m.name << ".amplitude_mk2 = " << m.amplitude_mk2 << "\n";
    os << "foreground." << m.name << ".beta = " << m.beta << "\n";
    os << "foreground." << m.name << ".alpha = " << m.alpha << "\n";
    os << "foreground." << m.name << ".xi = " << m.xi << "\n";
    os << "foreground." << m.name << ".l_ref = " << m.l_ref << "\n";
    os << "foreground." << m.name << ".nu_ref_hz = " << m.nu_ref_hz << "\n";
  }
  os << "rfi.broadband_rate = " << rfi.broadband_rate << "\n";
  os << "rfi.broadband_width_min = " << rfi.broadband_width_min << "\n";
  os << "rfi.broadband_width_max = " << rfi.broadband_width_max << "\n";
  os << "rfi.narrowband_channel_prob = " << rfi.narrowband_channel_prob << "\n";
  os << "rfi.outlier_rate = " << rfi.outlier_rate << "\n";
  os << "rfi.amplitude_scale_min = " << rfi.amplitude_scale_min << "\n";
  os << "rfi.amplitude_scale_max = " << rfi.amplitude_scale_max << "\n";
  os << "rfi.template_cube = " << rfi_template_cube << "\n";
  os << "rfi.template_mask = " << rfi_template_mask << "\n";
  os << "flag.max_iterations = " << flag_max_iterations << "\n";
  os << "flag.include_masked_in_stats = " << (flag_include_masked_in_stats ? "true" : "false")
     << "\n";
  os << "restore.method = " << restorer << "\n";
  os << "restore.poly_order = " << restore_poly_order << "\n";
  os << "restore.rank = " << restore_rank << "\n";
  os << "restore.tol = " << restore_tol << "\n";
  os << "restore.max_iter = " << restore_max_iter << "\n";
  os << "restore.external_path = " << restore_external_path << "\n";
  os << "clean.methods = ";
  for (std::size_t i = 0; i < clean_methods.size(); ++i)
    os << (i ? "," : "") << clean_methods[i];
  os << "\n";
  os << "clean.poly_order = " << clean_poly_order << "\n";
  os << "clean.svd_modes = " << svd_modes << "\n";
  os << "clean.svd_sweep_max = " << svd_sweep_max << "\n";
  os << "clean.ica_components = " << ica_components << "\n";
  os << "clean.ica_contrast = " << ica_contrast << "\n";
  os << "clean.svd_center = " << (svd_center ? "true" : "false") << "\n";
  os << "clean.ica_add_back_means = " << (ica_add_back_means ? "true" : "false") << "\n";
  os << "downsample.factor = " << downsample_factor << "\n";
  os << "evaluate.fraction_edges = ";
  {
    const auto edges = resolve_fraction_edges();
    for (std::size_t i = 0; i < edges.size(); ++i) os << (i ? "," : "") << edges[i];
  }
  os << "\n";
  os << "evaluate.cl_bins = ";
  {
    const auto edges = resolve_cl_bins();
    for (std::size_t i = 0; i < edges.size(); ++i) os << (i ? "," : "") << edges[i];
  }
  os << "\n";
  os << "evaluate.export_patches = " << (export_patches ? "true" : "false") << "\n";
  os << "evaluate.rms_about_mean = " << (rms_about_mean ? "true" : "false") << "\n";
  os << "evaluate.ssim_window = " << ssim_window << "\n";
  os << "patch.size = " << patch_size << "\n";
  os << "patch.max_fraction = " << patch_max_fraction << "\n";
  return os.str();
}

RunConfig parse_text(const std::string& text, Profile profile) {
  RunConfig cfg = profile_defaults(profile);
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(line_no));
    apply_key(cfg, key, value);
  }
  return cfg;
}

RunConfig parse_file(const std::filesystem::path& path, Profile profile) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_text(buffer.str(), profile);
}

}  // namespace imclean::config
