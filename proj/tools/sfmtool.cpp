// sfmtool: command line front end for the SFM library.
//
// Subcommands cover the library surface one stage at a time (dct, mask-stats,
// sfm, degrade, psd, snr) plus the batch pipeline (pipeline run / verify).

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfm/degrade.hpp"
#include "sfm/image.hpp"
#include "sfm/image_io.hpp"
#include "sfm/mask.hpp"
#include "sfm/pipeline.hpp"
#include "sfm/random.hpp"
#include "sfm/sfm.hpp"
#include "sfm/spectra.hpp"
#include "sfm/transform.hpp"
#include "sfm/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool recognized_input(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".npy";
}

// A single image file, or every recognized image in a directory, sorted by name.
std::vector<fs::path> collect_images(const fs::path& in) {
  if (fs::is_regular_file(in)) return {in};
  if (!fs::is_directory(in))
    throw sfm::ConfigError(in.string() + ": not a file or directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(in))
    if (entry.is_regular_file() && recognized_input(entry.path()))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.empty()) throw sfm::ConfigError(in.string() + ": no images found");
  return files;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(file.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(file.string() + ": write failed");
}

sfm::Dims parse_dims(const std::string& s) {
  const std::size_t x = s.find('x');
  if (x == std::string::npos)
    throw sfm::ConfigError("--dims: expected HxW, got '" + s + "'");
  try {
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw sfm::ConfigError("--dims: expected HxW, got '" + s + "'");
  }
}

sfm::MaskMode parse_mode(const std::string& s) {
  if (s == "central") return sfm::MaskMode::central;
  if (s == "targeted") return sfm::MaskMode::targeted;
  throw sfm::ConfigError("--mode: expected central or targeted, got '" + s + "'");
}

sfm::ImageFormat parse_format(const std::string& s) {
  const auto f = sfm::format_from_string(s);
  if (!f) throw sfm::ConfigError("--format: unknown format '" + s + "'");
  return *f;
}

json mask_json(const sfm::MaskSpec& m) {
  json j;
  j["mode"] = m.mode == sfm::MaskMode::central ? "central" : "targeted";
  j["r_inner"] = m.r_inner;
  j["r_outer"] = m.r_outer;
  j["r_max"] = m.r_max;
  if (m.r_center) j["r_center"] = *m.r_center;
  if (m.sigma_delta) j["sigma_delta"] = *m.sigma_delta;
  return j;
}

// ---------------------------------------------------------------------------
// dct: forward coefficients as CSV

int cmd_dct(const fs::path& in, const fs::path& out) {
  const sfm::Image img = sfm::load_image(in);
  const sfm::Spectrum spec = sfm::dct2_forward(img);
  std::string csv = "row,col,channel,value\n";
  for (int c = 0; c < spec.channels; ++c)
    for (int u = 0; u < spec.height; ++u)
      for (int v = 0; v < spec.width; ++v)
        csv += std::to_string(u) + "," + std::to_string(v) + "," + std::to_string(c) +
               "," + fmt(spec.at(u, v, c)) + "\n";
  write_text(out, csv);
  std::cout << "wrote " << spec.height << "x" << spec.width << "x" << spec.channels
            << " coefficients to " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// mask-stats: empirical band masking probability against the closed form

int cmd_mask_stats(const std::string& mode_str, const std::string& dims_str, int n,
                   std::uint64_t seed, int bins, double rc, double sd,
                   const fs::path& out) {
  const sfm::MaskMode mode = parse_mode(mode_str);
  const sfm::Dims dims = parse_dims(dims_str);
  if (n < 1) throw sfm::ConfigError("--n must be >= 1");
  if (bins < 1) throw sfm::ConfigError("--bins must be >= 1");
  const double r_max = sfm::max_radius(dims);

  std::vector<sfm::MaskSpec> specs;
  specs.reserve(n);
  sfm::rng::engine g(seed);
  for (int i = 0; i < n; ++i)
    specs.push_back(mode == sfm::MaskMode::central
                        ? sfm::sample_central(dims, g)
                        : sfm::sample_targeted(dims, rc * r_max, sd * r_max, g));

  std::string csv = "r,empirical,predicted\n";
  for (int b = 0; b < bins; ++b) {
    const double r = (b + 0.5) / bins * r_max;
    int hit = 0;
    for (const auto& s : specs)
      if (s.r_inner <= r && r < s.r_outer) ++hit;
    const double empirical = static_cast<double>(hit) / n;
    const double predicted = mode == sfm::MaskMode::central
                                 ? sfm::band_mask_probability(r, r_max)
                                 : std::numeric_limits<double>::quiet_NaN();
    csv += fmt(r) + "," + fmt(empirical) + "," + fmt(predicted) + "\n";
  }
  write_text(out, csv);
  std::cout << "sampled " << n << " " << mode_str << " masks on " << dims.height << "x"
            << dims.width << ", wrote " << bins << " bins to " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sfm: stochastic masking over a file or directory

int cmd_sfm(const fs::path& in, const std::string& mode_str, double rate, double rc,
            double sd, bool clamp, std::uint64_t seed, const fs::path& out_dir,
            const std::string& format_str) {
  sfm::SfmConfig cfg;
  cfg.mode = parse_mode(mode_str);
  cfg.rate = rate;
  cfg.r_center_frac = rc;
  cfg.sigma_delta_frac = sd;
  cfg.clamp_output = clamp;
  const sfm::ImageFormat format = parse_format(format_str);

  const std::vector<fs::path> files = collect_images(in);
  fs::create_directories(out_dir);
  int applied = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::uint64_t stream_id = sfm::rng::derive_stream_id(seed, i);
    sfm::rng::engine g(stream_id);
    const sfm::Image img = sfm::load_image(files[i]);
    const sfm::SfmOutcome outcome = sfm::maybe_apply_sfm(img, cfg, g);
    applied += outcome.applied ? 1 : 0;

    const std::string stem = files[i].stem().string();
    sfm::save_image(outcome.image, out_dir / (stem + sfm::format_extension(format)),
                    format);
    json side;
    side["input"] = files[i].string();
    side["stream"] = sfm::hash_string(stream_id);
    side["applied"] = outcome.applied;
    if (outcome.spec) side["mask"] = mask_json(*outcome.spec);
    write_text(out_dir / (stem + ".json"), side.dump(2) + "\n");
  }
  std::cout << "masked " << applied << " of " << files.size() << " images into "
            << out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// degrade: blur + downsample + noise over a directory

int cmd_degrade(const fs::path& in, const std::string& kernel_str, int scale,
                const std::string& noise_str, std::uint64_t seed, const fs::path& out_dir,
                const std::string& format_str) {
  sfm::DegradationConfig cfg;
  cfg.kernel = sfm::parse_kernel_spec(kernel_str);
  cfg.scale = scale;
  cfg.noise = sfm::parse_noise_spec(noise_str);
  if (cfg.kernel.kind == sfm::KernelKind::bicubic_prefilter && cfg.kernel.taps.empty())
    cfg.kernel = sfm::bicubic_prefilter(cfg.scale);
  try {
    sfm::validate_degradation(cfg);
  } catch (const std::invalid_argument& e) {
    throw sfm::ConfigError(e.what());
  }
  const sfm::ImageFormat format = parse_format(format_str);

  const std::vector<fs::path> files = collect_images(in);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < files.size(); ++i) {
    sfm::rng::engine g(sfm::rng::derive_stream_id(seed, i));
    const sfm::Image img = sfm::load_image(files[i]);
    const sfm::Image lr = sfm::degrade_sr(img, cfg, g);
    sfm::save_image(lr, out_dir / (files[i].stem().string() + sfm::format_extension(format)),
                    format);
  }
  std::cout << "degraded " << files.size() << " images into " << out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// psd: radial power spectral density, averaged over the inputs

int cmd_psd(const fs::path& in, int bins, const std::string& window_str,
            const fs::path& out, const std::vector<double>& fit_range) {
  sfm::PsdWindow window = sfm::PsdWindow::none;
  if (window_str == "hann")
    window = sfm::PsdWindow::hann;
  else if (window_str != "none")
    throw sfm::ConfigError("--window: expected none or hann, got '" + window_str + "'");

  const std::vector<fs::path> files = collect_images(in);
  sfm::RadialProfile mean;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const sfm::RadialProfile p = sfm::radial_psd(sfm::load_image(files[i]), bins, window);
    if (i == 0) {
      mean = p;
    } else {
      for (int b = 0; b < p.bins(); ++b) {
        mean.values[b] += p.values[b];
        mean.counts[b] += p.counts[b];
      }
    }
  }
  for (auto& v : mean.values) v /= static_cast<double>(files.size());

  std::string csv = "r,psd\n";
  for (int b = 0; b < mean.bins(); ++b)
    csv += fmt(mean.center(b)) + "," + fmt(mean.values[b]) + "\n";
  write_text(out, csv);
  std::cout << "averaged " << files.size() << " spectra into " << out.string() << "\n";

  if (!fit_range.empty()) {
    const sfm::PowerLawFit fit = sfm::fit_power_law(mean, fit_range[0], fit_range[1]);
    std::cout << "power-law fit over [" << fmt(fit.r_lo) << ", " << fmt(fit.r_hi)
              << "]: alpha " << fmt(fit.alpha) << ", amplitude " << fmt(fit.amplitude)
              << ", residual " << fmt(fit.residual) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// snr: per-band SNR of a model power-law spectrum against flat noise

int cmd_snr(double alpha, double amplitude, double sigma, int bins, const fs::path& out) {
  if (bins < 4) throw sfm::ConfigError("--bins must be >= 4");
  if (!(amplitude > 0.0)) throw sfm::ConfigError("--amplitude must be > 0");
  sfm::RadialProfile model;
  model.bin_edges.resize(bins + 1);
  model.values.resize(bins);
  model.counts.assign(bins, 1);
  for (int b = 0; b <= bins; ++b)
    model.bin_edges[b] = static_cast<double>(b) / bins;
  for (int b = 0; b < bins; ++b)
    model.values[b] = amplitude * std::pow(model.center(b), -alpha);

  const sfm::RadialProfile snr = sfm::snr_curve(model, sigma);
  std::string csv = "r,snr\n";
  for (int b = 0; b < snr.bins(); ++b)
    csv += fmt(snr.center(b)) + "," + fmt(snr.values[b]) + "\n";
  write_text(out, csv);

  std::optional<double> crossover;
  for (int b = 0; b < snr.bins(); ++b)
    if (snr.values[b] < 1.0) {
      crossover = snr.center(b);
      break;
    }
  if (crossover)
    std::cout << "snr falls below 1 at r = " << fmt(*crossover) << "\n";
  else
    std::cout << "snr stays above 1 across all bins\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pipeline run / verify

int cmd_pipeline_run(const sfm::PipelineConfig& cfg, int jobs) {
  const sfm::Manifest manifest = sfm::run_pipeline(cfg, jobs);
  int failed = 0;
  for (const auto& r : manifest.records)
    if (r.failed) {
      ++failed;
      std::cerr << "failed: " << r.input << ": " << r.error << "\n";
    }
  std::cout << "processed " << manifest.records.size() - failed << " of "
            << manifest.records.size() << " images\n";
  std::cout << "manifest: " << (cfg.output_dir / "manifest.json").string() << "\n";
  return failed > 0 ? 1 : 0;
}

int cmd_pipeline_verify(const fs::path& manifest_file, int jobs) {
  const sfm::VerifyResult result = sfm::verify_manifest(manifest_file, jobs);
  for (const auto& msg : result.messages) std::cerr << msg << "\n";
  std::cout << "checked " << result.records_checked << " records, "
            << result.files_checked << " files, " << result.mismatches
            << " mismatches";
  if (result.skipped_failed > 0)
    std::cout << " (" << result.skipped_failed << " failed records skipped)";
  std::cout << "\n";
  return result.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic frequency masking toolkit"};
  app.set_version_flag("--version", std::string("sfmtool ") + sfm::kVersion);
  app.require_subcommand(1);

  // dct
  auto* dct = app.add_subcommand("dct", "write forward DCT coefficients as CSV");
  std::string dct_in, dct_out;
  dct->add_option("--in", dct_in, "input image")->required();
  dct->add_option("--out", dct_out, "output CSV")->required();

  // mask-stats
  auto* mstats = app.add_subcommand(
      "mask-stats", "empirical band masking probability for sampled masks");
  std::string ms_mode = "central", ms_dims = "256x256";
  int ms_n = 20000, ms_bins = 64;
  std::uint64_t ms_seed = 0;
  double ms_rc = 0.85, ms_sd = 0.15;
  std::string ms_out;
  mstats->add_option("--mode", ms_mode, "central | targeted");
  mstats->add_option("--dims", ms_dims, "grid size as HxW");
  mstats->add_option("--n", ms_n, "number of masks to sample");
  mstats->add_option("--seed", ms_seed, "rng seed")->required();
  mstats->add_option("--bins", ms_bins, "radius bins");
  mstats->add_option("--rc", ms_rc, "targeted center, fraction of r_max");
  mstats->add_option("--sd", ms_sd, "targeted spread, fraction of r_max");
  mstats->add_option("--out", ms_out, "output CSV")->required();

  // sfm
  auto* sfmc = app.add_subcommand("sfm", "apply stochastic frequency masking");
  std::string sf_in, sf_mode = "central", sf_out, sf_format = "png8";
  double sf_rate = 1.0, sf_rc = 0.85, sf_sd = 0.15;
  bool sf_clamp = false;
  std::uint64_t sf_seed = 0;
  sfmc->add_option("--in", sf_in, "input image or directory")->required();
  sfmc->add_option("--mode", sf_mode, "central | targeted");
  sfmc->add_option("--rate", sf_rate, "masking probability per image");
  sfmc->add_option("--rc", sf_rc, "targeted center, fraction of r_max");
  sfmc->add_option("--sd", sf_sd, "targeted spread, fraction of r_max");
  sfmc->add_flag("--clamp", sf_clamp, "clamp output to the nominal range");
  sfmc->add_option("--seed", sf_seed, "rng seed")->required();
  sfmc->add_option("--out", sf_out, "output directory")->required();
  sfmc->add_option("--format", sf_format, "png8 | png16 | pgm | ppm | npy");

  // degrade
  auto* deg = app.add_subcommand("degrade", "blur, downsample and add noise");
  std::string dg_in, dg_kernel = "bicubic", dg_noise = "none", dg_out,
              dg_format = "png8";
  int dg_scale = 1;
  std::uint64_t dg_seed = 0;
  deg->add_option("--in", dg_in, "input image or directory")->required();
  deg->add_option("--kernel", dg_kernel, "identity | bicubic | gaussian:SIGMA");
  deg->add_option("--scale", dg_scale, "downsampling factor (1, 2, 3, 4, 8)");
  deg->add_option("--noise", dg_noise, "none | awgn:S | awgn-blind:LO,HI | pg:GAIN,READ");
  deg->add_option("--seed", dg_seed, "rng seed")->required();
  deg->add_option("--out", dg_out, "output directory")->required();
  deg->add_option("--format", dg_format, "png8 | png16 | pgm | ppm | npy");

  // psd
  auto* psd = app.add_subcommand("psd", "radial power spectral density as CSV");
  std::string ps_in, ps_window = "none", ps_out;
  int ps_bins = 64;
  std::vector<double> ps_fit;
  psd->add_option("--in", ps_in, "input image or directory")->required();
  psd->add_option("--bins", ps_bins, "radius bins");
  psd->add_option("--window", ps_window, "none | hann");
  psd->add_option("--out", ps_out, "output CSV")->required();
  psd->add_option("--fit", ps_fit, "fit a power law over [R_LO, R_HI]")
      ->expected(2);

  // snr
  auto* snr = app.add_subcommand("snr", "per-band SNR for a power-law spectrum");
  double sn_alpha = 2.0, sn_amplitude = 1.0, sn_sigma = 1.0;
  int sn_bins = 64;
  std::string sn_out;
  snr->add_option("--alpha", sn_alpha, "spectral decay exponent")->required();
  snr->add_option("--sigma", sn_sigma, "noise standard deviation")->required();
  snr->add_option("--amplitude", sn_amplitude, "spectrum amplitude");
  snr->add_option("--bins", sn_bins, "radius bins");
  snr->add_option("--out", sn_out, "output CSV")->required();

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "batch dataset preparation");
  pipe->require_subcommand(1);
  auto* prun = pipe->add_subcommand("run", "run a pipeline config");
  std::string pr_config;
  int pr_jobs = 1;
  std::optional<std::uint64_t> pr_seed;
  std::optional<std::string> pr_task, pr_input, pr_output, pr_target, pr_format;
  std::optional<std::string> pr_mode, pr_kernel, pr_noise;
  std::optional<double> pr_rate, pr_rc, pr_sd;
  std::optional<int> pr_scale;
  bool pr_clamp = false;
  prun->add_option("--config", pr_config, "pipeline config file")->required();
  prun->add_option("--jobs", pr_jobs, "worker threads");
  prun->add_option("--seed", pr_seed, "override: rng seed");
  prun->add_option("--task", pr_task,
                   "override: sr_synthetic | sr_real | denoise_synthetic | denoise_real");
  prun->add_option("--input-dir", pr_input, "override: input directory");
  prun->add_option("--output-dir", pr_output, "override: output directory");
  prun->add_option("--target-dir", pr_target, "override: target directory (sr_real)");
  prun->add_option("--format", pr_format, "override: output format");
  prun->add_option("--sfm-mode", pr_mode, "override: central | targeted");
  prun->add_option("--sfm-rate", pr_rate, "override: masking probability");
  prun->add_option("--sfm-rc", pr_rc, "override: targeted center fraction");
  prun->add_option("--sfm-sd", pr_sd, "override: targeted spread fraction");
  prun->add_flag("--sfm-clamp", pr_clamp, "override: clamp outputs");
  prun->add_option("--kernel", pr_kernel, "override: degradation kernel spec");
  prun->add_option("--scale", pr_scale, "override: downsampling factor");
  prun->add_option("--noise", pr_noise, "override: noise spec");

  auto* pver = pipe->add_subcommand("verify", "re-derive and check a manifest");
  std::string pv_manifest;
  int pv_jobs = 1;
  pver->add_option("--manifest", pv_manifest, "manifest.json to verify")->required();
  pver->add_option("--jobs", pv_jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (dct->parsed()) return cmd_dct(dct_in, dct_out);
    if (mstats->parsed())
      return cmd_mask_stats(ms_mode, ms_dims, ms_n, ms_seed, ms_bins, ms_rc, ms_sd,
                            ms_out);
    if (sfmc->parsed())
      return cmd_sfm(sf_in, sf_mode, sf_rate, sf_rc, sf_sd, sf_clamp, sf_seed, sf_out,
                     sf_format);
    if (deg->parsed())
      return cmd_degrade(dg_in, dg_kernel, dg_scale, dg_noise, dg_seed, dg_out,
                         dg_format);
    if (psd->parsed()) return cmd_psd(ps_in, ps_bins, ps_window, ps_out, ps_fit);
    if (snr->parsed()) return cmd_snr(sn_alpha, sn_amplitude, sn_sigma, sn_bins, sn_out);
    if (prun->parsed()) {
      sfm::PipelineConfig cfg = sfm::load_pipeline_config(pr_config);
      if (pr_seed) {
        cfg.seed = *pr_seed;
        cfg.has_seed = true;
      }
      if (pr_task) {
        const auto t = sfm::task_from_string(*pr_task);
        if (!t) throw sfm::ConfigError("--task: unknown task '" + *pr_task + "'");
        cfg.task = *t;
      }
      if (pr_input) cfg.input_dir = *pr_input;
      if (pr_output) cfg.output_dir = *pr_output;
      if (pr_target) cfg.target_dir = fs::path(*pr_target);
      if (pr_format) cfg.format = parse_format(*pr_format);
      if (pr_mode) cfg.sfm.mode = parse_mode(*pr_mode);
      if (pr_rate) cfg.sfm.rate = *pr_rate;
      if (pr_rc) cfg.sfm.r_center_frac = *pr_rc;
      if (pr_sd) cfg.sfm.sigma_delta_frac = *pr_sd;
      if (pr_clamp) cfg.sfm.clamp_output = true;
      if (pr_kernel) cfg.degradation.kernel = sfm::parse_kernel_spec(*pr_kernel);
      if (pr_scale) cfg.degradation.scale = *pr_scale;
      if (pr_noise) cfg.degradation.noise = sfm::parse_noise_spec(*pr_noise);
      return cmd_pipeline_run(cfg, pr_jobs);
    }
    if (pver->parsed()) return cmd_pipeline_verify(pv_manifest, pv_jobs);
  } catch (const sfm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
