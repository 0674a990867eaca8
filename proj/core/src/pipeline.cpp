#include "sfm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sfm/version.hpp"

namespace sfm {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(context + ": not a number: '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(context + ": not an unsigned integer: '" + s + "'");
  }
}

bool parse_bool(const std::string& s, const std::string& context) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(context + ": expected true or false, got '" + s + "'");
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_string(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<PipelineTask> task_from_string(std::string_view name) {
  if (name == "sr_synthetic") return PipelineTask::sr_synthetic;
  if (name == "sr_real") return PipelineTask::sr_real;
  if (name == "denoise_synthetic") return PipelineTask::denoise_synthetic;
  if (name == "denoise_real") return PipelineTask::denoise_real;
  return std::nullopt;
}

const char* task_name(PipelineTask t) {
  switch (t) {
    case PipelineTask::sr_synthetic: return "sr_synthetic";
    case PipelineTask::sr_real: return "sr_real";
    case PipelineTask::denoise_synthetic: return "denoise_synthetic";
    case PipelineTask::denoise_real: return "denoise_real";
  }
  return "?";
}

BlurKernel parse_kernel_spec(const std::string& spec) {
  if (spec == "identity") return identity_kernel();
  if (spec == "bicubic") {
    BlurKernel k;
    k.kind = KernelKind::bicubic_prefilter;
    k.side = 0;  // realized against the scale factor at use time
    return k;
  }
  if (spec.rfind("gaussian:", 0) == 0) {
    const double sigma = parse_double(spec.substr(9), "kernel spec");
    if (!(sigma > 0.0)) throw ConfigError("kernel spec: sigma must be > 0");
    return gaussian_kernel(sigma);
  }
  throw ConfigError("kernel spec: expected identity | bicubic | gaussian:SIGMA, got '" +
                    spec + "'");
}

std::string kernel_spec_string(const BlurKernel& k) {
  if (k.kind == KernelKind::bicubic_prefilter) return "bicubic";
  if (k.sigma) return "gaussian:" + fmt_double(*k.sigma);
  return "identity";
}

NoiseModel parse_noise_spec(const std::string& spec) {
  if (spec == "none") return no_noise();
  auto split2 = [&](const std::string& body) -> std::pair<double, double> {
    const std::size_t comma = body.find(',');
    if (comma == std::string::npos)
      throw ConfigError("noise spec: expected two comma-separated values in '" + spec + "'");
    return {parse_double(body.substr(0, comma), "noise spec"),
            parse_double(body.substr(comma + 1), "noise spec")};
  };
  if (spec.rfind("awgn-blind:", 0) == 0) {
    const auto [lo, hi] = split2(spec.substr(11));
    if (!(lo >= 0.0) || !(hi >= lo))
      throw ConfigError("noise spec: need 0 <= LO <= HI in '" + spec + "'");
    return awgn_blind(lo, hi);
  }
  if (spec.rfind("awgn:", 0) == 0) {
    const double sigma = parse_double(spec.substr(5), "noise spec");
    if (!(sigma >= 0.0)) throw ConfigError("noise spec: sigma must be >= 0");
    return awgn(sigma);
  }
  if (spec.rfind("pg:", 0) == 0) {
    const auto [gain, read] = split2(spec.substr(3));
    if (!(gain > 0.0) || !(read >= 0.0))
      throw ConfigError("noise spec: need GAIN > 0 and READ >= 0 in '" + spec + "'");
    return poisson_gaussian(gain, read);
  }
  throw ConfigError(
      "noise spec: expected none | awgn:S | awgn-blind:LO,HI | pg:GAIN,READ, got '" +
      spec + "'");
}

std::string noise_spec_string(const NoiseModel& m) {
  switch (m.kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::awgn_fixed: return "awgn:" + fmt_double(m.sigma);
    case NoiseKind::awgn_blind:
      return "awgn-blind:" + fmt_double(m.sigma_min) + "," + fmt_double(m.sigma_max);
    case NoiseKind::poisson_gaussian:
      return "pg:" + fmt_double(m.gain) + "," + fmt_double(m.read_sigma);
  }
  return "?";
}

namespace {

void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value,
                    const std::string& context) {
  if (key == "task") {
    const auto t = task_from_string(value);
    if (!t) throw ConfigError(context + ": unknown task '" + value + "'");
    cfg.task = *t;
  } else if (key == "seed") {
    cfg.seed = parse_u64(value, context);
    cfg.has_seed = true;
  } else if (key == "input_dir") {
    cfg.input_dir = value;
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "target_dir") {
    cfg.target_dir = value;
  } else if (key == "format") {
    const auto f = format_from_string(value);
    if (!f) throw ConfigError(context + ": unknown format '" + value + "'");
    cfg.format = *f;
  } else if (key == "sfm.mode") {
    if (value == "central")
      cfg.sfm.mode = MaskMode::central;
    else if (value == "targeted")
      cfg.sfm.mode = MaskMode::targeted;
    else
      throw ConfigError(context + ": unknown sfm mode '" + value + "'");
  } else if (key == "sfm.rate") {
    cfg.sfm.rate = parse_double(value, context);
  } else if (key == "sfm.r_center") {
    cfg.sfm.r_center_frac = parse_double(value, context);
  } else if (key == "sfm.sigma_delta") {
    cfg.sfm.sigma_delta_frac = parse_double(value, context);
  } else if (key == "sfm.clamp") {
    cfg.sfm.clamp_output = parse_bool(value, context);
  } else if (key == "degrade.kernel") {
    cfg.degradation.kernel = parse_kernel_spec(value);
  } else if (key == "degrade.scale") {
    cfg.degradation.scale = static_cast<int>(parse_u64(value, context));
  } else if (key == "degrade.noise") {
    cfg.degradation.noise = parse_noise_spec(value);
  } else {
    throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& text, const std::string& context) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, bool> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = context + ":" + std::to_string(lineno);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = strip_quotes(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (seen[key]) throw ConfigError(where + ": duplicate key '" + key + "'");
    seen[key] = true;
    set_config_key(cfg, key, value, where);
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pipeline_config(ss.str(), file.string());
}

namespace {

// The bicubic pseudo-kernel from parse_kernel_spec carries no taps until the
// scale factor is known.
void finalize_kernel(PipelineConfig& cfg) {
  if (cfg.degradation.kernel.kind == KernelKind::bicubic_prefilter &&
      cfg.degradation.kernel.taps.empty())
    cfg.degradation.kernel = bicubic_prefilter(cfg.degradation.scale);
}

bool uses_degradation(PipelineTask t) {
  return t == PipelineTask::sr_synthetic || t == PipelineTask::denoise_synthetic;
}

}  // namespace

void validate_pipeline_config(const PipelineConfig& cfg) {
  if (!cfg.has_seed) throw ConfigError("config: seed is required");
  if (cfg.input_dir.empty()) throw ConfigError("config: input_dir is required");
  if (cfg.output_dir.empty()) throw ConfigError("config: output_dir is required");
  if (!std::filesystem::is_directory(cfg.input_dir))
    throw ConfigError("config: input_dir '" + cfg.input_dir.string() +
                      "' is not a directory");
  if (cfg.target_dir) {
    if (cfg.task != PipelineTask::sr_real)
      throw ConfigError("config: target_dir is only meaningful for sr_real");
    if (!std::filesystem::is_directory(*cfg.target_dir))
      throw ConfigError("config: target_dir '" + cfg.target_dir->string() +
                        "' is not a directory");
  }
  if (!(cfg.sfm.rate >= 0.0) || !(cfg.sfm.rate <= 1.0))
    throw ConfigError("config: sfm.rate must lie in [0, 1]");
  if (cfg.sfm.mode == MaskMode::targeted) {
    if (!(cfg.sfm.r_center_frac >= 0.0) || cfg.sfm.r_center_frac > 1.0)
      throw ConfigError("config: sfm.r_center must lie in [0, 1] (fraction of r_max)");
    if (!(cfg.sfm.sigma_delta_frac > 0.0))
      throw ConfigError("config: sfm.sigma_delta must be > 0");
  }
  if (uses_degradation(cfg.task)) {
    PipelineConfig copy = cfg;
    finalize_kernel(copy);
    try {
      validate_degradation(copy.degradation);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
}

namespace {

bool recognized_input(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".npy";
}

std::vector<std::filesystem::path> enumerate_inputs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && recognized_input(entry.path()))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.empty())
    throw ConfigError("config: no input images in '" + dir.string() + "'");
  return files;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error(p.string() + ": cannot open");
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!out) throw std::runtime_error(p.string() + ": write failed");
}

struct ProcessedImage {
  PipelineRecord record;
  // Relative path within the output tree -> encoded bytes, aligned with
  // record.outputs.
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> files;
};

// The per-image recipe shared by run_pipeline and verify_manifest. Everything
// nondeterministic flows from the stream derived from (seed, index): first the
// SFM gate and annulus draws, then the noise draws.
ProcessedImage process_one(const PipelineConfig& cfg, std::uint64_t index,
                           const std::filesystem::path& input) {
  ProcessedImage out;
  PipelineRecord& rec = out.record;
  rec.index = index;
  rec.input = input.string();
  rec.stream_id = rng::derive_stream_id(cfg.seed, index);
  rng::engine stream(rec.stream_id);

  const Image src = load_image(input);
  const SfmOutcome sfm_out = maybe_apply_sfm(src, cfg.sfm, stream);
  rec.applied = sfm_out.applied;
  rec.mask = sfm_out.spec;

  Image processed;
  switch (cfg.task) {
    case PipelineTask::sr_synthetic: {
      DegradeOutcome deg = degrade_sr_traced(sfm_out.image, cfg.degradation, stream);
      processed = std::move(deg.image);
      rec.noise_sigma = deg.sigma_drawn;
      rec.kernel_sigma = cfg.degradation.kernel.sigma;
      break;
    }
    case PipelineTask::denoise_synthetic: {
      NoiseApplication noisy = add_noise_traced(sfm_out.image, cfg.degradation.noise, stream);
      processed = std::move(noisy.image);
      rec.noise_sigma = noisy.sigma_drawn;
      break;
    }
    case PipelineTask::sr_real:
    case PipelineTask::denoise_real:
      processed = sfm_out.image;
      break;
  }

  bool clamped = false;
  std::vector<std::uint8_t> encoded = encode_image(processed, cfg.format, &clamped);
  rec.clamped = clamped;
  const std::string processed_rel =
      "input/" + input.stem().string() + format_extension(cfg.format);
  rec.outputs.push_back({processed_rel, hash_string(fnv1a64(encoded.data(), encoded.size()))});
  out.files.emplace_back(processed_rel, std::move(encoded));

  // Targets are byte copies of the untouched originals.
  std::optional<std::filesystem::path> target_src;
  switch (cfg.task) {
    case PipelineTask::sr_synthetic:
    case PipelineTask::denoise_synthetic:
    case PipelineTask::denoise_real:
      target_src = input;
      break;
    case PipelineTask::sr_real:
      if (cfg.target_dir) {
        const std::filesystem::path t = *cfg.target_dir / input.filename();
        if (!std::filesystem::is_regular_file(t))
          throw std::runtime_error(t.string() + ": no matching target image");
        target_src = t;
      }
      break;
  }
  if (target_src) {
    std::vector<std::uint8_t> bytes = read_file_bytes(*target_src);
    const std::string target_rel = "target/" + target_src->filename().string();
    rec.outputs.push_back({target_rel, hash_string(fnv1a64(bytes.data(), bytes.size()))});
    out.files.emplace_back(target_rel, std::move(bytes));
  }
  return out;
}

template <class Fn>
void parallel_for_images(std::size_t count, int jobs, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
}

}  // namespace

Manifest run_pipeline(const PipelineConfig& cfg_in, int jobs) {
  PipelineConfig cfg = cfg_in;
  finalize_kernel(cfg);
  validate_pipeline_config(cfg);
  const std::vector<std::filesystem::path> inputs = enumerate_inputs(cfg.input_dir);

  // Same stem + same output format would silently overwrite; refuse upfront.
  {
    std::map<std::string, std::string> stems;
    for (const auto& p : inputs) {
      auto [it, fresh] = stems.emplace(p.stem().string(), p.filename().string());
      if (!fresh)
        throw ConfigError("config: inputs '" + it->second + "' and '" +
                          p.filename().string() + "' map to the same output name");
    }
  }

  std::filesystem::create_directories(cfg.output_dir / "input");
  std::filesystem::create_directories(cfg.output_dir / "target");

  Manifest manifest;
  manifest.version = kVersion;
  manifest.config = cfg;
  manifest.records.resize(inputs.size());

  parallel_for_images(inputs.size(), jobs, [&](std::size_t i) {
    try {
      ProcessedImage result = process_one(cfg, i, inputs[i]);
      for (const auto& [rel, bytes] : result.files)
        write_file_bytes(cfg.output_dir / rel, bytes);
      manifest.records[i] = std::move(result.record);
    } catch (const std::exception& e) {
      PipelineRecord rec;
      rec.index = i;
      rec.input = inputs[i].string();
      rec.stream_id = rng::derive_stream_id(cfg.seed, i);
      rec.failed = true;
      rec.error = e.what();
      manifest.records[i] = std::move(rec);
    }
  });

  write_manifest(manifest, cfg.output_dir / "manifest.json");
  return manifest;
}

namespace {

json mask_to_json(const MaskSpec& m) {
  json j;
  j["mode"] = m.mode == MaskMode::central ? "central" : "targeted";
  j["r_inner"] = m.r_inner;
  j["r_outer"] = m.r_outer;
  j["r_max"] = m.r_max;
  if (m.r_center) j["r_center"] = *m.r_center;
  if (m.sigma_delta) j["sigma_delta"] = *m.sigma_delta;
  return j;
}

MaskSpec mask_from_json(const json& j) {
  MaskSpec m;
  m.mode = j.at("mode").get<std::string>() == "central" ? MaskMode::central
                                                        : MaskMode::targeted;
  m.r_inner = j.at("r_inner").get<double>();
  m.r_outer = j.at("r_outer").get<double>();
  m.r_max = j.at("r_max").get<double>();
  if (j.contains("r_center")) m.r_center = j.at("r_center").get<double>();
  if (j.contains("sigma_delta")) m.sigma_delta = j.at("sigma_delta").get<double>();
  return m;
}

}  // namespace

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  json c;
  c["task"] = task_name(m.config.task);
  c["seed"] = std::to_string(m.config.seed);
  c["input_dir"] = m.config.input_dir.string();
  c["output_dir"] = m.config.output_dir.string();
  if (m.config.target_dir) c["target_dir"] = m.config.target_dir->string();
  c["format"] = format_name(m.config.format);
  c["sfm"] = {{"mode", m.config.sfm.mode == MaskMode::central ? "central" : "targeted"},
              {"rate", m.config.sfm.rate},
              {"r_center", m.config.sfm.r_center_frac},
              {"sigma_delta", m.config.sfm.sigma_delta_frac},
              {"clamp", m.config.sfm.clamp_output}};
  c["degrade"] = {{"kernel", kernel_spec_string(m.config.degradation.kernel)},
                  {"scale", m.config.degradation.scale},
                  {"noise", noise_spec_string(m.config.degradation.noise)}};
  j["config"] = c;
  json records = json::array();
  for (const auto& r : m.records) {
    json jr;
    jr["index"] = r.index;
    jr["input"] = r.input;
    jr["stream"] = hash_string(r.stream_id);
    jr["applied"] = r.applied;
    if (r.mask) jr["mask"] = mask_to_json(*r.mask);
    if (r.noise_sigma) jr["noise_sigma"] = *r.noise_sigma;
    if (r.kernel_sigma) jr["kernel_sigma"] = *r.kernel_sigma;
    jr["clamped"] = r.clamped;
    json outs = json::array();
    for (const auto& o : r.outputs) outs.push_back({{"path", o.path}, {"fnv1a64", o.hash}});
    jr["outputs"] = outs;
    jr["failed"] = r.failed;
    if (r.failed) jr["error"] = r.error;
    records.push_back(jr);
  }
  j["records"] = records;
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text, const std::string& context) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(context + ": manifest parse error: " + e.what());
  }
  try {
    Manifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    const json& c = j.at("config");
    const auto task = task_from_string(c.at("task").get<std::string>());
    if (!task) throw std::runtime_error("unknown task");
    m.config.task = *task;
    m.config.seed = parse_u64(c.at("seed").get<std::string>(), context);
    m.config.has_seed = true;
    m.config.input_dir = c.at("input_dir").get<std::string>();
    m.config.output_dir = c.at("output_dir").get<std::string>();
    if (c.contains("target_dir"))
      m.config.target_dir = std::filesystem::path(c.at("target_dir").get<std::string>());
    const auto fmt = format_from_string(c.at("format").get<std::string>());
    if (!fmt) throw std::runtime_error("unknown format");
    m.config.format = *fmt;
    const json& s = c.at("sfm");
    m.config.sfm.mode = s.at("mode").get<std::string>() == "central" ? MaskMode::central
                                                                     : MaskMode::targeted;
    m.config.sfm.rate = s.at("rate").get<double>();
    m.config.sfm.r_center_frac = s.at("r_center").get<double>();
    m.config.sfm.sigma_delta_frac = s.at("sigma_delta").get<double>();
    m.config.sfm.clamp_output = s.at("clamp").get<bool>();
    const json& d = c.at("degrade");
    m.config.degradation.kernel = parse_kernel_spec(d.at("kernel").get<std::string>());
    m.config.degradation.scale = d.at("scale").get<int>();
    m.config.degradation.noise = parse_noise_spec(d.at("noise").get<std::string>());

    for (const json& jr : j.at("records")) {
      PipelineRecord r;
      r.index = jr.at("index").get<std::uint64_t>();
      r.input = jr.at("input").get<std::string>();
      r.stream_id = std::stoull(jr.at("stream").get<std::string>(), nullptr, 16);
      r.applied = jr.at("applied").get<bool>();
      if (jr.contains("mask")) r.mask = mask_from_json(jr.at("mask"));
      if (jr.contains("noise_sigma")) r.noise_sigma = jr.at("noise_sigma").get<double>();
      if (jr.contains("kernel_sigma")) r.kernel_sigma = jr.at("kernel_sigma").get<double>();
      r.clamped = jr.at("clamped").get<bool>();
      for (const json& jo : jr.at("outputs"))
        r.outputs.push_back(
            {jo.at("path").get<std::string>(), jo.at("fnv1a64").get<std::string>()});
      r.failed = jr.at("failed").get<bool>();
      if (jr.contains("error")) r.error = jr.at("error").get<std::string>();
      m.records.push_back(std::move(r));
    }
    return m;
  } catch (const json::exception& e) {
    throw std::runtime_error(context + ": malformed manifest: " + e.what());
  }
}

void write_manifest(const Manifest& m, const std::filesystem::path& file) {
  const std::string text = manifest_to_json(m);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(file.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(file.string() + ": write failed");
}

Manifest read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error(file.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str(), file.string());
}

VerifyResult verify_manifest(const std::filesystem::path& manifest_file, int jobs) {
  const Manifest manifest = read_manifest(manifest_file);
  PipelineConfig cfg = manifest.config;
  finalize_kernel(cfg);
  const std::filesystem::path base = manifest_file.parent_path();

  VerifyResult result;
  std::vector<std::vector<std::string>> messages(manifest.records.size());
  std::atomic<int> checked{0}, files{0}, mismatches{0}, skipped{0};

  parallel_for_images(manifest.records.size(), jobs, [&](std::size_t i) {
    const PipelineRecord& rec = manifest.records[i];
    auto complain = [&](const std::string& msg) {
      messages[i].push_back("record " + std::to_string(rec.index) + " (" + rec.input +
                            "): " + msg);
      mismatches.fetch_add(1);
    };
    if (rec.failed) {
      skipped.fetch_add(1);
      return;
    }
    checked.fetch_add(1);
    ProcessedImage redo;
    try {
      redo = process_one(cfg, rec.index, rec.input);
    } catch (const std::exception& e) {
      complain(std::string("re-derivation failed: ") + e.what());
      return;
    }
    if (redo.record.outputs.size() != rec.outputs.size()) {
      complain("output count changed");
      return;
    }
    for (std::size_t k = 0; k < rec.outputs.size(); ++k) {
      files.fetch_add(1);
      if (redo.record.outputs[k].path != rec.outputs[k].path) {
        complain("output path drifted: " + redo.record.outputs[k].path + " vs " +
                 rec.outputs[k].path);
        continue;
      }
      if (redo.record.outputs[k].hash != rec.outputs[k].hash)
        complain("re-derived hash differs for " + rec.outputs[k].path);
      try {
        const auto bytes = read_file_bytes(base / rec.outputs[k].path);
        if (hash_string(fnv1a64(bytes.data(), bytes.size())) != rec.outputs[k].hash)
          complain("on-disk file differs for " + rec.outputs[k].path);
      } catch (const std::exception& e) {
        complain(std::string("cannot read output: ") + e.what());
      }
    }
  });

  result.records_checked = checked.load();
  result.files_checked = files.load();
  result.mismatches = mismatches.load();
  result.skipped_failed = skipped.load();
  for (auto& v : messages)
    for (auto& msg : v) result.messages.push_back(std::move(msg));
  return result;
}

}  // namespace sfm
