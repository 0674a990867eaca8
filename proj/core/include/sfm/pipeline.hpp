#pragma once

// Deterministic batch pipeline: enumerate -> per-image seeded stream ->
// SFM / degradation -> encode -> manifest.
//
// Inputs are processed in lexicographic filename order and image k always
// draws from the stream derived from (master seed, k), so results are
// bit-identical regardless of worker count or completion order.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfm/degrade.hpp"
#include "sfm/image_io.hpp"
#include "sfm/sfm.hpp"

namespace sfm {

// Configuration or input-enumeration problems; the CLI maps this to exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PipelineTask { sr_synthetic, sr_real, denoise_synthetic, denoise_real };

std::optional<PipelineTask> task_from_string(std::string_view name);
const char* task_name(PipelineTask t);

// Kernel spec grammar: "identity" | "bicubic" | "gaussian:SIGMA".
BlurKernel parse_kernel_spec(const std::string& spec);
std::string kernel_spec_string(const BlurKernel& k);

// Noise spec grammar: "none" | "awgn:S" | "awgn-blind:LO,HI" | "pg:GAIN,READ".
NoiseModel parse_noise_spec(const std::string& spec);
std::string noise_spec_string(const NoiseModel& m);

struct PipelineConfig {
  PipelineTask task = PipelineTask::sr_synthetic;
  std::uint64_t seed = 0;
  bool has_seed = false;  // a seed must be given explicitly
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  // Ground-truth directory for sr_real, paired with inputs by filename.
  std::optional<std::filesystem::path> target_dir;
  ImageFormat format = ImageFormat::png8;
  SfmConfig sfm;
  DegradationConfig degradation;  // used by the synthetic tasks
};

// Parses the key = value config file (# comments, optional quotes). Every key
// has a CLI flag counterpart; see `sfmtool pipeline run --help`.
PipelineConfig load_pipeline_config(const std::filesystem::path& file);
PipelineConfig parse_pipeline_config(const std::string& text, const std::string& context);

// Throws ConfigError on an unusable config (missing seed, bad directories,
// invalid SFM or degradation parameters).
void validate_pipeline_config(const PipelineConfig& cfg);

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string hash;  // FNV-1a 64 of the encoded bytes, "0x" + 16 hex digits
};

struct PipelineRecord {
  std::uint64_t index = 0;
  std::string input;  // path as enumerated
  std::uint64_t stream_id = 0;
  bool applied = false;
  std::optional<MaskSpec> mask;
  std::optional<double> noise_sigma;   // blind-AWGN draw, byte scale
  std::optional<double> kernel_sigma;  // from the configured kernel
  bool clamped = false;                // encode clipped out-of-range samples
  std::vector<OutputFile> outputs;
  bool failed = false;
  std::string error;
};

struct Manifest {
  std::string tool = "sfmtool";
  std::string version;
  PipelineConfig config;
  std::vector<PipelineRecord> records;

  bool any_failed() const {
    for (const auto& r : records)
      if (r.failed) return true;
    return false;
  }
};

// Runs the batch with `jobs` worker threads (values < 1 mean 1). Failed
// images are recorded and skipped; the rest of the batch still completes.
// Writes outputs under cfg.output_dir plus a manifest.json next to them.
Manifest run_pipeline(const PipelineConfig& cfg, int jobs = 1);

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text, const std::string& context);
void write_manifest(const Manifest& m, const std::filesystem::path& file);
Manifest read_manifest(const std::filesystem::path& file);

struct VerifyResult {
  int records_checked = 0;
  int files_checked = 0;
  int mismatches = 0;
  int skipped_failed = 0;
  std::vector<std::string> messages;

  bool ok() const { return mismatches == 0; }
};

// Re-derives every successful record from its input and seed lineage and
// compares hashes against the manifest; also hashes the files on disk.
// Output paths resolve relative to the manifest's directory.
VerifyResult verify_manifest(const std::filesystem::path& manifest_file, int jobs = 1);

// FNV-1a 64-bit. Stable content fingerprint used throughout the manifests.
std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);
std::string hash_string(std::uint64_t h);

}  // namespace sfm
