#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ucoint/cointegration.hpp"
#include "ucoint/ingest.hpp"
#include "ucoint/ucsv.hpp"
#include "ucoint/unitroot.hpp"

namespace ucoint {

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path output_dir = "out";
  std::filesystem::path fred_cache = "cache";
  std::uint64_t seed = 0;
  bool with_output = false;  // adds IP growth to every regression
  UcsvConfig ucsv;
  Trim trim;
  std::optional<int> bandwidth;
  std::optional<int> gh_max_lag;
  Deterministic unitroot_spec = Deterministic::constant;
  std::optional<int> unitroot_max_lag;
  double decision_level = 0.10;
  int decision_required = 2;
  int ecm_difference_lags = 0;
  int var_lags = 2;
  double cusum_level = 0.05;
  int threads = 1;

  // Relative paths in the file resolve against the file's directory. "seed" is required.
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig parse(const std::string& json_text, const std::filesystem::path& base_dir);
  void validate() const;

  // Settings that change results; output location and thread count are excluded.
  std::string canonical_json() const;
  // FNV-1a of canonical_json() plus the manifest contents, 16 hex digits.
  std::string hash() const;
};

enum class Stage { fetch, ucsv, unitroot, gh, fit, ecm, var, cusum, report };

const std::vector<Stage>& all_stages();
std::string stage_name(Stage s);
Stage parse_stage(const std::string& name);

struct StageIo {
  std::shared_ptr<Transport> transport;  // defaults to HTTPS
  std::string api_key;                   // defaults to FRED_API_KEY
};

// Runs one stage, reading the outputs of earlier stages from cfg.output_dir.
// Inputs carrying a different config hash are refused. Returns files written.
std::vector<std::filesystem::path> run_stage(Stage stage, const PipelineConfig& cfg, const StageIo& io = {});

// All stages in order. On failure every file written by this call is removed
// and the error names the failing stage.
std::vector<std::filesystem::path> run_pipeline(const PipelineConfig& cfg, const StageIo& io = {});

std::string library_version();

}  // namespace ucoint
