#pragma once

// Pipeline configuration: `key = value` lines, '#' comments. Every key can
// be overridden from the environment as ETL_<KEY> with dots replaced by
// underscores and letters upper-cased (net.omega_lower -> ETL_NET_OMEGA_LOWER).
// Relative paths are taken relative to the config file's directory.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dnmetl/ingest.hpp"
#include "dnmetl/network.hpp"

namespace dnm {

// Which snapshots get the all-pairs diameters.
enum class Diameters { All, Last, None };

struct PipelineConfig {
  std::filesystem::path root;  // scrape tree
  std::filesystem::path out;   // stage artifacts
  std::vector<std::filesystem::path> overrides;
  QuirkMarkers markers;
  NetworkOptions network;
  int jobs = 0;  // 0: OpenMP default
  int posts_per_page = 25;
  int sales_from_mscrape = 13;
  std::uintmax_t shard_bytes = 64u << 20;
  Diameters diameters = Diameters::Last;

  /// Every key this loader understands, with its current value.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Applies one key. Returns an error message, or "" on success.
std::string apply_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value,
                             const std::filesystem::path& base_dir);

/// Reads the file (when non-empty), then environment overrides, then
/// command-line values (key, value), and validates. Throws UsageError
/// listing every problem.
PipelineConfig load_config(const std::filesystem::path& file,
                           const std::map<std::string, std::string>& env_overrides,
                           const std::vector<std::pair<std::string, std::string>>& cli = {});

/// ETL_* variables of the current process environment.
std::map<std::string, std::string> etl_environment();

/// Problems that make the configuration unusable (parameters only; paths
/// are checked by the stages that need them).
std::vector<std::string> validate_config(const PipelineConfig& cfg);

}  // namespace dnm
