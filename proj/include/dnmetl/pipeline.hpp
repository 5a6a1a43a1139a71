#pragma once

// Stage orchestration. Stages communicate only through files under the
// output directory; each finished stage leaves a stamp (.stamps/<stage>)
// holding a SHA-256 digest of its inputs and parameters plus the digests of
// what it wrote, so an unchanged rerun is skipped.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnmetl/config.hpp"

namespace dnm {

enum class Stage { Ingest, Extract, Resolve, Match, Network, Stats, Quality };

std::string_view to_string(Stage s);
std::optional<Stage> stage_from_string(std::string_view s);
/// Ingest through Quality, in execution order.
const std::vector<Stage>& all_stages();

struct RunOptions {
  bool dry_run = false;
  bool force = false;  // ignore stamps
};

struct StageOutcome {
  Stage stage = Stage::Ingest;
  bool skipped = false;  // stamp matched
  bool planned = false;  // dry run
  std::string summary;
};

/// Runs one stage. Throws InputError naming the stage to run first when a
/// prerequisite artifact is missing.
StageOutcome run_stage(Stage stage, const PipelineConfig& cfg, const RunOptions& opt, std::ostream& log);

/// Every stage in order.
std::vector<StageOutcome> run_all(const PipelineConfig& cfg, const RunOptions& opt, std::ostream& log);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& file);
std::string sha256_hex(std::string_view data);

/// Parses the ingest manifest and writes the raw tables under <out>/raw.
/// Returns the number of files that contributed rows.
std::size_t extract_all(const std::filesystem::path& root, const std::filesystem::path& out);

}  // namespace dnm
