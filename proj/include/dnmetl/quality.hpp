#pragma once

// Data-quality reports over the resolved tables: hidden-id estimates,
// per-scrape record completeness and empty-field taxonomies.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dnm {

struct HiddenDataEstimate {
  std::string identifier;
  std::int64_t max_seen = 0;
  std::int64_t unique_found = 0;
  std::optional<std::int64_t> surplus_reported;
  std::int64_t hidden = 0;
  std::int64_t hidden_pct_tenths = 0;  // percent of max_seen, rounded half up to 0.1

  std::string hidden_pct() const;  // "25.0"
};

HiddenDataEstimate estimate_hidden(std::string identifier, std::int64_t max_seen, std::int64_t unique_found,
                                   std::optional<std::int64_t> surplus_reported);

/// count/total as a percentage with two decimals, rounded half up.
std::string percent_of(std::int64_t count, std::int64_t total);

/// fid, tid, pid, uid, vid and lid estimates from the tables under `out_dir`.
std::vector<HiddenDataEstimate> hidden_data_report(const std::filesystem::path& out_dir);

struct QualityReport {
  std::vector<HiddenDataEstimate> hidden;
  std::size_t forum_scrapes = 0, market_scrapes = 0, field_tables = 0;
};

/// Writes quality/hidden.tsv, quality/completeness-forum.tsv,
/// quality/completeness-market.tsv and quality/fields-<table>.tsv.
QualityReport write_quality(const std::filesystem::path& out_dir, int sales_from_mscrape = 13);

}  // namespace dnm
