#pragma once

// Deterministic synthetic scrape corpora with ground-truth tables.
//
// A world (fora, users, topics, posts, categories, vendors, listings) is
// drawn from the seed, a coverage plan decides which pages each scrape
// captured, and the pages are rendered into the ingest layout. Expected
// canonical tables are derived from the world and the plan alone.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnmetl/civil_time.hpp"
#include "dnmetl/ingest.hpp"

namespace dnm {

struct AnomalyToggles {
  bool today_tomorrow_dates = false;
  bool midnight_offset = false;
  bool seven_day_mtime_fault = false;
  bool moved_topics = false;
  bool banned_uid_reuse = false;
  bool multi_username_uid = false;
  bool lid_off_by_one = false;
  bool substring_titles = false;
  bool category_rename = false;
  bool rank_epoch_switch = false;
  bool hidden_id_gaps = false;
  bool post_deletion_gaps = false;
  bool field_conflicts = false;

  static const std::vector<std::string>& names();
  bool* find(std::string_view name);
  bool get(std::string_view name) const;
};

struct CorpusProfile {
  std::uint64_t seed = 1;
  int forum_scrapes = 3;
  int market_scrapes = 3;
  int fora = 5;
  int users = 40;
  int topics = 30;
  double posts_per_topic = 8;  // mean
  int vendors = 8;
  int listings_per_vendor = 4;
  double feedback_per_listing = 3;  // mean
  std::map<Quirk, double> quirk_rates{{Quirk::Empty, 0.01}, {Quirk::ErrorPage, 0.01}, {Quirk::Partial, 0.01},
                                      {Quirk::LoggedOut, 0.01}, {Quirk::Obscured, 0.005}};
  AnomalyToggles anomalies;
  // Capture probabilities per scrape.
  double p_viewforum = 0.85, p_viewtopic = 0.8, p_profile = 0.7;
  double p_store = 0.8, p_listing = 0.6, p_vendor = 0.7;
  int sales_from_mscrape = 2;
  int posts_per_page = 25;
  Date first_scrape = make_date(2014, 1, 20);
  Date last_scrape = make_date(2015, 3, 25);

  /// key = value lines; unknown keys and bad values are collected as errors.
  static CorpusProfile load(const std::filesystem::path& file);
  static CorpusProfile parse(std::string_view text, std::vector<std::string>& errors);
};

struct SynthSummary {
  std::size_t files = 0;
  std::map<std::string, std::size_t> quirk_files;
  std::size_t injected_gaps = 0;
  std::size_t forum_pages = 0, market_pages = 0;
};

/// Writes <out>/corpus, <out>/overrides.tsv, <out>/pipeline.conf and
/// <out>/manifest/ (expected tables plus summary.json). `out` must be empty
/// or absent.
SynthSummary generate_corpus(const CorpusProfile& profile, const std::filesystem::path& out);

}  // namespace dnm
