#pragma once

// Merges raw market rows into the canonical market tables (scrapes,
// categories, listings, vendors, listing feedback) and checks vendor ranks
// against the two ranking systems.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnmetl/civil_time.hpp"
#include "dnmetl/ingest.hpp"
#include "dnmetl/overrides.hpp"

namespace dnm {

struct PreRank {
  std::string name;
  std::optional<std::int64_t> max_sales;  // empty: unbounded
};

struct PostRank {
  std::string name;
  std::int64_t min_sales = 0;
  std::optional<std::int64_t> max_sales;
  std::optional<double> revenue_btc;  // requirement, empty for Level 1
  std::optional<double> feedback;     // minimum approval fraction
};

struct RankSystem {
  Date epoch_switch = make_date(2014, 5, 5);
  std::vector<PreRank> pre_ranks;
  std::vector<PostRank> post_ranks;

  static const RankSystem& standard();
};

enum class RankVerdict { Consistent, SalesExceedRange, Inconsistent, Unknown };
std::string_view to_string(RankVerdict v);

/// Verdict for a displayed rank given the vendor's sales, revenue and
/// approval on `date`. Post-switch ranks are only held against their sales
/// range once revenue and feedback requirements are met; sales above the
/// range are then allowed (SalesExceedRange).
RankVerdict check_rank(std::string_view rank, std::optional<std::int64_t> sales,
                       std::optional<double> revenue_btc, std::optional<double> approval, Date date,
                       const RankSystem& system = RankSystem::standard());

/// For one lid within one scrape: maps every title to the longest observed
/// title containing it (ties: lexicographically smaller).
std::map<std::string, std::string> collapse_titles(const std::vector<std::string>& titles);

struct CategoryObservation {
  std::int64_t cid = 0;
  std::optional<std::int64_t> parent;
};

/// Parent per cid maximizing hierarchy depth. Throws InputError on a cycle.
std::map<std::int64_t, std::optional<std::int64_t>> deepest_parents(const std::vector<CategoryObservation>& obs);

/// Candidates with every ancestor of another candidate removed.
std::vector<std::int64_t> prune_ancestors(const std::vector<std::int64_t>& cids,
                                          const std::map<std::int64_t, std::optional<std::int64_t>>& parents);

struct MarketResolveOptions {
  int sales_from_mscrape = 13;
  std::map<std::string, std::string> category_renames{{"Disassociatives", "Dissociatives"}};
};

struct MarketResolveReport {
  std::size_t categories = 0, listings = 0, vendors = 0, feedback = 0;
  std::vector<std::string> diagnostics;
};

/// Reads <raw_dir>/*.tsv and writes the market tables under <out_dir>/market/.
MarketResolveReport resolve_market(const std::filesystem::path& raw_dir, const ScrapeIndex& index,
                                   const OverridePatch& patch, const std::filesystem::path& out_dir,
                                   const MarketResolveOptions& options = {});

}  // namespace dnm
