#pragma once

// Merges raw forum rows across files and scrapes into the canonical forum
// tables (scrapes, forum, topic, post, user) plus the gap report.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnmetl/civil_time.hpp"
#include "dnmetl/ingest.hpp"
#include "dnmetl/overrides.hpp"

namespace dnm {

/// Date of one observation of a label. ISO dates pass through; "Today",
/// "Yesterday" and "Tomorrow" are taken relative to the retrieval date, or
/// to the scrape date when the retrieval date is exactly seven days past it.
std::optional<Date> resolve_date_label(std::string_view label, DateTime retrieval,
                                       std::optional<Date> scrape_date = std::nullopt);

/// resolve_date_label, then the earliest of that and every sibling
/// observation of the same fact.
std::optional<Date> normalize_relative_date(std::string_view label, DateTime retrieval,
                                            std::optional<Date> scrape_date, std::span<const Date> siblings);

/// Member titles from most to least important.
const std::vector<std::string>& title_order();
/// Position in title_order(); titles outside it rank after all of them.
int title_rank(std::string_view title);
/// The more important of two titles (ties: lexicographically smaller).
std::string_view better_title(std::string_view a, std::string_view b);

struct GapRow {
  std::int64_t tid = 0;
  std::int64_t before_pid = 0;
  std::int64_t gap_size = 0;
  bool operator==(const GapRow&) const = default;
};

struct SeqKey {
  std::int64_t pid = 0;
  std::int64_t page = 1;
  std::int64_t position = 0;  // displayed absolute position
};

/// Orders one topic's posts by (page, position, pid) and reports the
/// position discontinuities. On return `posts` is in seq order.
std::vector<GapRow> order_topic(std::int64_t tid, std::vector<SeqKey>& posts);

struct ForumResolveOptions {
  int posts_per_page = 25;            // recomputing positions for implied topic sizes
  std::uintmax_t shard_bytes = 64u << 20;  // raw post rows per resolution shard
  std::filesystem::path scratch_dir;  // shard files; defaults to <out>/.scratch
};

struct ForumResolveReport {
  std::size_t users = 0, posts = 0, topics = 0, fora = 0, gaps = 0, shards = 0;
  std::vector<std::string> diagnostics;
};

/// Reads <raw_dir>/*.tsv and writes the forum tables under <out_dir>/forum/.
ForumResolveReport resolve_forum(const std::filesystem::path& raw_dir, const ScrapeIndex& index,
                                 const OverridePatch& patch, const std::filesystem::path& out_dir,
                                 const ForumResolveOptions& options = {});

}  // namespace dnm
