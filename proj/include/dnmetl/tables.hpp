#pragma once

// Canonical output tables: relative paths and column layouts.

#include <string>
#include <vector>

namespace dnm::tables {

struct Schema {
  const char* path;  // relative to the output directory
  std::vector<std::string> header;
};

inline const Schema kForumScrapes{
    "forum/scrapes.tsv",
    {"scrape_id", "scrape_year", "scrape_month", "scrape_day", "fora", "topics", "posts", "users"}};
inline const Schema kForum{"forum/forum.tsv",
                           {"fid", "scrape_id", "category", "title", "description", "pages", "topics",
                            "topics_visible", "topics_found", "posts", "posts_found"}};
inline const Schema kTopic{"forum/topic.tsv",
                           {"fid", "tid", "first_uid", "scrape_id", "title", "posts", "posts_visible", "posts_found",
                            "views", "lp_uid", "lp_year", "lp_month", "lp_day", "lp_time", "closed", "moved"}};
inline const Schema kPost{"forum/post.tsv",
                          {"tid", "pid", "seq_id", "year", "month", "day", "time", "uid", "text", "signature",
                           "edit_uid", "edit_year", "edit_month", "edit_day", "edit_time"}};
inline const Schema kUser{"forum/user.tsv",
                          {"uid", "username", "reg_year", "reg_month", "reg_day", "scrape_id", "title", "lp_year",
                           "lp_month", "lp_day", "lp_time", "num_posts", "location"}};
inline const Schema kGaps{"forum/gaps.tsv", {"tid", "before_pid", "gap_size"}};

inline const Schema kMarketScrapes{"market/scrapes.tsv", {"mscrape_id", "scrape_year", "scrape_month", "scrape_day"}};
inline const Schema kCategories{"market/categories.tsv", {"cid", "category", "parent_cid"}};
inline const Schema kListings{"market/listings.tsv",
                              {"lid", "vid", "mscrape_id", "title", "price", "description", "cid", "ships_from",
                               "ships_to", "products_class", "listing_available", "return_policy"}};
inline const Schema kVendors{"market/vendors.tsv",
                             {"vid", "mscrape_id", "username", "rank", "sales", "approval_rating",
                              "positive_feedback", "neutral_feedback", "negative_feedback", "legacy_sales", "pgp_key",
                              "return_policy", "disabled"}};
inline const Schema kFeedback{"market/listing-feedback.tsv", {"lid", "username", "year", "month", "day", "message"}};

inline const Schema kMatch{"forum-market/user-matching.tsv", {"match_id", "username", "uid", "vid"}};

inline const Schema kNodes{"network/nodes.tsv",
                           {"uid", "secondary_uid", "tertiary_uid", "match_id", "init_year", "init_month"}};
inline const std::vector<std::string> kEdgeHeader{"Source",    "Target",   "Weight",    "to_first",
                                                  "time_diff", "seq_diff", "timestamp", "tid"};

inline const char* kIngestManifest = "ingest/ingest-manifest.tsv";
inline const char* kScrapeIndex = "ingest/scrapes-index.tsv";

/// The thirteen tables compared against a generated corpus' manifest.
inline std::vector<std::string> canonical_paths() {
  return {kForumScrapes.path, kForum.path,    kTopic.path,   kPost.path,     kUser.path,
          kGaps.path,         kMarketScrapes.path, kCategories.path, kListings.path, kVendors.path,
          kFeedback.path,     kMatch.path,    kIngestManifest};
}

}  // namespace dnm::tables
