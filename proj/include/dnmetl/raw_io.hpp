#pragma once

// Raw (per-file) extraction tables under <out>/raw/. Every row starts with
// the source columns scrape_id, path, retrieval_time so that resolution can
// work from these files alone.

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dnmetl/forum_extract.hpp"
#include "dnmetl/market_extract.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

struct SourceTag {
  int scrape_id = 0;
  std::string path;
  DateTime retrieval_time{};
};

template <typename Row>
struct Tagged {
  SourceTag src;
  Row row;
};

namespace raw {

inline constexpr const char* kIndexStats = "index-stats.tsv";
inline constexpr const char* kForumRows = "forum-rows.tsv";
inline constexpr const char* kTopicRows = "topic-rows.tsv";
inline constexpr const char* kPostRows = "post-rows.tsv";
inline constexpr const char* kProfileRows = "profile-rows.tsv";
inline constexpr const char* kListingRows = "listing-rows.tsv";
inline constexpr const char* kVendorRows = "vendor-rows.tsv";
inline constexpr const char* kCategoryRows = "category-rows.tsv";
inline constexpr const char* kFeedbackRows = "feedback-rows.tsv";
inline constexpr const char* kDiagnostics = "diagnostics.tsv";

std::vector<std::string> all_files();

}  // namespace raw

/// Appends extracted batches to the raw tables of one directory. Rows are
/// written in the order batches are added; commit() publishes all files.
class RawWriter {
 public:
  explicit RawWriter(const std::filesystem::path& dir);
  ~RawWriter();
  void add(const RawForumBatch& b);
  void add(const RawMarketBatch& b);
  void commit();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

void read_index_stats(const std::filesystem::path& dir, const std::function<void(Tagged<IndexStats>&&)>& fn);
void read_forum_rows(const std::filesystem::path& dir, const std::function<void(Tagged<RawForumRow>&&)>& fn);
void read_topic_rows(const std::filesystem::path& dir, const std::function<void(Tagged<RawTopicRow>&&)>& fn);
void read_post_rows(const std::filesystem::path& dir, const std::function<void(Tagged<RawPostRow>&&)>& fn);
/// Same layout as the post table but from an explicit file (resolution shards).
void read_post_rows_file(const std::filesystem::path& file, const std::function<void(Tagged<RawPostRow>&&)>& fn);
void read_profile_rows(const std::filesystem::path& dir, const std::function<void(Tagged<RawProfileRow>&&)>& fn);
void read_listing_rows(const std::filesystem::path& dir, const std::function<void(Tagged<RawListingRow>&&)>& fn);
void read_vendor_rows(const std::filesystem::path& dir, const std::function<void(Tagged<RawVendorRow>&&)>& fn);
void read_category_rows(const std::filesystem::path& dir, const std::function<void(Tagged<RawCategoryRow>&&)>& fn);
void read_feedback_rows(const std::filesystem::path& dir, const std::function<void(Tagged<RawFeedbackRow>&&)>& fn);

}  // namespace dnm
