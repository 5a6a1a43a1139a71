#pragma once

// Per-file extraction of forum pages (FluxBB-style markup). Each file is
// processed independently; no cross-file reconciliation happens here and
// relative date labels ("Today", "Tomorrow", "Yesterday") are kept verbatim.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnmetl/ingest.hpp"

namespace dnm {

/// A "<date> <time>" label split into its parts. `date` is either an
/// ISO date or a relative word; `time` is "HH:MM:SS" or empty.
struct DateLabel {
  std::string date;
  std::string time;
  bool operator==(const DateLabel&) const = default;
};

DateLabel split_date_label(std::string_view text);

struct IndexStats {
  std::optional<std::int64_t> fora, topics, posts, users;
};

enum class ForumSource { Index, ViewForum, ViewTopic };
std::string_view to_string(ForumSource s);
std::optional<ForumSource> forum_source_from_string(std::string_view s);

struct RawForumRow {
  ForumSource source = ForumSource::Index;
  std::int64_t fid = 0;
  std::optional<std::string> category;
  std::optional<std::string> title;
  std::optional<std::string> description;
  std::optional<std::int64_t> pages;
  std::optional<std::int64_t> topics_expected;
  std::optional<std::int64_t> posts_expected;
};

struct LastPostRef {
  std::string username;
  DateLabel when;
};

struct RawTopicRow {
  ForumSource source = ForumSource::ViewForum;  // ViewForum or ViewTopic
  std::int64_t tid = 0;
  std::int64_t fid = 0;
  std::optional<std::string> title;
  std::optional<std::int64_t> posts_expected;
  std::optional<std::int64_t> views;
  std::optional<LastPostRef> last_post;
  std::optional<bool> closed;
  bool moved = false;
  std::optional<std::string> first_post_user;
};

struct EditInfo {
  std::string username;
  DateLabel when;
};

struct RawPostRow {
  std::int64_t pid = 0;
  std::int64_t tid = 0;
  std::int64_t position = 0;  // absolute position in the topic
  std::int64_t position_on_page = 0;
  std::int64_t page_number = 1;
  DateLabel posted;
  std::int64_t uid = 0;
  std::string username;
  std::string text;  // inner HTML, verbatim
  std::optional<std::string> signature;
  std::optional<EditInfo> edit;
  std::optional<std::int64_t> poster_post_count;
  std::optional<std::string> poster_title;
  std::optional<std::string> poster_registered;
};

struct RawProfileRow {
  std::int64_t uid = 0;
  std::string username;
  std::optional<std::string> title;
  std::optional<std::string> registered;
  std::optional<DateLabel> last_post;
  std::optional<std::int64_t> num_posts;
  std::optional<std::string> location;
};

struct RawForumBatch {
  ClassifiedFile source;
  std::optional<IndexStats> index_stats;
  std::vector<RawForumRow> forum_rows;
  std::vector<RawTopicRow> topic_rows;
  std::vector<RawPostRow> post_rows;
  std::vector<RawProfileRow> profile_rows;
  std::vector<std::string> diagnostics;

  bool empty() const {
    return !index_stats && forum_rows.empty() && topic_rows.empty() && post_rows.empty() && profile_rows.empty();
  }
};

/// Expects `file.quirk == None` and a forum page class; anything else yields
/// an empty batch with a diagnostic.
RawForumBatch extract_forum_file(const ClassifiedFile& file, std::string_view contents);

}  // namespace dnm
