#pragma once

// Links forum users to market vendors by exact, case-sensitive username.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dnm {

struct MatchRow {
  std::optional<std::int64_t> match_id;
  std::string username;
  std::optional<std::int64_t> uid;
  std::optional<std::int64_t> vid;
  bool operator==(const MatchRow&) const = default;
};

/// Inputs are (id, username) pairs; duplicates are ignored. A username with
/// m uids and n vids yields m*n rows sharing one match_id; match ids are
/// dense from 1 in username order. Rows are sorted by (username, uid, vid).
std::vector<MatchRow> match_users(const std::vector<std::pair<std::int64_t, std::string>>& users,
                                  const std::vector<std::pair<std::int64_t, std::string>>& vendors);

/// Reads forum/user.tsv and market/vendors.tsv under `out_dir` and writes
/// forum-market/user-matching.tsv. Returns the number of rows.
std::size_t write_user_matching(const std::filesystem::path& out_dir);

}  // namespace dnm
