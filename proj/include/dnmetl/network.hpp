#pragma once

// Weighted temporal communication network from resolved posts: one edge per
// reply relation inside a topic, plus edges to each topic's initial poster.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "dnmetl/civil_time.hpp"

namespace dnm {

struct NetParams {
  std::int64_t delta_phi = 10;
  Seconds delta_t = std::chrono::duration_cast<Seconds>(std::chrono::months{1});
  double omega_lower = 0.2;
  Seconds t_lim = std::chrono::days{7};
  double omega_first = 0.5;

  /// Every violated constraint, empty when valid.
  std::vector<std::string> validate() const;
};

/// Duration text: an integer with unit s, min, h, d, w or mo (average
/// Gregorian month). A bare integer is seconds.
std::optional<Seconds> parse_duration(std::string_view text);
std::string format_duration(Seconds s);

/// Exponential decay from 1 at zero delay to omega_lower at t_lim, flat after.
double edge_weight(Seconds time_diff, const NetParams& p);

struct TemporalEdge {
  std::int64_t source = 0;
  std::int64_t target = 0;
  double weight = 0;
  bool to_first = false;
  std::int64_t time_diff = 0;  // seconds
  std::int64_t seq_diff = 0;
  std::int64_t timestamp = 0;  // seconds since 2014-01-01
  std::int64_t tid = 0;

  auto key() const { return std::tie(timestamp, tid, source, target, to_first, seq_diff, time_diff); }
  bool operator<(const TemporalEdge& o) const { return key() < o.key(); }
  bool operator==(const TemporalEdge& o) const { return key() == o.key() && weight == o.weight; }
};

struct NetPost {
  std::int64_t seq = 0;
  std::int64_t node = 0;
  std::int64_t timestamp = 0;
};

/// Edges of one topic. `posts` must be in seq order. Negative time
/// differences (dates out of seq order) are clamped to zero and counted.
std::vector<TemporalEdge> build_topic_edges(std::int64_t tid, std::span<const NetPost> posts, const NetParams& p,
                                            std::size_t* clamped = nullptr);

/// Snapshot month list from (y0, m0) through (y1, m1) inclusive.
std::vector<std::pair<int, unsigned>> month_range(int y0, unsigned m0, int y1, unsigned m1);

/// "network/edges-2014-2.tsv"
std::string edge_file_name(int year, unsigned month);

struct NetworkOptions {
  NetParams params;
  int first_year = 2014;
  unsigned first_month = 1;
  int last_year = 2015;
  unsigned last_month = 3;
};

struct NetworkReport {
  std::size_t nodes = 0, edges = 0, skipped_posts = 0, clamped = 0, snapshots = 0;
  std::vector<std::string> diagnostics;
};

/// Reads forum/post.tsv, forum/user.tsv and forum-market/user-matching.tsv
/// under `out_dir`; writes network/nodes.tsv and one cumulative edge file
/// per month.
NetworkReport build_network(const std::filesystem::path& out_dir, const NetworkOptions& options = {});

void write_edges(const std::filesystem::path& file, std::span<const TemporalEdge> edges);
std::vector<TemporalEdge> read_edges(const std::filesystem::path& file);

}  // namespace dnm
