#pragma once

// Static-graph statistics of a temporal edge list: components, clustering,
// diameters, degree histograms and month-by-month growth.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dnmetl/network.hpp"

namespace dnm {

/// Distinct directed (source, target) pairs over dense node indices, with
/// the strongest temporal weight seen on each.
struct StaticGraph {
  std::vector<std::int64_t> ids;  // index -> node id, ascending
  std::vector<std::vector<std::pair<int, double>>> out, in;
  std::vector<std::vector<std::pair<int, double>>> undirected;  // simple projection, max weight
  std::size_t static_edges = 0;

  static StaticGraph build(std::span<const std::int64_t> nodes, std::span<const TemporalEdge> edges);
  std::size_t size() const { return ids.size(); }
  bool isolated(int v) const { return undirected[v].empty(); }
};

/// Component label per node; isolated nodes get -1. Labels are dense and
/// numbered in order of each component's smallest node index.
std::vector<int> weak_components(const StaticGraph& g);
std::vector<int> strong_components(const StaticGraph& g);

/// Local clustering of the undirected projection; 0 for degree < 2.
std::vector<double> local_clustering(const StaticGraph& g);

struct NetworkStats {
  std::int64_t nodes = 0, isolated_nodes = 0, temporal_edges = 0, static_edges = 0;
  std::int64_t wcc_count = 0, largest_wcc_nodes = 0, largest_wcc_edges = 0;
  std::int64_t scc_count = 0, largest_scc_nodes = 0, largest_scc_edges = 0;
  double density = 0, avg_clustering = 0, avg_clustering_largest_wcc = 0;
  std::int64_t diameter_undirected = 0, diameter_directed = 0;
  double diameter_undirected_weighted = 0, diameter_directed_weighted = 0;
  bool diameters_computed = false;
};

/// `nodes` may list nodes without edges (counted as isolated); edge
/// endpoints are added when missing.
NetworkStats compute_stats(std::span<const std::int64_t> nodes, std::span<const TemporalEdge> edges,
                           bool diameters = true);

/// Rows of (label, value) in presentation order.
std::vector<std::pair<std::string, std::string>> stats_rows(const NetworkStats& s);

struct DegreeHistogram {
  std::map<std::int64_t, std::int64_t> in, out, total;
};
DegreeHistogram degree_distribution(std::span<const std::int64_t> nodes, std::span<const TemporalEdge> edges);

struct GrowthPoint {
  int year = 0;
  unsigned month = 0;
  std::int64_t temporal = 0, static_edges = 0, to_first_temporal = 0, to_first_static = 0;
};
/// One point per month; each counts edges with timestamp up to the month end.
std::vector<GrowthPoint> growth_series(std::span<const TemporalEdge> edges,
                                       const std::vector<std::pair<int, unsigned>>& months);

struct StatsOptions {
  bool diameters = true;
};

/// Writes stats/<name>.tsv and stats/degree-<name>.tsv for one snapshot file.
/// Nodes come from network/nodes.tsv, restricted to those active by the
/// snapshot's month when the file name carries one.
NetworkStats write_snapshot_stats(const std::filesystem::path& out_dir, const std::filesystem::path& snapshot,
                                  const StatsOptions& options = {});

/// stats/growth.tsv from the last snapshot file of `months`.
void write_growth(const std::filesystem::path& out_dir, const std::vector<std::pair<int, unsigned>>& months);

}  // namespace dnm
