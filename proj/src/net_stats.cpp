#include "dnmetl/net_stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <queue>
#include <regex>
#include <unordered_map>

#include "dnmetl/error.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

namespace fs = std::filesystem;

StaticGraph StaticGraph::build(std::span<const std::int64_t> nodes, std::span<const TemporalEdge> edges) {
  StaticGraph g;
  g.ids.assign(nodes.begin(), nodes.end());
  for (const auto& e : edges) {
    g.ids.push_back(e.source);
    g.ids.push_back(e.target);
  }
  std::sort(g.ids.begin(), g.ids.end());
  g.ids.erase(std::unique(g.ids.begin(), g.ids.end()), g.ids.end());
  auto index = [&](std::int64_t id) {
    return static_cast<int>(std::lower_bound(g.ids.begin(), g.ids.end(), id) - g.ids.begin());
  };
  std::map<std::pair<int, int>, double> directed;
  for (const auto& e : edges) {
    if (e.source == e.target) continue;
    auto [it, fresh] = directed.try_emplace({index(e.source), index(e.target)}, e.weight);
    if (!fresh) it->second = std::max(it->second, e.weight);
  }
  const std::size_t n = g.ids.size();
  g.out.resize(n);
  g.in.resize(n);
  g.undirected.resize(n);
  std::map<std::pair<int, int>, double> undirected;
  for (const auto& [k, w] : directed) {
    g.out[k.first].emplace_back(k.second, w);
    g.in[k.second].emplace_back(k.first, w);
    auto key = std::minmax(k.first, k.second);
    auto [it, fresh] = undirected.try_emplace({key.first, key.second}, w);
    if (!fresh) it->second = std::max(it->second, w);
  }
  for (const auto& [k, w] : undirected) {
    g.undirected[k.first].emplace_back(k.second, w);
    g.undirected[k.second].emplace_back(k.first, w);
  }
  for (auto& adj : g.undirected) std::sort(adj.begin(), adj.end());
  g.static_edges = directed.size();
  return g;
}

namespace {

std::vector<int> relabel(const std::vector<int>& raw, const StaticGraph& g) {
  std::unordered_map<int, int> dense;
  std::vector<int> out(raw.size(), -1);
  for (std::size_t v = 0; v < raw.size(); ++v) {
    if (g.isolated(static_cast<int>(v))) continue;
    auto [it, fresh] = dense.try_emplace(raw[v], static_cast<int>(dense.size()));
    out[v] = it->second;
  }
  return out;
}

}  // namespace

std::vector<int> weak_components(const StaticGraph& g) {
  const int n = static_cast<int>(g.size());
  std::vector<int> label(n, -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0 || g.isolated(s)) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (auto [w, _] : g.undirected[v])
        if (label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return label;
}

std::vector<int> strong_components(const StaticGraph& g) {
  // Iterative Tarjan.
  const int n = static_cast<int>(g.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0, comps = 0;
  for (int s = 0; s < n; ++s) {
    if (index[s] >= 0 || g.isolated(s)) continue;
    call.emplace_back(s, 0);
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = 1;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < g.out[v].size()) {
        const int w = g.out[v][i++].first;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  return relabel(comp, g);
}

std::vector<double> local_clustering(const StaticGraph& g) {
  const int n = static_cast<int>(g.size());
  std::vector<double> c(n, 0.0);
#pragma omp parallel for schedule(dynamic, 64)
  for (int v = 0; v < n; ++v) {
    const auto& adj = g.undirected[v];
    const std::size_t k = adj.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a) {
      const auto& na = g.undirected[adj[a].first];
      // Count neighbours of v that are also neighbours of adj[a], beyond a.
      auto it = na.begin();
      for (std::size_t b = a + 1; b < k; ++b) {
        it = std::lower_bound(it, na.end(), std::make_pair(adj[b].first, -std::numeric_limits<double>::infinity()));
        if (it != na.end() && it->first == adj[b].first) ++links;
      }
    }
    c[v] = 2.0 * static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
  }
  return c;
}

namespace {

struct Component {
  int label = -1;
  std::int64_t nodes = 0, edges = 0;
};

Component largest(const StaticGraph& g, const std::vector<int>& label, std::int64_t* count) {
  int comps = 0;
  for (int l : label) comps = std::max(comps, l + 1);
  *count = comps;
  std::vector<std::int64_t> nodes(comps, 0), edges(comps, 0);
  for (std::size_t v = 0; v < label.size(); ++v) {
    if (label[v] < 0) continue;
    ++nodes[label[v]];
    for (auto [w, _] : g.out[v])
      if (label[w] == label[v]) ++edges[label[v]];
  }
  Component best;
  for (int l = 0; l < comps; ++l)
    if (best.label < 0 || nodes[l] > best.nodes) best = {l, nodes[l], edges[l]};
  return best;
}

using Adj = std::vector<std::vector<std::pair<int, double>>>;

// Longest finite shortest path from any member of `members`. Sources are
// explored 64 at a time, one bit each, level by level.
std::int64_t bfs_diameter(const Adj& adj, const std::vector<int>& members) {
  std::int64_t best = 0;
  const std::size_t n = adj.size();
  const std::size_t batches = (members.size() + 63) / 64;
#pragma omp parallel
  {
    std::vector<std::uint64_t> seen(n), frontier(n), next(n);
    std::int64_t local = 0;
#pragma omp for schedule(dynamic, 1)
    for (std::size_t b = 0; b < batches; ++b) {
      std::fill(seen.begin(), seen.end(), 0);
      std::fill(frontier.begin(), frontier.end(), 0);
      const std::size_t lo = b * 64, hi = std::min(members.size(), lo + 64);
      for (std::size_t i = lo; i < hi; ++i) frontier[members[i]] = seen[members[i]] = std::uint64_t{1} << (i - lo);
      for (std::int64_t level = 1;; ++level) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t v = 0; v < n; ++v) {
          if (!frontier[v]) continue;
          for (auto [w, _] : adj[v]) next[w] |= frontier[v];
        }
        bool grew = false;
        for (std::size_t v = 0; v < n; ++v) {
          next[v] &= ~seen[v];
          seen[v] |= next[v];
          grew = grew || next[v];
        }
        if (!grew) break;
        local = std::max(local, level);
        frontier.swap(next);
      }
    }
#pragma omp critical
    best = std::max(best, local);
  }
  return best;
}

double dijkstra_diameter(const Adj& adj, const std::vector<int>& members) {
  double best = 0;
  const int n = static_cast<int>(adj.size());
#pragma omp parallel
  {
    std::vector<double> dist(n);
    double local = 0;
    using Item = std::pair<double, int>;
#pragma omp for schedule(dynamic, 16)
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      dist[members[i]] = 0;
      pq.emplace(0.0, members[i]);
      while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        local = std::max(local, d);
        for (auto [w, weight] : adj[v]) {
          const double nd = d + 1.0 / weight;
          if (nd < dist[w]) {
            dist[w] = nd;
            pq.emplace(nd, w);
          }
        }
      }
    }
#pragma omp critical
    best = std::max(best, local);
  }
  return best;
}

}  // namespace

NetworkStats compute_stats(std::span<const std::int64_t> nodes, std::span<const TemporalEdge> edges,
                           bool diameters) {
  NetworkStats s;
  const StaticGraph g = StaticGraph::build(nodes, edges);
  s.nodes = static_cast<std::int64_t>(g.size());
  s.temporal_edges = static_cast<std::int64_t>(edges.size());
  s.static_edges = static_cast<std::int64_t>(g.static_edges);
  std::int64_t active = 0;
  for (int v = 0; v < static_cast<int>(g.size()); ++v)
    if (!g.isolated(v)) ++active;
  s.isolated_nodes = s.nodes - active;
  if (active == 0) return s;

  const auto wcc = weak_components(g);
  const auto scc = strong_components(g);
  const Component lw = largest(g, wcc, &s.wcc_count);
  const Component ls = largest(g, scc, &s.scc_count);
  s.largest_wcc_nodes = lw.nodes;
  s.largest_wcc_edges = lw.edges;
  s.largest_scc_nodes = ls.nodes;
  s.largest_scc_edges = ls.edges;
  s.density = active > 1 ? static_cast<double>(s.static_edges) / (static_cast<double>(active) * (active - 1)) : 0.0;

  const auto cc = local_clustering(g);
  double sum = 0, sum_wcc = 0;
  std::vector<int> members;
  for (int v = 0; v < static_cast<int>(g.size()); ++v) {
    if (g.isolated(v)) continue;
    sum += cc[v];
    if (wcc[v] == lw.label) {
      sum_wcc += cc[v];
      members.push_back(v);
    }
  }
  s.avg_clustering = sum / static_cast<double>(active);
  s.avg_clustering_largest_wcc = sum_wcc / static_cast<double>(lw.nodes);

  if (diameters) {
    s.diameter_undirected = bfs_diameter(g.undirected, members);
    s.diameter_directed = bfs_diameter(g.out, members);
    s.diameter_undirected_weighted = dijkstra_diameter(g.undirected, members);
    s.diameter_directed_weighted = dijkstra_diameter(g.out, members);
    s.diameters_computed = true;
  }
  return s;
}

std::vector<std::pair<std::string, std::string>> stats_rows(const NetworkStats& s) {
  auto pct = [](std::int64_t part, std::int64_t whole) {
    return whole ? fmt::format("{:.3f}", 100.0 * static_cast<double>(part) / static_cast<double>(whole))
                 : std::string("0.000");
  };
  const std::int64_t active = s.nodes - s.isolated_nodes;
  std::vector<std::pair<std::string, std::string>> rows{
      {"Nodes", std::to_string(s.nodes)},
      {"Isolated nodes", std::to_string(s.isolated_nodes)},
      {"Temporal edges", std::to_string(s.temporal_edges)},
      {"Static edges", std::to_string(s.static_edges)},
      {"Number of weakly connected components (WCC)", std::to_string(s.wcc_count)},
      {"Nodes in largest WCC", std::to_string(s.largest_wcc_nodes)},
      {"Nodes in largest WCC (% of non-isolated nodes)", pct(s.largest_wcc_nodes, active)},
      {"Edges in largest WCC", std::to_string(s.largest_wcc_edges)},
      {"Edges in largest WCC (% of static edges)", pct(s.largest_wcc_edges, s.static_edges)},
      {"Number of strongly connected components (SCC)", std::to_string(s.scc_count)},
      {"Nodes in largest SCC", std::to_string(s.largest_scc_nodes)},
      {"Nodes in largest SCC (% of non-isolated nodes)", pct(s.largest_scc_nodes, active)},
      {"Edges in largest SCC", std::to_string(s.largest_scc_edges)},
      {"Edges in largest SCC (% of static edges)", pct(s.largest_scc_edges, s.static_edges)},
      {"Density (excluding isolated nodes)", fmt::format("{:.6g}", s.density)},
      {"Average clustering coefficient", fmt::format("{:.6f}", s.avg_clustering)},
      {"Average clustering coefficient largest WCC", fmt::format("{:.6f}", s.avg_clustering_largest_wcc)}};
  if (s.diameters_computed) {
    rows.push_back({"Diameter largest WCC (undirected, unweighted)", std::to_string(s.diameter_undirected)});
    rows.push_back({"Diameter largest WCC (directed, unweighted)", std::to_string(s.diameter_directed)});
    rows.push_back({"Diameter largest WCC (undirected, weighted)", fmt::format("{:.2f}", s.diameter_undirected_weighted)});
    rows.push_back({"Diameter largest WCC (directed, weighted)", fmt::format("{:.2f}", s.diameter_directed_weighted)});
  }
  return rows;
}

DegreeHistogram degree_distribution(std::span<const std::int64_t> nodes, std::span<const TemporalEdge> edges) {
  const StaticGraph g = StaticGraph::build(nodes, edges);
  DegreeHistogram h;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto in = static_cast<std::int64_t>(g.in[v].size()), out = static_cast<std::int64_t>(g.out[v].size());
    ++h.in[in];
    ++h.out[out];
    ++h.total[in + out];
  }
  return h;
}

std::vector<GrowthPoint> growth_series(std::span<const TemporalEdge> edges,
                                       const std::vector<std::pair<int, unsigned>>& months) {
  std::vector<TemporalEdge> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<GrowthPoint> out;
  // Per static pair: whether any regular edge has been seen so far.
  std::map<std::pair<std::int64_t, std::int64_t>, bool> pairs;
  std::int64_t first_only = 0, to_first = 0;
  std::size_t i = 0;
  for (const auto& [y, m] : months) {
    const std::int64_t cutoff = network_seconds(end_of_month(y, m));
    for (; i < sorted.size() && sorted[i].timestamp <= cutoff; ++i) {
      const auto& e = sorted[i];
      if (e.to_first) ++to_first;
      auto [it, fresh] = pairs.try_emplace({e.source, e.target}, !e.to_first);
      if (fresh) {
        if (e.to_first) ++first_only;
      } else if (!e.to_first && !it->second) {
        it->second = true;
        --first_only;
      }
    }
    out.push_back({y, m, static_cast<std::int64_t>(i), static_cast<std::int64_t>(pairs.size()), to_first, first_only});
  }
  return out;
}

namespace {

std::vector<std::int64_t> read_nodes(const fs::path& out_dir, std::optional<std::pair<int, unsigned>> by) {
  std::vector<std::int64_t> nodes;
  const fs::path file = out_dir / tables::kNodes.path;
  if (!fs::exists(file)) return nodes;
  for_each_row(file, [&](const std::vector<std::string>&, std::vector<std::string>& r) {
    if (by) {
      auto y = field::opt_int(r[4]), m = field::opt_int(r[5]);
      if (!y || !m || std::make_pair(static_cast<int>(*y), static_cast<unsigned>(*m)) > *by) return;
    }
    nodes.push_back(field::req_int(r[0], "uid"));
  });
  return nodes;
}

}  // namespace

NetworkStats write_snapshot_stats(const fs::path& out_dir, const fs::path& snapshot, const StatsOptions& options) {
  if (!fs::exists(snapshot)) throw InputError(fmt::format("no snapshot {}; run the network stage", snapshot.string()));
  const auto edges = read_edges(snapshot);
  const std::string stem = snapshot.stem().string();
  std::optional<std::pair<int, unsigned>> month;
  static const std::regex kMonth(R"(edges-(\d{4})-(\d{1,2}))");
  std::smatch mm;
  if (std::regex_match(stem, mm, kMonth))
    month = std::make_pair(std::stoi(mm[1]), static_cast<unsigned>(std::stoi(mm[2])));
  const auto nodes = read_nodes(out_dir, month);
  const NetworkStats s = compute_stats(nodes, edges, options.diameters);
  {
    TsvWriter w(out_dir / "stats" / (stem + ".tsv"), {"measure", "value"});
    for (const auto& [k, v] : stats_rows(s)) w.write_row({k, v});
    w.commit();
  }
  const DegreeHistogram h = degree_distribution(nodes, edges);
  TsvWriter w(out_dir / "stats" / ("degree-" + stem + ".tsv"), {"degree", "in", "out", "total"});
  std::int64_t top = 0;
  for (const auto* m : {&h.in, &h.out, &h.total})
    if (!m->empty()) top = std::max(top, m->rbegin()->first);
  auto at = [](const std::map<std::int64_t, std::int64_t>& m, std::int64_t k) {
    auto it = m.find(k);
    return it == m.end() ? std::int64_t{0} : it->second;
  };
  for (std::int64_t d = 0; d <= top; ++d) {
    if (!h.in.count(d) && !h.out.count(d) && !h.total.count(d)) continue;
    w.write_row({std::to_string(d), std::to_string(at(h.in, d)), std::to_string(at(h.out, d)),
                 std::to_string(at(h.total, d))});
  }
  w.commit();
  return s;
}

void write_growth(const fs::path& out_dir, const std::vector<std::pair<int, unsigned>>& months) {
  if (months.empty()) return;
  const fs::path last = out_dir / edge_file_name(months.back().first, months.back().second);
  if (!fs::exists(last)) throw InputError(fmt::format("no snapshot {}; run the network stage", last.string()));
  const auto edges = read_edges(last);
  TsvWriter w(out_dir / "stats" / "growth.tsv",
              {"year", "month", "temporal_edges", "static_edges", "to_first_temporal", "to_first_static"});
  for (const auto& p : growth_series(edges, months))
    w.write_row({std::to_string(p.year), std::to_string(p.month), std::to_string(p.temporal),
                 std::to_string(p.static_edges), std::to_string(p.to_first_temporal),
                 std::to_string(p.to_first_static)});
  w.commit();
}

}  // namespace dnm
