#pragma once

// Slow, obviously-correct reference implementations shared by the unit and
// acceptance tests. Nothing here calls into the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dnmetl/network.hpp"

namespace oracle {

struct Post {
  std::int64_t seq, node, timestamp;
};

inline double weight(std::int64_t td, double omega_lower, std::int64_t t_lim) {
  if (td >= t_lim) return omega_lower;
  const double e3 = std::exp(3.0);
  return omega_lower + (1 - omega_lower) * (std::exp(3.0 * double(t_lim - td) / double(t_lim)) - 1) / (e3 - 1);
}

// Every ordered pair of posts checked against the four edge conditions,
// plus one edge to the initial poster per later post.
inline std::vector<dnm::TemporalEdge> topic_edges(std::int64_t tid, const std::vector<Post>& posts,
                                                  const dnm::NetParams& p) {
  std::vector<dnm::TemporalEdge> out;
  const std::int64_t dt = p.delta_t.count(), tl = p.t_lim.count();
  for (std::size_t a = 0; a < posts.size(); ++a) {
    const Post& pa = posts[a];
    // seq of the responder's previous post in the topic, 0 when none
    std::int64_t prev = 0;
    for (std::size_t c = 0; c < a; ++c)
      if (posts[c].node == pa.node) prev = std::max(prev, posts[c].seq);
    for (std::size_t b = 0; b < posts.size(); ++b) {
      const Post& pb = posts[b];
      if (pa.node == pb.node) continue;
      if (!(prev < pb.seq && pb.seq < pa.seq)) continue;
      if (pa.seq - pb.seq > p.delta_phi) continue;
      if (pa.timestamp - pb.timestamp > dt) continue;
      const std::int64_t td = std::max<std::int64_t>(0, pa.timestamp - pb.timestamp);
      out.push_back({pa.node, pb.node, weight(td, p.omega_lower, tl), false, td, pa.seq - pb.seq, pa.timestamp, tid});
    }
    if (a > 0 && pa.node != posts[0].node) {
      const std::int64_t td = std::max<std::int64_t>(0, pa.timestamp - posts[0].timestamp);
      out.push_back({pa.node, posts[0].node, p.omega_first, true, td, pa.seq - posts[0].seq, pa.timestamp, tid});
    }
  }
  return out;
}

// Random topic: up to max_posts posts by a handful of users, mostly
// increasing timestamps with occasional out-of-order dates.
inline std::vector<Post> random_topic(std::mt19937_64& rng, int max_posts) {
  std::uniform_int_distribution<int> len(1, max_posts);
  const int n = len(rng);
  std::uniform_int_distribution<int> users(1, std::max(2, n / 3));
  const int u = users(rng);
  std::uniform_int_distribution<std::int64_t> who(1, u);
  std::exponential_distribution<double> gap(1.0 / (3 * 86400.0));
  std::bernoulli_distribution back(0.03);
  std::vector<Post> posts;
  std::int64_t t = 1000000;
  for (int i = 1; i <= n; ++i) {
    std::int64_t step = static_cast<std::int64_t>(gap(rng));
    t += back(rng) ? -std::min<std::int64_t>(step, 86400) : step;
    posts.push_back({i, who(rng), t});
  }
  return posts;
}

// ---- graphs --------------------------------------------------------------

struct Graph {
  int n = 0;
  std::vector<std::vector<char>> adj;  // directed adjacency matrix, no self loops
  std::vector<std::vector<double>> w;  // strongest weight per ordered pair

  bool und(int a, int b) const { return adj[a][b] || adj[b][a]; }
  int degree(int v) const {
    int d = 0;
    for (int u = 0; u < n; ++u) d += u != v && und(v, u);
    return d;
  }
};

inline Graph graph_of(const std::vector<std::int64_t>& ids, const std::vector<dnm::TemporalEdge>& edges) {
  Graph g;
  g.n = static_cast<int>(ids.size());
  g.adj.assign(g.n, std::vector<char>(g.n, 0));
  g.w.assign(g.n, std::vector<double>(g.n, 0));
  auto idx = [&](std::int64_t id) {
    return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  for (const auto& e : edges) {
    int s = idx(e.source), t = idx(e.target);
    if (s == t) continue;
    g.adj[s][t] = 1;
    g.w[s][t] = std::max(g.w[s][t], e.weight);
  }
  return g;
}

// Labels in order of smallest member index, -1 for isolated nodes.
inline std::vector<int> canonical(const std::vector<int>& raw) {
  std::map<int, int> re;
  std::vector<int> out(raw.size(), -1);
  for (std::size_t v = 0; v < raw.size(); ++v) {
    if (raw[v] < 0) continue;
    auto [it, fresh] = re.emplace(raw[v], static_cast<int>(re.size()));
    out[v] = it->second;
  }
  return out;
}

inline std::vector<int> wcc(const Graph& g) {
  std::vector<int> parent(g.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int a = 0; a < g.n; ++a)
    for (int b = 0; b < g.n; ++b)
      if (g.adj[a][b]) parent[find(a)] = find(b);
  std::vector<int> label(g.n);
  for (int v = 0; v < g.n; ++v) label[v] = g.degree(v) == 0 ? -1 : find(v);
  return canonical(label);
}

inline std::vector<std::vector<char>> reach(const Graph& g) {
  std::vector<std::vector<char>> r(g.n, std::vector<char>(g.n, 0));
  for (int s = 0; s < g.n; ++s) {
    std::vector<int> stack{s};
    r[s][s] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < g.n; ++u)
        if (g.adj[v][u] && !r[s][u]) {
          r[s][u] = 1;
          stack.push_back(u);
        }
    }
  }
  return r;
}

inline std::vector<int> scc(const Graph& g) {
  const auto r = reach(g);
  std::vector<int> label(g.n, -1);
  for (int v = 0; v < g.n; ++v) {
    if (g.degree(v) == 0) continue;
    for (int u = 0; u <= v; ++u)
      if (r[u][v] && r[v][u]) {
        label[v] = u;
        break;
      }
  }
  return canonical(label);
}

inline std::vector<double> clustering(const Graph& g) {
  std::vector<double> c(g.n, 0.0);
  for (int v = 0; v < g.n; ++v) {
    std::vector<int> nb;
    for (int u = 0; u < g.n; ++u)
      if (u != v && g.und(v, u)) nb.push_back(u);
    const double k = static_cast<double>(nb.size());
    if (nb.size() < 2) continue;
    double links = 0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) links += g.und(nb[a], nb[b]);
    c[v] = 2 * links / (k * (k - 1));
  }
  return c;
}

// Largest finite hop distance among ordered pairs starting in `members`
// (Floyd-Warshall over the whole graph).
inline std::int64_t diameter(const Graph& g, const std::vector<int>& members, bool directed) {
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(g.n, std::vector<int>(g.n, kInf));
  for (int a = 0; a < g.n; ++a) {
    d[a][a] = 0;
    for (int b = 0; b < g.n; ++b)
      if (a != b && (directed ? g.adj[a][b] : g.und(a, b))) d[a][b] = 1;
  }
  for (int k = 0; k < g.n; ++k)
    for (int a = 0; a < g.n; ++a) {
      if (d[a][k] == kInf) continue;
      for (int b = 0; b < g.n; ++b) d[a][b] = std::min(d[a][b], d[a][k] + d[k][b]);
    }
  std::int64_t best = 0;
  for (int a : members)
    for (int b = 0; b < g.n; ++b)
      if (d[a][b] < kInf) best = std::max<std::int64_t>(best, d[a][b]);
  return best;
}

// Random static graph as temporal edges over ids 1..n (some isolated,
// parallel edges allowed).
inline std::pair<std::vector<std::int64_t>, std::vector<dnm::TemporalEdge>> random_graph(std::mt19937_64& rng,
                                                                                         int max_nodes) {
  const int n = std::uniform_int_distribution<int>(2, max_nodes)(rng);
  const double avg_deg = std::uniform_real_distribution<double>(0.3, 6.0)(rng);
  const int m = static_cast<int>(avg_deg * n);
  std::uniform_int_distribution<std::int64_t> node(1, n);
  std::uniform_real_distribution<double> w(0.2, 1.0);
  std::vector<std::int64_t> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  std::vector<dnm::TemporalEdge> edges;
  // Clustered structure: most edges stay within small neighbourhoods.
  std::bernoulli_distribution local(0.7);
  for (int i = 0; i < m; ++i) {
    std::int64_t s = node(rng), t;
    if (local(rng)) t = std::clamp<std::int64_t>(s + std::uniform_int_distribution<int>(-4, 4)(rng), 1, n);
    else t = node(rng);
    if (s == t) continue;
    edges.push_back({s, t, std::round(w(rng) * 1e6) / 1e6, false, 0, 1, i, 1});
  }
  return {ids, edges};
}

// ---- user matching --------------------------------------------------------

struct MatchCount {
  std::size_t rows = 0, matched_names = 0;
};

// Nested-loop join over distinct (id, name) pairs with an outer side for
// names present on one side only. Empty names never match.
inline MatchCount match_rows(const std::vector<std::pair<std::int64_t, std::string>>& users,
                             const std::vector<std::pair<std::int64_t, std::string>>& vendors) {
  std::set<std::pair<std::int64_t, std::string>> us(users.begin(), users.end()), vs(vendors.begin(), vendors.end());
  MatchCount c;
  std::set<std::string> names;
  for (const auto& u : us) {
    if (u.second.empty()) continue;
    bool any = false;
    for (const auto& v : vs)
      if (v.second == u.second) {
        ++c.rows;
        any = true;
        names.insert(u.second);
      }
    if (!any) ++c.rows;
  }
  for (const auto& v : vs) {
    if (v.second.empty()) continue;
    bool any = false;
    for (const auto& u : us) any = any || u.second == v.second;
    if (!any) ++c.rows;
  }
  c.matched_names = names.size();
  return c;
}

}  // namespace oracle
