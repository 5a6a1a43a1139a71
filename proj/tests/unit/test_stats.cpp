#include <doctest.h>

#include <random>

#include "dnmetl/net_stats.hpp"
#include "oracles.hpp"

using namespace dnm;

TEST_CASE("components, clustering and diameters match brute force") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 20; ++round) {
    auto [ids, edges] = oracle::random_graph(rng, 120);
    const StaticGraph g = StaticGraph::build(ids, edges);
    REQUIRE(g.ids == ids);
    const oracle::Graph o = oracle::graph_of(ids, edges);

    CHECK(oracle::canonical(weak_components(g)) == oracle::wcc(o));
    CHECK(oracle::canonical(strong_components(g)) == oracle::scc(o));
    const auto c = local_clustering(g), want = oracle::clustering(o);
    for (std::size_t v = 0; v < c.size(); ++v) CHECK(std::abs(c[v] - want[v]) < 1e-12);

    const auto s = compute_stats(ids, edges, true);
    const auto wl = oracle::wcc(o);
    int count = 0;
    for (int l : wl) count = std::max(count, l + 1);
    CHECK(s.wcc_count == count);
    if (count == 0) continue;
    std::vector<int> size(count, 0);
    for (int l : wl)
      if (l >= 0) ++size[l];
    const int big = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
    std::vector<int> members;
    for (int v = 0; v < o.n; ++v)
      if (wl[v] == big) members.push_back(v);
    CHECK(s.largest_wcc_nodes == size[big]);
    CHECK(s.diameter_undirected == oracle::diameter(o, members, false));
    CHECK(s.diameter_directed == oracle::diameter(o, members, true));
  }
}

TEST_CASE("small graph by hand") {
  // triangle 1-2-3 (directed cycle), tail 3->4, isolated 5
  std::vector<std::int64_t> nodes{1, 2, 3, 4, 5};
  std::vector<TemporalEdge> e{{1, 2, 1.0}, {2, 3, 0.5}, {3, 1, 0.25}, {3, 4, 1.0}, {1, 2, 0.2}};
  auto s = compute_stats(nodes, e, true);
  CHECK(s.nodes == 5);
  CHECK(s.isolated_nodes == 1);
  CHECK(s.temporal_edges == 5);
  CHECK(s.static_edges == 4);
  CHECK(s.wcc_count == 1);
  CHECK(s.scc_count == 2);
  CHECK(s.largest_scc_nodes == 3);
  CHECK(s.largest_scc_edges == 3);
  // clustering: 1,2 -> 1; 3 -> 1/3; 4 -> 0
  CHECK(std::abs(s.avg_clustering - (1 + 1 + 1.0 / 3) / 4) < 1e-12);
  CHECK(s.diameter_undirected == 2);
  CHECK(s.diameter_directed == 3);
  // weighted lengths are 1/weight over the strongest parallel edge; 2->3->1
  CHECK(s.diameter_directed_weighted == doctest::Approx(2 + 4));
  CHECK(std::abs(s.density - 4.0 / 12) < 1e-12);
}

TEST_CASE("empty graph") {
  std::vector<std::int64_t> nodes{1, 2};
  auto s = compute_stats(nodes, {}, true);
  CHECK(s.nodes == 2);
  CHECK(s.isolated_nodes == 2);
  CHECK(s.wcc_count == 0);
}

TEST_CASE("degree histogram counts every node") {
  std::vector<std::int64_t> nodes{1, 2, 3};
  std::vector<TemporalEdge> e{{1, 2, 1.0}, {1, 3, 1.0}};
  auto h = degree_distribution(nodes, e);
  CHECK(h.out == std::map<std::int64_t, std::int64_t>{{0, 2}, {2, 1}});
  CHECK(h.in == std::map<std::int64_t, std::int64_t>{{0, 1}, {1, 2}});
  CHECK(h.total == std::map<std::int64_t, std::int64_t>{{1, 2}, {2, 1}});
}
