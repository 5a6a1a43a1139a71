#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <random>

#include "dnmetl/network.hpp"
#include "oracles.hpp"

using namespace dnm;
using namespace std::chrono_literals;

namespace {

double mp_weight(std::int64_t td, const NetParams& p) {
  using boost::multiprecision::cpp_dec_float_50;
  const cpp_dec_float_50 lim = p.t_lim.count(), lo = p.omega_lower;
  if (td >= p.t_lim.count()) return p.omega_lower;
  cpp_dec_float_50 x = 3 * (lim - td) / lim;
  cpp_dec_float_50 w = lo + (1 - lo) * (exp(x) - 1) / (exp(cpp_dec_float_50(3)) - 1);
  return w.convert_to<double>();
}

std::vector<TemporalEdge> sorted(std::vector<TemporalEdge> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("edge weight endpoints and midpoint") {
  NetParams p;
  CHECK(edge_weight(0s, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(edge_weight(p.t_lim, p) == 0.2);
  const auto half = Seconds{p.t_lim.count() / 2};
  CHECK(std::abs(edge_weight(half, p) - mp_weight(half.count(), p)) < 1e-12);
  // frozen 40-digit value of the decay at 3.5 days with the default parameters
  CHECK(std::abs(edge_weight(half, p) - 0.345940419045085072) < 1e-12);
  CHECK(std::abs(edge_weight(std::chrono::hours{24}, p) - 0.706540771344597321) < 1e-12);
  CHECK(edge_weight(std::chrono::days{10}, p) == 0.2);
  CHECK_THROWS(edge_weight(-1s, p));
}

TEST_CASE("omega_lower floors the weight") {
  NetParams p;
  p.omega_lower = 0.5;
  CHECK(edge_weight(std::chrono::days{8}, p) == 0.5);
  CHECK(std::abs(edge_weight(std::chrono::seconds{302400}, p) - 0.591212761903178170) < 1e-12);
}

TEST_CASE("edge weight is nonincreasing and stays in [omega_lower, 1]") {
  NetParams p;
  double prev = 2;
  for (int i = 0; i <= 1000; ++i) {
    const double w = edge_weight(Seconds{p.delta_t.count() * i / 1000}, p);
    CHECK(w <= prev);
    CHECK(w >= p.omega_lower);
    CHECK(w <= 1.0);
    prev = w;
  }
}

TEST_CASE("parameter validation lists every violation") {
  NetParams p;
  p.omega_lower = 1.5;
  p.omega_first = 0;
  p.t_lim = std::chrono::days{60};
  p.delta_phi = 0;
  CHECK(p.validate().size() == 4);
  CHECK(NetParams{}.validate().empty());
}

TEST_CASE("durations") {
  CHECK(parse_duration("7d") == Seconds{604800});
  CHECK(parse_duration("1mo") == Seconds{2629746});
  CHECK(parse_duration("90min") == Seconds{5400});
  CHECK(parse_duration("3600") == Seconds{3600});
  CHECK_FALSE(parse_duration("7 days"));
  CHECK_FALSE(parse_duration("-1d"));
  CHECK(format_duration(Seconds{604800}) == "7d");
  CHECK(parse_duration(format_duration(Seconds{2629746})) == Seconds{2629746});
}

TEST_CASE("three-poster topic") {
  NetParams p;
  std::vector<NetPost> posts{{1, 'A', 0}, {2, 'B', 3600}, {3, 'C', 7200}};
  auto e = sorted(build_topic_edges(9, posts, p));
  // B->A regular + to_first, C->B regular, C->A regular + to_first
  REQUIRE(e.size() == 5);
  int to_first = 0;
  for (const auto& x : e) to_first += x.to_first;
  CHECK(to_first == 2);
  CHECK(sorted(oracle::topic_edges(9, {{1, 'A', 0}, {2, 'B', 3600}, {3, 'C', 7200}}, p)).size() == 5);
}

TEST_CASE("single poster and sequence boundary") {
  NetParams p;
  std::vector<NetPost> solo{{1, 1, 0}, {2, 1, 10}, {3, 1, 20}};
  CHECK(build_topic_edges(1, solo, p).empty());

  std::vector<NetPost> far;
  far.push_back({1, 1, 0});
  for (int i = 2; i <= 12; ++i) far.push_back({i, 2, i * 10});
  // posts 1 and 12 are 11 apart; only user 2's first post replies to user 1
  auto e = build_topic_edges(1, far, p);
  int regular = 0;
  for (const auto& x : e) regular += !x.to_first;
  CHECK(regular == 1);
}

TEST_CASE("edges equal the exhaustive four-condition oracle") {
  std::mt19937_64 rng(20240601);
  NetParams p;
  for (int t = 0; t < 60; ++t) {
    auto topic = oracle::random_topic(rng, 120);
    std::vector<NetPost> posts;
    for (const auto& x : topic) posts.push_back({x.seq, x.node, x.timestamp});
    auto got = sorted(build_topic_edges(t, posts, p));
    auto want = sorted(oracle::topic_edges(t, topic, p));
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].key() == want[i].key());
      CHECK(std::abs(got[i].weight - want[i].weight) < 1e-12);
    }
  }
}

TEST_CASE("edge invariants on random topics") {
  std::mt19937_64 rng(7);
  NetParams p;
  p.delta_phi = 4;
  p.delta_t = std::chrono::days{10};
  for (int t = 0; t < 40; ++t) {
    auto topic = oracle::random_topic(rng, 80);
    std::vector<NetPost> posts;
    for (const auto& x : topic) posts.push_back({x.seq, x.node, x.timestamp});
    std::size_t clamped = 0;
    auto edges = build_topic_edges(t, posts, p, &clamped);
    for (const auto& e : edges) {
      CHECK(e.source != e.target);
      CHECK(e.time_diff >= 0);
      CHECK(e.seq_diff >= 1);
      if (e.to_first) {
        CHECK(e.weight == p.omega_first);
      } else {
        CHECK(e.seq_diff <= p.delta_phi);
        CHECK(e.time_diff <= p.delta_t.count());
        CHECK(e.weight >= p.omega_lower);
        CHECK(e.weight <= 1.0);
      }
    }
    // "first post after": per (responder, earlier post) at most one edge.
    // Responder seqs are recovered from (node, timestamp) where unambiguous.
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::int64_t>> seq_of;
    for (const auto& x : posts) seq_of[{x.node, x.timestamp}].push_back(x.seq);
    std::map<std::pair<std::int64_t, std::int64_t>, int> count;
    for (const auto& e : edges) {
      const auto& s = seq_of[{e.source, e.timestamp}];
      if (!e.to_first && s.size() == 1) ++count[{e.source, s[0] - e.seq_diff}];
    }
    for (const auto& [k, c] : count) CHECK(c == 1);
  }
}

TEST_CASE("month ranges and file names") {
  auto m = month_range(2014, 1, 2015, 3);
  CHECK(m.size() == 15);
  CHECK(m.front() == std::pair<int, unsigned>{2014, 1});
  CHECK(m.back() == std::pair<int, unsigned>{2015, 3});
  CHECK(month_range(2014, 5, 2014, 5).size() == 1);
  CHECK(edge_file_name(2014, 2) == "network/edges-2014-2.tsv");
}
