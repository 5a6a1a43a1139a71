#include <doctest.h>

#include <random>

#include "dnmetl/quality.hpp"
#include "dnmetl/user_match.hpp"
#include "oracles.hpp"

using namespace dnm;

TEST_CASE("hidden-data estimates on the reference rows") {
  auto fid = estimate_hidden("fid", 40, 30, 0);
  CHECK(fid.hidden == 10);
  CHECK(fid.hidden_pct() == "25.0");
  auto tid = estimate_hidden("tid", 56826, 50271, 610);
  CHECK(tid.hidden == 5945);
  CHECK(tid.hidden_pct() == "10.5");
  auto pid = estimate_hidden("pid", 560023, 514256, std::nullopt);
  CHECK(pid.hidden == 45767);
  CHECK(pid.hidden_pct() == "8.2");
  auto uid = estimate_hidden("uid", 39849, 28951, 10715);
  CHECK(uid.hidden == 183);
  CHECK(uid.hidden_pct() == "0.5");
}

TEST_CASE("percentages round half up") {
  CHECK(percent_of(1, 8) == "12.50");
  CHECK(percent_of(1, 3) == "33.33");
  CHECK(percent_of(2, 3) == "66.67");
  CHECK(percent_of(0, 0) == "0.00");
}

TEST_CASE("match ids are dense and cross products share one id") {
  auto rows = match_users({{1, "alice"}, {7, "alice"}, {2, "bob"}, {3, ""}}, {{10, "alice"}, {11, "carol"}});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == MatchRow{1, "alice", 1, 10});
  CHECK(rows[1] == MatchRow{1, "alice", 7, 10});
  CHECK(rows[2] == MatchRow{std::nullopt, "bob", 2, std::nullopt});
  CHECK(rows[3] == MatchRow{std::nullopt, "carol", std::nullopt, 11});
}

TEST_CASE("match row count equals a nested-loop join") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 50; ++round) {
    std::uniform_int_distribution<int> name(0, 40), id(1, 60);
    std::vector<std::pair<std::int64_t, std::string>> users, vendors;
    for (int i = 0; i < 60; ++i) users.emplace_back(id(rng), "n" + std::to_string(name(rng)));
    for (int i = 0; i < 20; ++i) vendors.emplace_back(id(rng), "n" + std::to_string(name(rng)));
    auto rows = match_users(users, vendors);
    auto want = oracle::match_rows(users, vendors);
    CHECK(rows.size() == want.rows);
    std::set<std::int64_t> ids;
    for (const auto& r : rows)
      if (r.match_id) ids.insert(*r.match_id);
    CHECK(ids.size() == want.matched_names);
    if (!ids.empty()) CHECK(*ids.rbegin() == static_cast<std::int64_t>(ids.size()));
  }
}
