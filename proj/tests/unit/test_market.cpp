#include <doctest.h>

#include "dnmetl/market_extract.hpp"
#include "dnmetl/market_resolve.hpp"

using namespace dnm;

namespace {
const Date kPre = make_date(2014, 3, 1);
const Date kPost = make_date(2014, 6, 1);
}  // namespace

TEST_CASE("pre-switch ranks: sales caps double from 4") {
  CHECK(check_rank("Freshman", 0, {}, {}, kPre) == RankVerdict::Consistent);
  CHECK(check_rank("Freshman", 4, {}, {}, kPre) == RankVerdict::Consistent);
  CHECK(check_rank("Freshman", 5, {}, {}, kPre) == RankVerdict::Inconsistent);
  CHECK(check_rank("Sophomore", 5, {}, {}, kPre) == RankVerdict::Consistent);
  CHECK(check_rank("Sophomore", 8, {}, {}, kPre) == RankVerdict::Consistent);
  CHECK(check_rank("Sophomore", 4, {}, {}, kPre) == RankVerdict::Inconsistent);
  CHECK(check_rank("Grandmaster", 1024, {}, {}, kPre) == RankVerdict::Consistent);
  CHECK(check_rank("Grandmaster", 1025, {}, {}, kPre) == RankVerdict::Inconsistent);
  CHECK(check_rank("Godlike", 1025, {}, {}, kPre) == RankVerdict::Consistent);
  CHECK(check_rank("Godlike", 1024, {}, {}, kPre) == RankVerdict::Inconsistent);
  CHECK(check_rank("Level 2", 30, 5.0, 0.95, kPre) == RankVerdict::Inconsistent);
}

TEST_CASE("post-switch ranks and the sales allowance") {
  CHECK(check_rank("Level 1", 0, {}, {}, kPost) == RankVerdict::Consistent);
  CHECK(check_rank("Level 1", 24, {}, {}, kPost) == RankVerdict::Consistent);
  CHECK(check_rank("Level 1", 25, {}, {}, kPost) == RankVerdict::SalesExceedRange);
  CHECK(check_rank("Level 2", 25, 1.0, 0.9, kPost) == RankVerdict::Consistent);
  CHECK(check_rank("Level 2", 99, 1.0, 0.9, kPost) == RankVerdict::Consistent);
  CHECK(check_rank("Level 2", 24, 1.0, 0.9, kPost) == RankVerdict::Inconsistent);
  CHECK(check_rank("Level 2", 50, 2.0, 0.95, kPost) == RankVerdict::Consistent);
  CHECK(check_rank("Level 2", 150, 2.0, 0.95, kPost) == RankVerdict::SalesExceedRange);
  CHECK(check_rank("Level 2", 50, 0.5, 0.95, kPost) == RankVerdict::Inconsistent);
  CHECK(check_rank("Level 2", 50, 2.0, 0.85, kPost) == RankVerdict::Inconsistent);
  CHECK(check_rank("Level 5", 100000, 100.0, 0.9, kPost) == RankVerdict::Consistent);
  CHECK(check_rank("Freshman", 3, {}, {}, kPost) == RankVerdict::Inconsistent);
  CHECK(check_rank("Level 9", 3, {}, {}, kPost) == RankVerdict::Inconsistent);
  CHECK(check_rank("Level 3", {}, 20.0, 0.99, kPost) == RankVerdict::Unknown);
}

TEST_CASE("the switch happens on May 5th 2014") {
  CHECK(check_rank("Level 1", 3, {}, {}, make_date(2014, 5, 4)) == RankVerdict::Inconsistent);
  CHECK(check_rank("Level 1", 3, {}, {}, make_date(2014, 5, 5)) == RankVerdict::Consistent);
}

TEST_CASE("substring titles collapse to the longest containing title") {
  auto m = collapse_titles({"Blue", "Blue Dream 5g", "Blue Dream", "Other"});
  CHECK(m["Blue"] == "Blue Dream 5g");
  CHECK(m["Blue Dream"] == "Blue Dream 5g");
  CHECK(m["Blue Dream 5g"] == "Blue Dream 5g");
  CHECK(m["Other"] == "Other");
  // ties between equally long supersets go to the smaller string
  auto t = collapse_titles({"ab", "abX", "Yab"});
  CHECK(t["ab"] == "Yab");
  // idempotent
  for (const auto& [k, v] : m) CHECK(collapse_titles({k, v})[k] == v);
}

TEST_CASE("category parents maximise depth") {
  std::vector<CategoryObservation> obs{{1, {}}, {2, 1}, {3, 1}, {3, 2}, {3, {}}, {4, 3}};
  auto p = deepest_parents(obs);
  CHECK(p[1] == std::nullopt);
  CHECK(p[2] == 1);
  CHECK(p[3] == 2);
  CHECK(p[4] == 3);
  CHECK_THROWS(deepest_parents({{1, 2}, {2, 1}}));
  CHECK(prune_ancestors({1, 3, 2}, p) == std::vector<std::int64_t>{3});
  CHECK(prune_ancestors({1, 5}, p).size() == 2);
}

TEST_CASE("market field parsing") {
  CHECK(percent_to_fraction("98.50%") == "0.9850");
  CHECK(percent_to_fraction("100%") == "1.0000");
  CHECK_FALSE(percent_to_fraction("n/a"));
  CHECK(parse_price("BTC 0.0120") == "0.0120");
  CHECK_FALSE(parse_price("BTC -1"));
}
