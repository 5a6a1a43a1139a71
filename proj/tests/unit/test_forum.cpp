#include <doctest.h>

#include "dnmetl/forum_extract.hpp"
#include "dnmetl/forum_resolve.hpp"

using namespace dnm;

TEST_CASE("member title precedence") {
  const auto& o = title_order();
  REQUIRE(o.size() == 13);
  CHECK(o.front() == "Administrator");
  CHECK(o.back() == "Sports Fan");
  for (std::size_t i = 0; i + 1 < o.size(); ++i) CHECK(better_title(o[i], o[i + 1]) == o[i]);
  CHECK(better_title("Member", "Banned") == "Banned");
  CHECK(better_title("Vendor", "Something else") == "Vendor");
  CHECK(title_rank("unknown") == 13);
}

TEST_CASE("relative date labels") {
  const DateTime r = *parse_datetime("2014-03-10 00:20:00");
  CHECK(resolve_date_label("Today", r) == make_date(2014, 3, 10));
  CHECK(resolve_date_label("Yesterday", r) == make_date(2014, 3, 9));
  CHECK(resolve_date_label("Tomorrow", r) == make_date(2014, 3, 11));
  CHECK(resolve_date_label("2014-01-02", r) == make_date(2014, 1, 2));
  CHECK_FALSE(resolve_date_label("Someday", r));
  // retrieved exactly a week after the scrape: the folder date is used
  const DateTime late = *parse_datetime("2014-03-17 09:00:00");
  CHECK(resolve_date_label("Today", late, make_date(2014, 3, 10)) == make_date(2014, 3, 10));
  CHECK(resolve_date_label("Today", late, make_date(2014, 3, 11)) == make_date(2014, 3, 17));
  // the earliest sibling observation wins
  std::vector<Date> sib{make_date(2014, 3, 9)};
  CHECK(normalize_relative_date("Tomorrow", r, std::nullopt, sib) == make_date(2014, 3, 9));
}

TEST_CASE("date labels split into date and time") {
  CHECK(split_date_label("Today 13:04:05") == DateLabel{"Today", "13:04:05"});
  CHECK(split_date_label("2014-02-01 00:00:01") == DateLabel{"2014-02-01", "00:00:01"});
  CHECK(split_date_label("2014-02-01") == DateLabel{"2014-02-01", ""});
}

TEST_CASE("topic ordering and gap report") {
  std::vector<SeqKey> posts{{50, 2, 27}, {10, 1, 1}, {12, 1, 2}, {20, 1, 5}, {60, 2, 28}};
  auto gaps = order_topic(7, posts);
  REQUIRE(posts.size() == 5);
  CHECK(posts[0].pid == 10);
  CHECK(posts[2].pid == 20);
  CHECK(posts[3].pid == 50);
  REQUIRE(gaps.size() == 2);
  CHECK(gaps[0] == GapRow{7, 20, 2});
  CHECK(gaps[1] == GapRow{7, 50, 21});
  // contiguous topics have no gaps
  std::vector<SeqKey> full{{1, 1, 1}, {2, 1, 2}, {3, 1, 3}};
  CHECK(order_topic(1, full).empty());
}
