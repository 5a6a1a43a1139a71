#include <doctest.h>

#include "dnmetl/civil_time.hpp"
#include "dnmetl/text.hpp"
#include "dnmetl/tsv.hpp"

using namespace dnm;

TEST_CASE("parse_int accepts thousands separators only") {
  CHECK(parse_int("50,271") == 50271);
  CHECK(parse_int(" 42 ") == 42);
  CHECK(parse_int("-7") == -7);
  CHECK_FALSE(parse_int("4.2"));
  CHECK_FALSE(parse_int(""));
  CHECK_FALSE(parse_int("12abc"));
}

TEST_CASE("entities decode to UTF-8 and unknown ones survive") {
  CHECK(decode_entities("a &amp; b") == "a & b");
  CHECK(decode_entities("&#160;") == "\xC2\xA0");
  CHECK(decode_entities("&#xA0;") == "\xC2\xA0");
  CHECK(decode_entities("&bogus;") == "&bogus;");
  CHECK(decode_entities(encode_entities("<a href=\"x\">&</a>")) == "<a href=\"x\">&</a>");
}

TEST_CASE("inner_text strips tags and collapses whitespace") {
  CHECK(inner_text("<p>Hello <b>big</b>\n\n world</p>") == "Hello big world");
}

TEST_CASE("civil dates round trip and reject nonsense") {
  auto d = parse_date("2014-02-29");
  CHECK_FALSE(d);
  d = parse_date("2016-02-29");
  REQUIRE(d);
  CHECK(format_date(*d) == "2016-02-29");
  CHECK_FALSE(parse_date("2014-1-5"));
  CHECK_FALSE(parse_time("24:00:00"));
  auto t = parse_datetime("2014-05-05 23:59:59");
  REQUIRE(t);
  CHECK(format_datetime(*t) == "2014-05-05 23:59:59");
  CHECK(format_datetime(end_of_month(2014, 2)) == "2014-02-28 23:59:59");
  CHECK(format_datetime(end_of_month(2014, 12)) == "2014-12-31 23:59:59");
  CHECK(network_seconds(*parse_datetime("2014-01-01 00:00:00")) == 0);
  CHECK(network_seconds(*parse_datetime("2014-01-02 00:00:01")) == 86401);
}

TEST_CASE("tsv escaping round trips every byte that would break a line") {
  const std::string raw = "a\tb\\c\nd\re";
  CHECK(escape_field(raw).find('\t') == std::string::npos);
  CHECK(escape_field(raw).find('\n') == std::string::npos);
  CHECK(unescape_field(escape_field(raw)) == raw);
  CHECK(unescape_field(escape_field("\\t")) == "\\t");
}

TEST_CASE("TsvWriter publishes only on commit") {
  auto dir = std::filesystem::temp_directory_path() / "dnmetl_tsv_test";
  std::filesystem::remove_all(dir);
  {
    TsvWriter w(dir / "sub" / "t.tsv", {"a", "b"});
    w.write_row({"1", "x\ty"});
  }
  CHECK_FALSE(std::filesystem::exists(dir / "sub" / "t.tsv"));
  {
    TsvWriter w(dir / "sub" / "t.tsv", {"a", "b"});
    w.write_row({"1", "x\ty"});
    w.commit();
  }
  Table t = read_table(dir / "sub" / "t.tsv");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][1] == "x\ty");
  CHECK(read_file(dir / "sub" / "t.tsv") == "a\tb\n1\tx\\ty\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("field conventions") {
  CHECK(field::of(true) == "True");
  CHECK(field::of(false) == "False");
  CHECK(field::of(std::optional<std::int64_t>{}) == "");
  CHECK(field::opt_bool("True") == true);
  CHECK_FALSE(field::opt_bool(""));
}
