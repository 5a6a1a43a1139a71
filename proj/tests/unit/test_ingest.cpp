#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dnmetl/ingest.hpp"

using namespace dnm;
namespace fs = std::filesystem;

TEST_CASE("file names map to page classes, ignoring re-fetch suffixes") {
  CHECK(classify_name(Side::Forum, "index.php") == PageClass::ForumIndex);
  CHECK(classify_name(Side::Forum, "viewforum.php?id=3&p=2") == PageClass::ViewForum);
  CHECK(classify_name(Side::Forum, "viewtopic.php?id=3&p=2.1") == PageClass::ViewTopic);
  CHECK(classify_name(Side::Forum, "viewtopic.php?pid=77") == PageClass::ViewTopic);
  CHECK(classify_name(Side::Forum, "profile.php?id=12") == PageClass::Profile);
  CHECK(classify_name(Side::Forum, "extern.php?action=feed&type=rss") == PageClass::Irrelevant);
  CHECK(classify_name(Side::Forum, "style/Air.css") == PageClass::Irrelevant);
  CHECK(classify_name(Side::Market, "listing/123") == PageClass::MarketListingGeneric);
  CHECK(classify_name(Side::Market, "listing/123-feedback.html") == PageClass::MarketListingFeedback);
  CHECK(classify_name(Side::Market, "listing/123-return-policy") == PageClass::MarketListingReturnPolicy);
  CHECK(classify_name(Side::Market, "store/9-p2") == PageClass::MarketStore);
  CHECK(classify_name(Side::Market, "category/4") == PageClass::MarketCategory);
  CHECK(classify_name(Side::Market, "vendor/5-pgp") == PageClass::VendorProfilePgp);
  CHECK(classify_name(Side::Market, "vendor/5-legacy-sales.2") == PageClass::VendorProfileLegacySales);
  CHECK(classify_name(Side::Market, "index.html") == PageClass::Irrelevant);
}

TEST_CASE("quirk detection") {
  const DateTime t{};
  QuirkMarkers m;
  CHECK(classify_file(Side::Forum, "index.php", "  \n", t, m).quirk == Quirk::Empty);
  CHECK(classify_file(Side::Forum, "index.php", "<h1>502 Bad Gateway</h1>", t, m).quirk == Quirk::ErrorPage);
  CHECK(classify_file(Side::Forum, "index.php", "<div id=\"brdmain\">half", t, m).quirk == Quirk::Partial);
  CHECK(classify_file(Side::Forum, "index.php", "<div id=\"brdfooter\"></div>", t, m).quirk == Quirk::None);
  CHECK(classify_file(Side::Market, "listing/1", "You must be logged in to view this page<footer>", t, m).quirk ==
        Quirk::LoggedOut);
  CHECK(classify_file(Side::Market, "listing/1", "Welcome to Evolution!<footer>", t, m).quirk == Quirk::Obscured);
  auto ok = classify_file(Side::Market, "listing/1", "<main></main><footer>", t, m);
  CHECK(ok.quirk == Quirk::None);
  CHECK(ok.contributes());
  CHECK_FALSE(classify_file(Side::Market, "index.html", "<footer>", t, m).contributes());
}

TEST_CASE("classification is pure") {
  const std::string page = "<div>x</div><footer>";
  auto a = classify_file(Side::Market, "vendor/2", page, DateTime{std::chrono::seconds{5}});
  auto b = classify_file(Side::Market, "vendor/2", page, DateTime{std::chrono::seconds{5}});
  CHECK(a.page_class == b.page_class);
  CHECK(a.quirk == b.quirk);
  CHECK(a.retrieval_time == b.retrieval_time);
}

TEST_CASE("scrape folders get ids per side in date order; manifest round trips") {
  const fs::path root = fs::temp_directory_path() / "dnmetl_ingest_test";
  fs::remove_all(root);
  for (auto d : {"forum/2014-03-01", "forum/2014-01-20", "market/2014-02-02", "forum/not-a-date"})
    fs::create_directories(root / d);
  std::ofstream(root / "forum/2014-01-20/index.php") << "<div id=\"brdfooter\">";
  std::ofstream(root / "forum/2014-03-01/viewtopic.php?id=3&p=2.1") << "";
  std::ofstream(root / "market/2014-02-02/listing/7") << "x";
  fs::create_directories(root / "market/2014-02-02/listing");
  std::ofstream(root / "market/2014-02-02/listing/7") << "<footer>";

  auto index = index_scrapes(root);
  auto forum = index.of_side(Side::Forum);
  REQUIRE(forum.size() == 2);
  CHECK(forum[0].scrape_id == 1);
  CHECK(format_date(forum[0].date) == "2014-01-20");
  CHECK(forum[1].scrape_id == 2);
  CHECK(index.of_side(Side::Market).size() == 1);
  CHECK_FALSE(index.warnings.empty());

  auto files = classify_scrapes(root, index);
  REQUIRE(files.size() == 3);
  CHECK(std::is_sorted(files.begin(), files.end(), [](auto& a, auto& b) { return a.path < b.path; }));
  write_ingest_manifest(root / "m.tsv", files);
  auto back = read_ingest_manifest(root / "m.tsv");
  REQUIRE(back.size() == files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    CHECK(back[i].path == files[i].path);
    CHECK(back[i].quirk == files[i].quirk);
    CHECK(back[i].page_class == files[i].page_class);
    CHECK(back[i].retrieval_time == files[i].retrieval_time);
  }
  fs::remove_all(root);
}
