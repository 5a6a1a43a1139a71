#pragma once

// Scrape indexing and per-file classification.
//
// Expected layout: <root>/<side>/<YYYY-MM-DD>/<files...> with side one of
// "forum" or "market". Folder dates are scrape completion dates.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnmetl/civil_time.hpp"

namespace dnm {

enum class Side { Forum, Market };

enum class PageClass {
  ForumIndex,
  ViewForum,
  ViewTopic,
  Profile,
  MarketListingGeneric,
  MarketListingFeedback,
  MarketListingReturnPolicy,
  MarketStore,
  MarketCategory,
  VendorProfileGeneric,
  VendorProfileFeedback,
  VendorProfileLegacySales,
  VendorProfilePgp,
  VendorProfileReturnPolicy,
  Irrelevant,
};

enum class Quirk { None, Empty, ErrorPage, Partial, LoggedOut, Obscured };

std::string_view to_string(Side s);
std::string_view to_string(PageClass c);
std::string_view to_string(Quirk q);
std::optional<Side> side_from_string(std::string_view s);
std::optional<PageClass> page_class_from_string(std::string_view s);
std::optional<Quirk> quirk_from_string(std::string_view s);

bool is_forum_class(PageClass c);
bool is_market_class(PageClass c);

struct ScrapeEntry {
  int scrape_id = 0;
  Side side = Side::Forum;
  Date date{};
  std::filesystem::path path;  // relative to the root
};

struct IngestWarning {
  std::filesystem::path path;
  std::string message;
};

struct ScrapeIndex {
  std::vector<ScrapeEntry> entries;  // sorted by (side, date)
  std::vector<IngestWarning> warnings;

  std::vector<ScrapeEntry> of_side(Side s) const;
  std::optional<Date> date_of(Side s, int scrape_id) const;
};

/// Content markers used to detect capture problems. Matching is exact
/// substring search.
struct QuirkMarkers {
  std::vector<std::string> error{"Bad request. The link you followed is incorrect or outdated.",
                                 "An error was encountered", "502 Bad Gateway",
                                 "503 Service Unavailable", "Something went wrong"};
  std::vector<std::string> logged_out{"You must be logged in to view this page",
                                      "<form action=\"/login\""};
  std::vector<std::string> obscured{"Evolution Market Update", "Welcome to Evolution!"};
  // A page that lacks its end-of-content landmark was cut off mid-capture.
  std::string forum_content_end{"id=\"brdfooter\""};
  std::string market_content_end{"<footer"};
};

struct ClassifiedFile {
  int scrape_id = 0;
  Side side = Side::Forum;
  std::string path;  // relative to the root, '/'-separated
  PageClass page_class = PageClass::Irrelevant;
  Quirk quirk = Quirk::None;
  DateTime retrieval_time{};

  bool contributes() const { return quirk == Quirk::None && page_class != PageClass::Irrelevant; }
};

ScrapeIndex index_scrapes(const std::filesystem::path& root);

/// Page class from the file name (relative path inside a scrape folder).
/// Trailing ".N" duplicate suffixes left by re-fetches are ignored.
PageClass classify_name(Side side, std::string_view relative_name);

/// Pure classification; same inputs give the same result.
ClassifiedFile classify_file(Side side, std::string_view relative_name, std::string_view contents,
                             DateTime mtime, const QuirkMarkers& markers = {});

/// Every regular file under each indexed scrape, classified, sorted by path.
std::vector<ClassifiedFile> classify_scrapes(const std::filesystem::path& root, const ScrapeIndex& index,
                                             const QuirkMarkers& markers = {});

DateTime file_mtime(const std::filesystem::path& p);
void set_file_mtime(const std::filesystem::path& p, DateTime t);

// ingest-manifest.tsv and scrapes-index.tsv
inline const std::vector<std::string> kIngestManifestHeader{"scrape_id", "side", "path", "page_class",
                                                            "quirk", "retrieval_time"};
inline const std::vector<std::string> kScrapeIndexHeader{"scrape_id", "side", "date", "path"};

void write_ingest_manifest(const std::filesystem::path& file, const std::vector<ClassifiedFile>& files);
std::vector<ClassifiedFile> read_ingest_manifest(const std::filesystem::path& file);
void write_scrape_index(const std::filesystem::path& file, const ScrapeIndex& index);
ScrapeIndex read_scrape_index(const std::filesystem::path& file);

}  // namespace dnm
