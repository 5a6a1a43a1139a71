#include "dnmetl/ingest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <utility>

#include "dnmetl/error.hpp"
#include "dnmetl/text.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

namespace {

constexpr std::array<std::pair<PageClass, std::string_view>, 15> kClassNames{{
    {PageClass::ForumIndex, "ForumIndex"},
    {PageClass::ViewForum, "ViewForum"},
    {PageClass::ViewTopic, "ViewTopic"},
    {PageClass::Profile, "Profile"},
    {PageClass::MarketListingGeneric, "MarketListingGeneric"},
    {PageClass::MarketListingFeedback, "MarketListingFeedback"},
    {PageClass::MarketListingReturnPolicy, "MarketListingReturnPolicy"},
    {PageClass::MarketStore, "MarketStore"},
    {PageClass::MarketCategory, "MarketCategory"},
    {PageClass::VendorProfileGeneric, "VendorProfileGeneric"},
    {PageClass::VendorProfileFeedback, "VendorProfileFeedback"},
    {PageClass::VendorProfileLegacySales, "VendorProfileLegacySales"},
    {PageClass::VendorProfilePgp, "VendorProfilePgp"},
    {PageClass::VendorProfileReturnPolicy, "VendorProfileReturnPolicy"},
    {PageClass::Irrelevant, "Irrelevant"},
}};

constexpr std::array<std::pair<Quirk, std::string_view>, 6> kQuirkNames{{
    {Quirk::None, "None"},
    {Quirk::Empty, "Empty"},
    {Quirk::ErrorPage, "ErrorPage"},
    {Quirk::Partial, "Partial"},
    {Quirk::LoggedOut, "LoggedOut"},
    {Quirk::Obscured, "Obscured"},
}};

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// "name.N" left behind by re-fetching the same URL.
std::string_view strip_refetch_suffix(std::string_view name) {
  auto dot = name.rfind('.');
  if (dot != std::string_view::npos && dot > 0 && all_digits(name.substr(dot + 1))) return name.substr(0, dot);
  return name;
}

bool has_query_key(std::string_view name, std::string_view key) {
  auto q = name.find('?');
  if (q == std::string_view::npos) return false;
  for (auto part : split(name.substr(q + 1), '&')) {
    auto eq = part.find('=');
    if (eq != std::string_view::npos && part.substr(0, eq) == key && all_digits(part.substr(eq + 1)))
      return true;
  }
  return false;
}

PageClass classify_forum_name(std::string_view name) {
  if (name == "index.php" || name == "index.html" || name.starts_with("index.php?")) return PageClass::ForumIndex;
  if (name.starts_with("viewforum.php?") && has_query_key(name, "id")) return PageClass::ViewForum;
  if (name.starts_with("viewtopic.php?") && (has_query_key(name, "id") || has_query_key(name, "pid")))
    return PageClass::ViewTopic;
  if (name.starts_with("profile.php?") && has_query_key(name, "id")) return PageClass::Profile;
  return PageClass::Irrelevant;
}

// "<dir>/<digits><suffix>.html" -> suffix, when the name has that shape.
std::optional<std::string_view> market_suffix(std::string_view name, std::string_view dir) {
  if (!name.starts_with(dir)) return std::nullopt;
  name.remove_prefix(dir.size());
  if (name.ends_with(".html")) name.remove_suffix(5);
  std::size_t d = 0;
  while (d < name.size() && name[d] >= '0' && name[d] <= '9') ++d;
  if (d == 0) return std::nullopt;
  return name.substr(d);
}

bool is_page_suffix(std::string_view suffix) {
  return suffix.empty() || (suffix.starts_with("-p") && all_digits(suffix.substr(2)));
}

PageClass classify_market_name(std::string_view name) {
  if (auto s = market_suffix(name, "listing/")) {
    if (s->empty()) return PageClass::MarketListingGeneric;
    if (*s == "-feedback") return PageClass::MarketListingFeedback;
    if (*s == "-return-policy") return PageClass::MarketListingReturnPolicy;
    return PageClass::Irrelevant;
  }
  if (auto s = market_suffix(name, "store/")) return is_page_suffix(*s) ? PageClass::MarketStore : PageClass::Irrelevant;
  if (auto s = market_suffix(name, "category/"))
    return is_page_suffix(*s) ? PageClass::MarketCategory : PageClass::Irrelevant;
  if (auto s = market_suffix(name, "vendor/")) {
    if (s->empty()) return PageClass::VendorProfileGeneric;
    if (*s == "-feedback") return PageClass::VendorProfileFeedback;
    if (*s == "-legacy-sales") return PageClass::VendorProfileLegacySales;
    if (*s == "-pgp") return PageClass::VendorProfilePgp;
    if (*s == "-return-policy") return PageClass::VendorProfileReturnPolicy;
  }
  return PageClass::Irrelevant;
}

bool any_marker(std::string_view contents, const std::vector<std::string>& markers) {
  return std::any_of(markers.begin(), markers.end(),
                     [&](const std::string& m) { return !m.empty() && contains(contents, m); });
}

}  // namespace

std::string_view to_string(Side s) { return s == Side::Forum ? "forum" : "market"; }

std::string_view to_string(PageClass c) {
  for (const auto& [k, n] : kClassNames)
    if (k == c) return n;
  return "Irrelevant";
}

std::string_view to_string(Quirk q) {
  for (const auto& [k, n] : kQuirkNames)
    if (k == q) return n;
  return "None";
}

std::optional<Side> side_from_string(std::string_view s) {
  if (s == "forum") return Side::Forum;
  if (s == "market") return Side::Market;
  return std::nullopt;
}

std::optional<PageClass> page_class_from_string(std::string_view s) {
  for (const auto& [k, n] : kClassNames)
    if (n == s) return k;
  return std::nullopt;
}

std::optional<Quirk> quirk_from_string(std::string_view s) {
  for (const auto& [k, n] : kQuirkNames)
    if (n == s) return k;
  return std::nullopt;
}

bool is_forum_class(PageClass c) {
  return c == PageClass::ForumIndex || c == PageClass::ViewForum || c == PageClass::ViewTopic ||
         c == PageClass::Profile;
}

bool is_market_class(PageClass c) { return !is_forum_class(c) && c != PageClass::Irrelevant; }

std::vector<ScrapeEntry> ScrapeIndex::of_side(Side s) const {
  std::vector<ScrapeEntry> out;
  for (const auto& e : entries)
    if (e.side == s) out.push_back(e);
  return out;
}

std::optional<Date> ScrapeIndex::date_of(Side s, int scrape_id) const {
  for (const auto& e : entries)
    if (e.side == s && e.scrape_id == scrape_id) return e.date;
  return std::nullopt;
}

ScrapeIndex index_scrapes(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw InputError(fmt::format("scrape root {} is not a directory", root.string()));
  ScrapeIndex index;
  for (Side side : {Side::Forum, Side::Market}) {
    const fs::path side_dir = root / std::string(to_string(side));
    if (!fs::is_directory(side_dir)) continue;
    std::vector<std::pair<Date, fs::path>> dated;
    for (const auto& entry : fs::directory_iterator(side_dir)) {
      if (!entry.is_directory()) continue;
      const std::string name = entry.path().filename().string();
      auto d = parse_date(name);
      if (!d) {
        index.warnings.push_back({fs::relative(entry.path(), root), "folder name is not a YYYY-MM-DD date"});
        continue;
      }
      dated.emplace_back(*d, fs::relative(entry.path(), root));
    }
    std::sort(dated.begin(), dated.end());
    int id = 0;
    for (auto& [d, p] : dated) index.entries.push_back({++id, side, d, p});
  }
  std::sort(index.warnings.begin(), index.warnings.end(),
            [](const IngestWarning& a, const IngestWarning& b) { return a.path < b.path; });
  return index;
}

PageClass classify_name(Side side, std::string_view relative_name) {
  std::string_view name = strip_refetch_suffix(relative_name);
  return side == Side::Forum ? classify_forum_name(name) : classify_market_name(name);
}

ClassifiedFile classify_file(Side side, std::string_view relative_name, std::string_view contents,
                             DateTime mtime, const QuirkMarkers& markers) {
  ClassifiedFile f;
  f.side = side;
  f.path = std::string(relative_name);
  f.page_class = classify_name(side, relative_name);
  f.retrieval_time = mtime;
  if (f.page_class == PageClass::Irrelevant) return f;
  if (trim(contents).empty()) {
    f.quirk = Quirk::Empty;
  } else if (any_marker(contents, markers.error)) {
    f.quirk = Quirk::ErrorPage;
  } else if (side == Side::Market && any_marker(contents, markers.logged_out)) {
    f.quirk = Quirk::LoggedOut;
  } else if (side == Side::Market && any_marker(contents, markers.obscured)) {
    f.quirk = Quirk::Obscured;
  } else {
    const std::string& end = side == Side::Forum ? markers.forum_content_end : markers.market_content_end;
    if (!end.empty() && !contains(contents, end)) f.quirk = Quirk::Partial;
  }
  return f;
}

DateTime file_mtime(const std::filesystem::path& p) {
  auto ft = std::filesystem::last_write_time(p);
  return std::chrono::time_point_cast<Seconds>(std::chrono::file_clock::to_sys(ft));
}

void set_file_mtime(const std::filesystem::path& p, DateTime t) {
  std::filesystem::last_write_time(
      p, std::chrono::time_point_cast<std::filesystem::file_time_type::duration>(std::chrono::file_clock::from_sys(t)));
}

std::vector<ClassifiedFile> classify_scrapes(const std::filesystem::path& root, const ScrapeIndex& index,
                                             const QuirkMarkers& markers) {
  namespace fs = std::filesystem;
  struct Job {
    int scrape_id;
    Side side;
    fs::path abs;
    std::string rel_root;   // relative to root
    std::string rel_scrape; // relative to the scrape folder
  };
  std::vector<Job> jobs;
  for (const auto& e : index.entries) {
    const fs::path dir = root / e.path;
    for (const auto& f : fs::recursive_directory_iterator(dir)) {
      if (!f.is_regular_file()) continue;
      jobs.push_back({e.scrape_id, e.side, f.path(), fs::relative(f.path(), root).generic_string(),
                      fs::relative(f.path(), dir).generic_string()});
    }
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.rel_root < b.rel_root; });

  std::vector<ClassifiedFile> out(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const Job& j = jobs[static_cast<std::size_t>(i)];
    PageClass cls = classify_name(j.side, j.rel_scrape);
    std::string contents;
    if (cls != PageClass::Irrelevant) contents = read_file(j.abs);
    ClassifiedFile f = classify_file(j.side, j.rel_scrape, contents, file_mtime(j.abs), markers);
    f.scrape_id = j.scrape_id;
    f.path = j.rel_root;
    out[static_cast<std::size_t>(i)] = std::move(f);
  }
  return out;
}

void write_ingest_manifest(const std::filesystem::path& file, const std::vector<ClassifiedFile>& files) {
  TsvWriter w(file, kIngestManifestHeader);
  for (const auto& f : files)
    w.write_row({std::to_string(f.scrape_id), std::string(to_string(f.side)), f.path,
                 std::string(to_string(f.page_class)), std::string(to_string(f.quirk)),
                 format_datetime(f.retrieval_time)});
  w.commit();
}

std::vector<ClassifiedFile> read_ingest_manifest(const std::filesystem::path& file) {
  std::vector<ClassifiedFile> out;
  for_each_row(file, [&](const std::vector<std::string>&, std::vector<std::string>& r) {
    ClassifiedFile f;
    f.scrape_id = static_cast<int>(field::req_int(r[0], "scrape_id"));
    auto side = side_from_string(r[1]);
    auto cls = page_class_from_string(r[3]);
    auto quirk = quirk_from_string(r[4]);
    auto t = parse_datetime(r[5]);
    if (!side || !cls || !quirk || !t) throw InputError(fmt::format("{}: malformed row for {}", file.string(), r[2]));
    f.side = *side;
    f.path = std::move(r[2]);
    f.page_class = *cls;
    f.quirk = *quirk;
    f.retrieval_time = *t;
    out.push_back(std::move(f));
  });
  return out;
}

void write_scrape_index(const std::filesystem::path& file, const ScrapeIndex& index) {
  TsvWriter w(file, kScrapeIndexHeader);
  for (const auto& e : index.entries)
    w.write_row({std::to_string(e.scrape_id), std::string(to_string(e.side)), format_date(e.date),
                 e.path.generic_string()});
  w.commit();
}

ScrapeIndex read_scrape_index(const std::filesystem::path& file) {
  ScrapeIndex index;
  for_each_row(file, [&](const std::vector<std::string>&, std::vector<std::string>& r) {
    auto side = side_from_string(r[1]);
    auto d = parse_date(r[2]);
    if (!side || !d) throw InputError(fmt::format("{}: malformed scrape row", file.string()));
    index.entries.push_back({static_cast<int>(field::req_int(r[0], "scrape_id")), *side, *d, r[3]});
  });
  return index;
}

}  // namespace dnm
