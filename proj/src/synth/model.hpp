#pragma once

// Internal world model shared by the generator's renderer and its
// expected-table builder.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dnmetl/civil_time.hpp"
#include "dnmetl/ingest.hpp"
#include "dnmetl/synth.hpp"

namespace dnm::synth {

using std::int64_t;

// Sequential draws for the world itself.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    eng_.seed(seq);
  }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  int64_t between(int64_t lo, int64_t hi) {  // inclusive
    return std::min(hi, lo + static_cast<int64_t>(uniform() * static_cast<double>(hi - lo + 1)));
  }
  bool chance(double p) { return uniform() < p; }
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }
  template <class V>
  const typename V::value_type& pick(const V& v) {
    return v[static_cast<std::size_t>(between(0, static_cast<int64_t>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 eng_;
};

// Order-free draws keyed by a name, so adding or removing one page never
// shifts the draws of another.
class Keyed {
 public:
  explicit Keyed(std::uint64_t seed) : seed_(seed) {}
  double uniform(std::string_view key) const;
  bool chance(std::string_view key, double p) const { return uniform(key) < p; }
  int64_t between(std::string_view key, int64_t lo, int64_t hi) const {
    return std::min(hi, lo + static_cast<int64_t>(uniform(key) * static_cast<double>(hi - lo + 1)));
  }

 private:
  std::uint64_t seed_;
};

enum Stream : std::uint64_t { kWorld = 1, kMarket = 2, kAnomaly = 100 };

struct Scrape {
  int id = 0;
  Date date{};
  DateTime cutoff{};      // content state captured by every page of the scrape
  DateTime lo{}, hi{};    // retrieval window of ordinary pages
};

struct Forum {
  int64_t fid = 0;
  std::string category;
  std::string title, description;
  bool hidden = false;
};

struct User {
  int64_t uid = 0;
  std::string name;
  DateTime registered{};
  std::string title = "Member";
  std::string location, signature;
  bool hidden = false;
  std::optional<DateTime> banned_at;
  std::string alt_name;  // shown on profile pages from scrape alt_from on
  int alt_from = 0;
  std::vector<DateTime> post_times;  // sorted
};

struct Post {
  int64_t pid = 0, tid = 0, uid = 0;
  DateTime at{};
  std::string text;
  std::optional<DateTime> edited_at;
  std::string edited_text;
  int64_t position = 0;  // 1-based, chronological within the topic
  int64_t label_shift = 0;
};

struct Topic {
  int64_t tid = 0, fid = 0;
  std::string title;
  std::vector<std::size_t> posts;  // indices into World::posts, chronological
  std::optional<DateTime> closed_at;
  int64_t views_base = 0;
  double views_per_day = 0;
  std::optional<DateTime> moved_at;
  int64_t moved_to = 0;

  DateTime created(const std::vector<Post>& all) const { return all[posts.front()].at; }
  int64_t fid_at(DateTime t) const { return moved_at && t >= *moved_at ? moved_to : fid; }
};

struct Category {
  int64_t cid = 0;
  std::string name;
  std::optional<int64_t> parent;
};

struct Vendor {
  int64_t vid = 0;
  std::string name;
  DateTime joined{};
  double sales_per_day = 0;
  std::string legacy, pgp, return_policy;
  std::optional<DateTime> disabled_at;

  int64_t sales(DateTime t) const;
  int64_t positive(DateTime t) const { return sales(t) * 7 / 10; }
  int64_t neutral(DateTime t) const { return sales(t) / 20; }
  int64_t negative(DateTime t) const { return sales(t) / 30; }
  std::optional<std::string> approval(DateTime t) const;  // "98.50%"
  bool disabled(DateTime t) const { return disabled_at && t >= *disabled_at; }
};

struct FeedbackEntry {
  DateTime at{};
  std::string user, message;
};

struct Listing {
  int64_t lid = 0, vid = 0, cid = 0;
  std::string title, short_title, price, description, ships_from, ships_to, product_class, return_policy;
  DateTime created{};
  std::vector<FeedbackEntry> feedback;
};

enum class ListingFormat { Generic, Feedback, ReturnPolicy };
enum class VendorFormat { Generic, Feedback, LegacySales, Pgp, ReturnPolicy };

// Pages re-captured with a deliberate defect.
struct TitleConflict {
  int64_t tid = 0;
  int scrape = 0;
  std::string title;
};
struct ProfileConflict {
  int64_t uid = 0;
  int scrape = 0;
  std::string title;
  int64_t num_posts_drop = 0;
};
struct ViewsConflict {
  int64_t fid = 0;
  int scrape = 0;
};
struct SalesConflict {
  int64_t vid = 0;
  int mscrape = 0;
  int64_t sales = 0;
};
struct OffByOne {
  int64_t lid = 0;     // listing whose store row carries the wrong id
  int64_t shown = 0;   // the id rendered instead
  int mscrape = 0;
};

struct World {
  CorpusProfile profile;
  Keyed keyed{0};
  std::vector<Scrape> fscrapes, mscrapes;

  std::vector<Forum> fora;
  std::vector<User> users;
  std::vector<Topic> topics;
  std::vector<Post> posts;
  // Reserved id slots; with hidden_id_gaps on they hold entities counted by
  // the board statistics but never shown.
  std::vector<std::pair<int64_t, DateTime>> hidden_topics, hidden_posts, hidden_users;
  bool hidden_active = false;

  std::vector<Category> categories;
  std::vector<Vendor> vendors;
  std::vector<Listing> listings;
  int category_switch = 0;  // first market scrape rendering the current tree

  std::map<std::pair<int64_t, int>, TitleConflict> title_conflicts;    // (tid, scrape)
  std::map<std::pair<int64_t, int>, ProfileConflict> profile_conflicts;  // (uid, scrape)
  std::map<std::pair<int64_t, int>, ViewsConflict> views_conflicts;    // (fid, scrape)
  std::map<std::pair<int64_t, int>, SalesConflict> sales_conflicts;    // (vid, mscrape)
  std::vector<OffByOne> off_by_one;
  std::map<int64_t, std::string> user_name_patch;
  std::map<int64_t, int64_t> listing_vendor_patch;

  std::map<int64_t, std::size_t> user_at, topic_at, vendor_at, listing_at, category_at;

  const User& user(int64_t uid) const { return users[user_at.at(uid)]; }
  const Topic& topic(int64_t tid) const { return topics[topic_at.at(tid)]; }
  const Vendor& vendor(int64_t vid) const { return vendors[vendor_at.at(vid)]; }
  const Listing& listing(int64_t lid) const { return listings[listing_at.at(lid)]; }
  const Category& category(int64_t cid) const { return categories[category_at.at(cid)]; }

  // Forum state at an instant.
  int64_t posts_at(const Topic& t, DateTime c) const;
  bool topic_exists(const Topic& t, DateTime c) const { return t.created(posts) <= c; }
  const Post* last_post_at(const Topic& t, DateTime c) const;
  int64_t views_at(const Topic& t, DateTime c) const;
  bool is_closed(const Topic& t, DateTime c) const { return t.closed_at && *t.closed_at <= c; }
  int64_t user_posts_at(const User& u, DateTime c) const;
  std::optional<DateTime> user_last_post_at(const User& u, DateTime c) const;
  std::string user_title_at(const User& u, DateTime c) const;
  std::string profile_name(const User& u, int scrape) const;
  bool registered_by(const User& u, DateTime c) const { return u.registered <= c; }

  // Capture plan.
  bool viewforum_captured(int s, int64_t fid) const;
  bool viewtopic_captured(int s, int64_t tid) const;
  bool profile_captured(int s, int64_t uid) const;

  // Market state and capture plan.
  bool listing_active(const Listing& l, DateTime c) const;
  bool vendor_exists(const Vendor& v, DateTime c) const { return v.joined <= c; }
  std::string rank_at(const Vendor& v, const Scrape& m) const;
  bool availability(int m, int64_t lid) const;
  bool store_captured(int m, int64_t vid) const;
  bool listing_captured(int m, int64_t lid, ListingFormat f) const;
  bool vendor_captured(int m, int64_t vid, VendorFormat f) const;
  // Category as rendered in market scrape m: (name, parent, shown).
  struct CategoryView {
    std::string name;
    std::optional<int64_t> parent;
    bool shown = true;
  };
  CategoryView category_view(int64_t cid, int m) const;
  std::vector<int64_t> chain_at(int64_t cid, int m) const;  // root first
  std::vector<int64_t> children_at(int64_t cid, int m) const;
};

World build_world(const CorpusProfile& profile);

// Pages and ground truth.
struct FileRecord {
  Side side = Side::Forum;
  int scrape = 0;
  std::string path;  // relative to the corpus root
  PageClass page_class = PageClass::Irrelevant;
  Quirk quirk = Quirk::None;
  DateTime mtime{};
};

struct RenderStats {
  std::vector<FileRecord> files;
  std::size_t forum_pages = 0, market_pages = 0;
};

RenderStats render_corpus(const World& w, const std::filesystem::path& corpus_root);

/// Canonical tables predicted from the world; keys are tables::canonical_paths().
struct ExpectedTables {
  std::map<std::string, std::vector<std::vector<std::string>>> rows;
  std::size_t gaps = 0;
};
ExpectedTables expected_tables(const World& w, const std::vector<FileRecord>& files);

std::string pct_label(int64_t basis);  // hundredths of a percent -> "98.50%"

}  // namespace dnm::synth
