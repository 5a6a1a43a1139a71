#include "dnmetl/quality.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "dnmetl/civil_time.hpp"
#include "dnmetl/error.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/text.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

namespace fs = std::filesystem;

std::string HiddenDataEstimate::hidden_pct() const {
  const std::int64_t a = hidden_pct_tenths < 0 ? -hidden_pct_tenths : hidden_pct_tenths;
  return fmt::format("{}{}.{}", hidden_pct_tenths < 0 ? "-" : "", a / 10, a % 10);
}

namespace {

// round(num / den) for den > 0, halves away from zero.
std::int64_t round_div(std::int64_t num, std::int64_t den) {
  return num >= 0 ? (2 * num + den) / (2 * den) : -((-2 * num + den) / (2 * den));
}

}  // namespace

HiddenDataEstimate estimate_hidden(std::string identifier, std::int64_t max_seen, std::int64_t unique_found,
                                   std::optional<std::int64_t> surplus_reported) {
  HiddenDataEstimate h;
  h.identifier = std::move(identifier);
  h.max_seen = max_seen;
  h.unique_found = unique_found;
  h.surplus_reported = surplus_reported;
  h.hidden = max_seen - unique_found - surplus_reported.value_or(0);
  h.hidden_pct_tenths = max_seen > 0 ? round_div(h.hidden * 1000, max_seen) : 0;
  return h;
}

std::string percent_of(std::int64_t count, std::int64_t total) {
  if (total <= 0) return "0.00";
  const std::int64_t hundredths = round_div(count * 10000, total);
  return fmt::format("{}.{:02d}", hundredths / 100, hundredths % 100);
}

namespace {

// Streams a table, handing each row to `fn` with a column accessor.
struct Row {
  const std::vector<std::string>* header;
  const std::vector<std::string>* fields;

  const std::string& operator[](std::string_view col) const {
    for (std::size_t i = 0; i < header->size(); ++i)
      if ((*header)[i] == col) return (*fields)[i];
    throw InputError(fmt::format("no column '{}'", col));
  }
  bool empty(std::string_view col) const { return (*this)[col].empty(); }
  std::optional<std::int64_t> num(std::string_view col) const { return field::opt_int((*this)[col]); }
};

void scan(const fs::path& file, const std::function<void(const Row&)>& fn) {
  if (!fs::exists(file)) throw InputError(fmt::format("missing table {}; run the resolve stage", file.string()));
  for_each_row(file, [&](const std::vector<std::string>& h, std::vector<std::string>& r) { fn(Row{&h, &r}); });
}

struct IdStats {
  std::int64_t max = 0;
  std::unordered_set<std::int64_t> seen;
  void add(std::int64_t id) {
    max = std::max(max, id);
    seen.insert(id);
  }
};

std::optional<Date> row_date(const Row& r, const char* y, const char* m, const char* d) {
  auto yy = r.num(y), mm = r.num(m), dd = r.num(d);
  if (!yy || !mm || !dd) return std::nullopt;
  return make_date(static_cast<int>(*yy), static_cast<unsigned>(*mm), static_cast<unsigned>(*dd));
}

}  // namespace

std::vector<HiddenDataEstimate> hidden_data_report(const fs::path& out_dir) {
  IdStats fid, tid, pid, uid, vid, lid;
  scan(out_dir / tables::kForum.path, [&](const Row& r) { fid.add(*r.num("fid")); });
  scan(out_dir / tables::kTopic.path, [&](const Row& r) { tid.add(*r.num("tid")); });
  scan(out_dir / tables::kPost.path, [&](const Row& r) { pid.add(*r.num("pid")); });
  scan(out_dir / tables::kUser.path, [&](const Row& r) { uid.add(*r.num("uid")); });
  scan(out_dir / tables::kVendors.path, [&](const Row& r) { vid.add(*r.num("vid")); });
  scan(out_dir / tables::kListings.path, [&](const Row& r) { lid.add(*r.num("lid")); });
  std::optional<std::int64_t> fora, topics, users;
  scan(out_dir / tables::kForumScrapes.path, [&](const Row& r) {
    fora = r.num("fora");
    topics = r.num("topics");
    users = r.num("users");
  });
  auto surplus = [](const std::optional<std::int64_t>& reported, const IdStats& s) -> std::optional<std::int64_t> {
    if (!reported) return std::nullopt;
    return *reported - static_cast<std::int64_t>(s.seen.size());
  };
  auto n = [](const IdStats& s) { return static_cast<std::int64_t>(s.seen.size()); };
  return {estimate_hidden("fid", fid.max, n(fid), surplus(fora, fid)),
          estimate_hidden("tid", tid.max, n(tid), surplus(topics, tid)),
          estimate_hidden("pid", pid.max, n(pid), std::nullopt),
          estimate_hidden("uid", uid.max, n(uid), surplus(users, uid)),
          estimate_hidden("vid", vid.max, n(vid), std::nullopt),
          estimate_hidden("lid", lid.max, n(lid), std::nullopt)};
}

namespace {

struct Rule {
  std::string fields;
  std::string reason;
  std::function<bool(const Row&)> match;
};

bool all_empty(const Row& r, std::initializer_list<const char*> cols) {
  return std::all_of(cols.begin(), cols.end(), [&](const char* c) { return r.empty(c); });
}

const char* const kLp[] = {"lp_year", "lp_month", "lp_day", "lp_time"};

bool lp_empty(const Row& r) {
  return std::all_of(std::begin(kLp), std::end(kLp), [&](const char* c) { return r.empty(c); });
}

bool topic_vf_empty(const Row& r) { return lp_empty(r) && r.empty("views") && r.empty("lp_uid"); }

std::map<std::string, std::vector<Rule>> field_rules(int sales_from) {
  std::map<std::string, std::vector<Rule>> rules;
  rules["forum"] = {
      {"pages, topics_visible", "Missing viewforum pages",
       [](const Row& r) { return all_empty(r, {"pages", "topics_visible"}); }},
      {"category, description, posts", "Missing on index page but included through viewforum pages",
       [](const Row& r) { return all_empty(r, {"category", "description", "posts"}); }},
      {"description", "Information does not exist",
       [](const Row& r) { return r.empty("description") && !r.empty("category"); }}};
  rules["topic"] = {
      {"views, lp_uid, lp_*, closed, moved=False", "Missing viewforum pages (single scrape)",
       [](const Row& r) {
         return topic_vf_empty(r) && r.empty("closed") && r["moved"] == "False" && !r.empty("first_uid");
       }},
      {"views, lp_uid, lp_*, closed, moved=False, first_uid", "Missing viewforum pages for all scrapes for this topic",
       [](const Row& r) {
         return topic_vf_empty(r) && r.empty("closed") && r["moved"] == "False" && r.empty("first_uid");
       }},
      {"views, lp_uid, lp_*, closed=False, moved=True",
       "Moved topic found only on a viewforum page of its former forum; viewtopic pages found",
       [](const Row& r) {
         return topic_vf_empty(r) && r["closed"] == "False" && r["moved"] == "True" && !r.empty("posts");
       }},
      {"views, lp_uid, lp_*, closed=False, moved=True, posts", "Same as above and missing viewtopic pages",
       [](const Row& r) {
         return topic_vf_empty(r) && r["closed"] == "False" && r["moved"] == "True" && r.empty("posts");
       }},
      {"posts_visible=0", "Missing viewtopic pages", [](const Row& r) { return r["posts_visible"] == "0"; }},
      {"closed", "Only closed empty",
       [](const Row& r) { return r.empty("closed") && !r.empty("views"); }},
      {"title", "Information does not exist", [](const Row& r) { return r.empty("title"); }}};
  rules["post"] = {
      {"signature", "Information does not exist (poster had no signature)",
       [](const Row& r) { return r.empty("signature"); }},
      {"edit_uid, edit_*", "Information does not exist (no edits occurred)",
       [](const Row& r) { return all_empty(r, {"edit_uid", "edit_year", "edit_month", "edit_day", "edit_time"}); }}};
  rules["user"] = {
      {"location", "Information does not exist or missing profile page",
       [](const Row& r) { return r.empty("location"); }},
      {"lp_*, num_posts>0, location", "Missing profile page & posts by user found",
       [](const Row& r) { return lp_empty(r) && r.num("num_posts").value_or(0) > 0 && r.empty("location"); }},
      {"lp_*, num_posts=0", "No posts by user found",
       [](const Row& r) { return lp_empty(r) && r["num_posts"] == "0"; }},
      {"all except uid, username, scrape_id", "Missing profile page & no posts by user found",
       [](const Row& r) {
         return lp_empty(r) && all_empty(r, {"reg_year", "title", "num_posts", "location"});
       }}};
  rules["categories"] = {{"parent_cid", "Already top level category itself",
                          [](const Row& r) { return r.empty("parent_cid"); }}};
  rules["listings"] = {
      {"description, ships_from, ships_to, listing_available, return_policy", "Missing all listing pages",
       [](const Row& r) {
         return all_empty(r, {"description", "ships_from", "ships_to", "listing_available", "return_policy"});
       }},
      {"description, ships_to, return_policy", "Missing generic and return policy format listing pages",
       [](const Row& r) {
         return all_empty(r, {"description", "ships_to", "return_policy"}) && !r.empty("ships_from");
       }},
      {"description, ships_to", "Missing only generic format listing page",
       [](const Row& r) { return all_empty(r, {"description", "ships_to"}) && !r.empty("return_policy"); }},
      {"return_policy", "Missing only return policy format listing page",
       [](const Row& r) { return r.empty("return_policy") && !r.empty("description"); }}};
  rules["vendors"] = {
      {"sales", fmt::format("Always empty prior to mscrape_id = {}", sales_from),
       [sales_from](const Row& r) { return r.empty("sales") && r.num("mscrape_id").value_or(0) < sales_from; }},
      {"approval_rating", "No listings retrieved for this vendor OR listed as n/a",
       [](const Row& r) { return r.empty("approval_rating") && r["disabled"] != "True"; }},
      {"positive/neutral/negative_feedback, legacy_sales, pgp_key, return_policy, disabled",
       "Missing all profile pages",
       [](const Row& r) {
         return all_empty(r, {"positive_feedback", "neutral_feedback", "negative_feedback", "legacy_sales",
                              "pgp_key", "return_policy", "disabled"});
       }},
      {"legacy_sales, disabled=False", "Missing legacy sales format profile page",
       [](const Row& r) { return r.empty("legacy_sales") && r["disabled"] == "False"; }},
      {"pgp_key, disabled=False", "Missing pgp format profile page",
       [](const Row& r) { return r.empty("pgp_key") && r["disabled"] == "False"; }},
      {"return_policy, disabled=False", "Missing return policy format profile page",
       [](const Row& r) { return r.empty("return_policy") && r["disabled"] == "False"; }},
      {"all except vid, username, mscrape_id, disabled=True", "Vendor has been disabled",
       [](const Row& r) { return r["disabled"] == "True"; }},
      {"rank", "Rank missing", [](const Row& r) { return r.empty("rank") && r["disabled"] != "True"; }}};
  rules["listing-feedback"] = {{"username", "Unknown", [](const Row& r) { return r.empty("username"); }},
                               {"message", "Unknown", [](const Row& r) { return r.empty("message"); }}};
  return rules;
}

void write_fields(const fs::path& out_dir, const std::string& name, const tables::Schema& schema,
                  const std::vector<Rule>& rules) {
  std::vector<std::int64_t> hits(rules.size(), 0);
  std::map<std::string, std::int64_t> patterns;
  std::int64_t total = 0;
  scan(out_dir / schema.path, [&](const Row& r) {
    ++total;
    for (std::size_t i = 0; i < rules.size(); ++i)
      if (rules[i].match(r)) ++hits[i];
    std::vector<std::string> empty;
    for (std::size_t c = 0; c < r.header->size(); ++c)
      if ((*r.fields)[c].empty()) empty.push_back((*r.header)[c]);
    if (!empty.empty()) ++patterns[join(empty, ", ")];
  });
  TsvWriter w(out_dir / "quality" / fmt::format("fields-{}.tsv", name), {"kind", "empty_fields", "reason", "count", "percent"});
  for (std::size_t i = 0; i < rules.size(); ++i)
    w.write_row({"reason", rules[i].fields, rules[i].reason, std::to_string(hits[i]), percent_of(hits[i], total)});
  for (const auto& [p, n] : patterns) w.write_row({"pattern", p, "", std::to_string(n), percent_of(n, total)});
  w.commit();
}

void write_forum_completeness(const fs::path& out_dir, QualityReport& report) {
  struct Reported {
    Date date;
    std::optional<std::int64_t> topics, posts, users;
  };
  std::map<int, Reported> scrapes;
  scan(out_dir / tables::kForumScrapes.path, [&](const Row& r) {
    scrapes[static_cast<int>(*r.num("scrape_id"))] = {*row_date(r, "scrape_year", "scrape_month", "scrape_day"),
                                                      r.num("topics"), r.num("posts"), r.num("users")};
  });
  std::map<int, std::set<std::int64_t>> topics_in, users_in;
  std::map<int, std::int64_t> users_lp;
  scan(out_dir / tables::kTopic.path,
       [&](const Row& r) { topics_in[static_cast<int>(*r.num("scrape_id"))].insert(*r.num("tid")); });
  scan(out_dir / tables::kUser.path, [&](const Row& r) {
    const int s = static_cast<int>(*r.num("scrape_id"));
    users_in[s].insert(*r.num("uid"));
    if (!lp_empty(r)) ++users_lp[s];
  });
  std::vector<Date> post_dates;
  std::map<std::int64_t, Date> topic_first;
  scan(out_dir / tables::kPost.path, [&](const Row& r) {
    auto d = row_date(r, "year", "month", "day");
    if (!d) return;
    post_dates.push_back(*d);
    auto [it, fresh] = topic_first.try_emplace(*r.num("tid"), *d);
    if (!fresh) it->second = std::min(it->second, *d);
  });
  std::sort(post_dates.begin(), post_dates.end());
  std::vector<Date> topic_dates;
  for (const auto& [_, d] : topic_first) topic_dates.push_back(d);
  std::sort(topic_dates.begin(), topic_dates.end());
  auto upto = [](const std::vector<Date>& v, Date d) {
    return static_cast<std::int64_t>(std::upper_bound(v.begin(), v.end(), d) - v.begin());
  };

  TsvWriter w(out_dir / "quality" / "completeness-forum.tsv",
              {"scrape_id", "reported_topics", "topics_found", "topics_with_posts", "reported_posts", "posts_found",
               "reported_users", "users_found", "users_with_last_post"});
  std::set<std::int64_t> topics_cum, users_cum;
  for (const auto& [s, rep] : scrapes) {
    topics_cum.insert(topics_in[s].begin(), topics_in[s].end());
    users_cum.insert(users_in[s].begin(), users_in[s].end());
    w.write_row({std::to_string(s), field::of(rep.topics), std::to_string(topics_cum.size()),
                 std::to_string(upto(topic_dates, rep.date)), field::of(rep.posts),
                 std::to_string(upto(post_dates, rep.date)), field::of(rep.users), std::to_string(users_cum.size()),
                 std::to_string(users_lp[s])});
    ++report.forum_scrapes;
  }
  w.commit();
}

void write_market_completeness(const fs::path& out_dir, QualityReport& report) {
  std::set<std::int64_t> matched;
  const fs::path match_file = out_dir / tables::kMatch.path;
  if (fs::exists(match_file))
    scan(match_file, [&](const Row& r) {
      if (!r.empty("match_id") && !r.empty("vid")) matched.insert(*r.num("vid"));
    });
  struct Totals {
    std::int64_t vendors = 0, listings = 0, sales = 0, m_vendors = 0, m_listings = 0, m_sales = 0;
  };
  std::map<int, Totals> per;
  scan(out_dir / tables::kMarketScrapes.path, [&](const Row& r) { per[static_cast<int>(*r.num("mscrape_id"))]; });
  scan(out_dir / tables::kVendors.path, [&](const Row& r) {
    auto& t = per[static_cast<int>(*r.num("mscrape_id"))];
    const bool m = matched.count(*r.num("vid")) > 0;
    const std::int64_t sales = r.num("sales").value_or(0);
    ++t.vendors;
    t.sales += sales;
    if (m) {
      ++t.m_vendors;
      t.m_sales += sales;
    }
  });
  scan(out_dir / tables::kListings.path, [&](const Row& r) {
    auto& t = per[static_cast<int>(*r.num("mscrape_id"))];
    ++t.listings;
    if (matched.count(*r.num("vid"))) ++t.m_listings;
  });
  TsvWriter w(out_dir / "quality" / "completeness-market.tsv",
              {"mscrape_id", "vendors", "matched_vendors", "listings", "matched_listings", "sales", "matched_sales"});
  for (const auto& [s, t] : per) {
    w.write_row({std::to_string(s), std::to_string(t.vendors), std::to_string(t.m_vendors), std::to_string(t.listings),
                 std::to_string(t.m_listings), std::to_string(t.sales), std::to_string(t.m_sales)});
    ++report.market_scrapes;
  }
  w.commit();
}

}  // namespace

QualityReport write_quality(const fs::path& out_dir, int sales_from_mscrape) {
  QualityReport report;
  report.hidden = hidden_data_report(out_dir);
  {
    TsvWriter w(out_dir / "quality" / "hidden.tsv",
                {"identifier", "maximum", "unique_found", "surplus_reported", "hidden", "hidden_pct"});
    for (const auto& h : report.hidden)
      w.write_row({h.identifier, std::to_string(h.max_seen), std::to_string(h.unique_found),
                   field::of(h.surplus_reported), std::to_string(h.hidden), h.hidden_pct()});
    w.commit();
  }
  write_forum_completeness(out_dir, report);
  write_market_completeness(out_dir, report);
  const std::vector<std::pair<std::string, const tables::Schema*>> field_tables{
      {"forum", &tables::kForum},           {"topic", &tables::kTopic},       {"post", &tables::kPost},
      {"user", &tables::kUser},             {"categories", &tables::kCategories}, {"listings", &tables::kListings},
      {"vendors", &tables::kVendors},       {"listing-feedback", &tables::kFeedback}};
  const auto rules = field_rules(sales_from_mscrape);
  for (const auto& [name, schema] : field_tables) {
    write_fields(out_dir, name, *schema, rules.at(name));
    ++report.field_tables;
  }
  return report;
}

}  // namespace dnm
