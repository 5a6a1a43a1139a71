#include <fmt/format.h>

#include "dnmetl/ingest.hpp"
#include "dnmetl/tables.hpp"
#include "model.hpp"

namespace dnm::synth {

namespace {

using Row = std::vector<std::string>;

std::string str(int64_t v) { return std::to_string(v); }
std::string str(const std::optional<int64_t>& v) { return v ? std::to_string(*v) : std::string(); }
std::string flag(bool b) { return b ? "True" : "False"; }

void date_cols(Row& r, std::optional<DateTime> t, bool with_time) {
  if (!t) {
    r.insert(r.end(), with_time ? 4 : 3, std::string());
    return;
  }
  const Date d = date_of(*t);
  r.push_back(std::to_string(year_of(d)));
  r.push_back(std::to_string(month_of(d)));
  r.push_back(std::to_string(day_of(d)));
  if (with_time) r.push_back(format_time(time_of(*t)));
}

// Title ranking as used for member titles across duplicate observations.
int rank_of(std::string_view t) {
  static const std::vector<std::string_view> order{
      "Administrator", "Market Moderator", "Forum Moderator", "Moderator", "Public Relations", "Banned", "Vendor",
      "Resident Medical Expert", "Troll", "Member", "Guest", "Sports Referee", "Sports Fan"};
  auto it = std::find(order.begin(), order.end(), t);
  return static_cast<int>(it - order.begin());
}
std::string pick_title(const std::string& a, const std::string& b) {
  if (rank_of(a) != rank_of(b)) return rank_of(a) < rank_of(b) ? a : b;
  return std::min(a, b);
}

class Oracle {
 public:
  Oracle(const World& w, const std::vector<FileRecord>& files) : w_(w), files_(files) {}

  ExpectedTables run() {
    coverage();
    observe_users();
    forum_tables();
    market_tables();
    match_table();
    manifest();
    return std::move(out_);
  }

 private:
  struct UserScrape {
    std::optional<std::string> title;
    std::optional<int64_t> num_posts;
    bool profile = false;
  };

  struct TopicRow {
    std::string title;
    bool vf = false, moved_row = false;
  };

  DateTime cutoff(int s) const { return w_.fscrapes[static_cast<std::size_t>(s - 1)].cutoff; }
  Date fdate(int s) const { return w_.fscrapes[static_cast<std::size_t>(s - 1)].date; }

  void coverage() {
    for (const auto& sc : w_.fscrapes) {
      for (const auto& f : w_.fora)
        if (w_.viewforum_captured(sc.id, f.fid)) vf_[sc.id].insert(f.fid);
      for (const auto& t : w_.topics)
        if (w_.topic_exists(t, sc.cutoff) && w_.viewtopic_captured(sc.id, t.tid)) {
          vt_[sc.id].insert(t.tid);
          last_vt_[t.tid] = sc.id;
        }
      for (const auto& u : w_.users)
        if (u.registered <= sc.cutoff && w_.profile_captured(sc.id, u.uid)) pr_[sc.id].insert(u.uid);
    }
  }

  bool in(const std::map<int, std::set<int64_t>>& m, int s, int64_t id) const {
    auto it = m.find(s);
    return it != m.end() && it->second.count(id);
  }

  std::optional<int64_t> lookup(const std::string& name) const {
    auto it = uid_by_name_.find(name);
    if (it == uid_by_name_.end()) return std::nullopt;
    return it->second;
  }

  // Names, registration dates, titles and post counts from poster blocks and
  // profile pages.
  void observe_users() {
    for (const auto& sc : w_.fscrapes) {
      for (auto tid : vt_[sc.id]) {
        const Topic& t = w_.topic(tid);
        const auto n = w_.posts_at(t, sc.cutoff);
        for (int64_t i = 0; i < n; ++i) {
          const User& u = w_.user(w_.posts[t.posts[static_cast<std::size_t>(i)]].uid);
          observe(u, sc.id, u.name, w_.user_title_at(u, sc.cutoff), w_.user_posts_at(u, sc.cutoff), false);
        }
      }
      for (auto uid : pr_[sc.id]) {
        const User& u = w_.user(uid);
        const int64_t posts = w_.user_posts_at(u, sc.cutoff);
        observe(u, sc.id, w_.profile_name(u, sc.id), w_.user_title_at(u, sc.cutoff), posts, true);
        if (auto c = w_.profile_conflicts.find({uid, sc.id}); c != w_.profile_conflicts.end())
          observe(u, sc.id, w_.profile_name(u, sc.id), c->second.title,
                  std::max<int64_t>(0, posts - c->second.num_posts_drop), true);
      }
    }
    for (const auto& [uid, name] : w_.user_name_patch)
      if (names_.count(uid)) names_[uid].insert(name);
    for (const auto& [uid, ns] : names_)
      for (const auto& n : ns) uid_by_name_[n] = std::max(uid_by_name_[n], uid);
  }

  void observe(const User& u, int s, const std::string& name, const std::string& title, int64_t posts, bool profile) {
    names_[u.uid].insert(name);
    auto& latest = latest_name_[u.uid];
    if (std::make_pair(s, name) > latest) latest = {s, name};
    auto& us = users_[{u.uid, s}];
    us.title = us.title ? pick_title(*us.title, title) : title;
    us.num_posts = std::max(us.num_posts.value_or(posts), posts);
    us.profile = us.profile || profile;
  }

  void mention(const std::string& name, int s) {
    if (auto uid = lookup(name)) users_.try_emplace({*uid, s});
  }

  const std::string& name_of(int64_t uid) const { return w_.user(uid).name; }

  // Topic rows keyed (tid, scrape, fid) before the per-row numbers are filled in.
  std::map<std::tuple<int64_t, int, int64_t>, TopicRow> topic_keys() const {
    std::map<std::tuple<int64_t, int, int64_t>, TopicRow> rows;
    for (const auto& sc : w_.fscrapes) {
      for (const auto& t : w_.topics) {
        if (!w_.topic_exists(t, sc.cutoff)) continue;
        const int64_t cur = t.fid_at(sc.cutoff);
        const bool vt = in(vt_, sc.id, t.tid);
        if (vt || in(vf_, sc.id, cur)) {
          TopicRow r;
          r.title = t.title;
          if (vt)
            if (auto c = w_.title_conflicts.find({t.tid, sc.id}); c != w_.title_conflicts.end()) r.title = c->second.title;
          r.vf = in(vf_, sc.id, cur);
          rows[{t.tid, sc.id, cur}] = r;
        }
        if (cur != t.fid && in(vf_, sc.id, t.fid)) rows[{t.tid, sc.id, t.fid}] = {t.title, true, true};
      }
    }
    return rows;
  }

  int64_t found_before(const Topic& t, Date d) const {
    auto it = last_vt_.find(t.tid);
    if (it == last_vt_.end()) return 0;
    const auto n = w_.posts_at(t, cutoff(it->second));
    int64_t c = 0;
    for (int64_t i = 0; i < n; ++i) c += date_of(w_.posts[t.posts[static_cast<std::size_t>(i)]].at) <= d;
    return c;
  }

  void forum_tables() {
    const auto keys = topic_keys();

    // Mentions: editors, first posters and last posters.
    for (const auto& sc : w_.fscrapes) {
      for (auto tid : vt_[sc.id]) {
        const Topic& t = w_.topic(tid);
        for (int64_t i = 0, n = w_.posts_at(t, sc.cutoff); i < n; ++i) {
          const Post& p = w_.posts[t.posts[static_cast<std::size_t>(i)]];
          if (p.edited_at && *p.edited_at <= sc.cutoff) mention(name_of(p.uid), sc.id);
        }
      }
    }
    std::set<int64_t> in_viewforum;
    for (const auto& [key, r] : keys) {
      const auto& [tid, s, fid] = key;
      if (!r.vf) continue;
      const Topic& t = w_.topic(tid);
      in_viewforum.insert(tid);
      mention(name_of(w_.posts[t.posts.front()].uid), s);
      if (!r.moved_row) mention(name_of(w_.last_post_at(t, cutoff(s))->uid), s);
    }

    // Posts and gaps.
    auto& posts = out_.rows[tables::kPost.path];
    auto& gaps = out_.rows[tables::kGaps.path];
    for (const auto& t : w_.topics) {
      auto it = last_vt_.find(t.tid);
      if (it == last_vt_.end()) continue;
      const DateTime c = cutoff(it->second);
      const auto n = w_.posts_at(t, c);
      int64_t prev = 0;
      for (int64_t i = 0; i < n; ++i) {
        const Post& p = w_.posts[t.posts[static_cast<std::size_t>(i)]];
        const User& u = w_.user(p.uid);
        const int64_t shown = p.position + p.label_shift;
        if (shown - prev - 1 > 0) gaps.push_back({str(t.tid), str(p.pid), str(shown - prev - 1)});
        prev = shown;
        const bool edited = p.edited_at && *p.edited_at <= c;
        Row r{str(t.tid), str(p.pid), str(i + 1)};
        date_cols(r, p.at, true);
        r.push_back(str(p.uid));
        r.push_back(edited ? p.edited_text : p.text);
        r.push_back(u.signature);
        r.push_back(edited ? str(lookup(u.name)) : std::string());
        date_cols(r, edited ? p.edited_at : std::nullopt, true);
        posts.push_back(std::move(r));
      }
    }
    out_.gaps = gaps.size();

    // Topics.
    auto& topics = out_.rows[tables::kTopic.path];
    std::map<std::pair<int64_t, int>, std::set<int64_t>> fid_topics;
    std::map<std::pair<int64_t, int>, int64_t> vf_count;
    for (const auto& [key, r] : keys) {
      const auto& [tid, s, fid] = key;
      const Topic& t = w_.topic(tid);
      const DateTime c = cutoff(s);
      const bool vt = in(vt_, s, tid);
      const int64_t n = w_.posts_at(t, c);
      fid_topics[{fid, s}].insert(tid);
      if (r.vf) ++vf_count[{fid, s}];
      std::optional<int64_t> first_uid;
      if (in_viewforum.count(tid)) first_uid = lookup(name_of(w_.posts[t.posts.front()].uid));
      std::optional<int64_t> np;
      if (vt || (r.vf && !r.moved_row)) np = n;
      Row row{str(fid), str(tid), str(first_uid), str(s), r.title, str(np), str(vt ? n : 0),
              str(found_before(t, fdate(s)))};
      if (r.vf && !r.moved_row) {
        const Post& last = *w_.last_post_at(t, c);
        row.push_back(str(w_.views_at(t, c)));
        row.push_back(str(lookup(name_of(last.uid))));
        date_cols(row, last.at, true);
        row.push_back(flag(w_.is_closed(t, c)));
      } else {
        row.insert(row.end(), 6, std::string());
        row.push_back(r.vf ? "False" : "");
      }
      row.push_back(flag(r.moved_row));
      topics.push_back(std::move(row));
    }

    // Board statistics and fora.
    auto& scrapes = out_.rows[tables::kForumScrapes.path];
    for (const auto& sc : w_.fscrapes) {
      int64_t tcount = 0, pcount = 0, ucount = 0;
      for (const auto& t : w_.topics)
        if (w_.topic_exists(t, sc.cutoff)) {
          ++tcount;
          pcount += w_.posts_at(t, sc.cutoff);
        }
      for (const auto& u : w_.users) ucount += u.registered <= sc.cutoff;
      if (w_.hidden_active) {
        for (const auto& [id, when] : w_.hidden_topics) tcount += when <= sc.cutoff;
        for (const auto& [id, when] : w_.hidden_posts) pcount += when <= sc.cutoff;
        for (const auto& [id, when] : w_.hidden_users) ucount += when <= sc.cutoff;
      }
      Row r{str(sc.id)};
      date_cols(r, DateTime{sc.date}, false);
      r.insert(r.end(), {str(static_cast<int64_t>(w_.fora.size())), str(tcount), str(pcount), str(ucount)});
      scrapes.push_back(std::move(r));
    }
    auto& fora = out_.rows[tables::kForum.path];
    for (const auto& f : w_.fora) {
      std::optional<int64_t> running;
      std::set<int64_t> found;
      for (const auto& sc : w_.fscrapes) {
        int64_t here = 0, posts_here = 0, redirects = 0;
        for (const auto& t : w_.topics) {
          if (!w_.topic_exists(t, sc.cutoff)) continue;
          if (t.fid_at(sc.cutoff) == f.fid) {
            ++here;
            posts_here += w_.posts_at(t, sc.cutoff);
          } else if (t.fid == f.fid) {
            ++redirects;
          }
        }
        running = std::max(running.value_or(here), here);
        if (auto it = fid_topics.find({f.fid, sc.id}); it != fid_topics.end())
          found.insert(it->second.begin(), it->second.end());
        int64_t pf = 0;
        for (auto tid : found) pf += found_before(w_.topic(tid), sc.date);
        const bool vf = in(vf_, sc.id, f.fid);
        std::optional<int64_t> pages, visible;
        if (vf) {
          pages = std::max<int64_t>(1, (here + redirects + 24) / 25);
          auto c = vf_count.find({f.fid, sc.id});
          visible = c == vf_count.end() ? 0 : c->second;
        }
        fora.push_back({str(f.fid), str(sc.id), f.category, f.title, f.description, str(pages), str(running),
                        str(visible), str(static_cast<int64_t>(found.size())), str(posts_here), str(pf)});
      }
    }

    // Users.
    auto& users = out_.rows[tables::kUser.path];
    for (const auto& [key, us] : users_) {
      const auto& [uid, s] = key;
      const User& u = w_.user(uid);
      std::string name;
      if (auto p = w_.user_name_patch.find(uid); p != w_.user_name_patch.end()) name = p->second;
      else name = latest_name_.at(uid).second;
      Row r{str(uid), name};
      date_cols(r, u.registered, false);
      r.push_back(str(s));
      r.push_back(us.title.value_or(""));
      date_cols(r, us.profile ? w_.user_last_post_at(u, cutoff(s)) : std::nullopt, true);
      r.push_back(str(us.num_posts));
      r.push_back(us.profile ? u.location : std::string());
      users.push_back(std::move(r));
    }
  }

  // ---------------------------------------------------------------- market

  struct VendorObs {
    bool any = false;
    std::optional<std::string> rank, approval, legacy, pgp, return_policy;
    std::optional<int64_t> sales, positive, neutral, negative;
    std::optional<bool> disabled;
  };

  struct ListingObs {
    std::optional<std::string> description, ships_from, ships_to, return_policy;
    std::optional<bool> available;
  };

  static std::string fraction(const std::string& pct) {
    // "98.50%" -> "0.9850"
    const auto dot = pct.find('.');
    const int64_t basis = std::stoll(pct.substr(0, dot)) * 100 + std::stoll(pct.substr(dot + 1, 2));
    return fmt::format("{}.{:04d}", basis / 10000, basis % 10000);
  }

  void market_tables() {
    auto& ms = out_.rows[tables::kMarketScrapes.path];
    for (const auto& m : w_.mscrapes) {
      Row r{str(m.id)};
      date_cols(r, DateTime{m.date}, false);
      ms.push_back(std::move(r));
    }

    // Categories: true hierarchy; names from the first scrape showing them.
    auto& cats = out_.rows[tables::kCategories.path];
    for (const auto& c : w_.categories) {
      std::string name;
      for (const auto& m : w_.mscrapes) {
        auto v = w_.category_view(c.cid, m.id);
        if (!v.shown) continue;
        name = v.name == "Disassociatives" ? "Dissociatives" : v.name;
        break;
      }
      cats.push_back({str(c.cid), name, str(c.parent)});
    }

    std::map<std::pair<int64_t, int>, VendorObs> vendors;
    std::map<std::tuple<int64_t, int, std::string>, Row> listings;
    std::set<std::tuple<int64_t, int, unsigned, unsigned, std::string, std::string>> feedback;
    for (const auto& m : w_.mscrapes) {
      const DateTime c = m.cutoff;
      for (const auto& l : w_.listings) {
        if (!w_.listing_active(l, c)) continue;
        const Vendor& v = w_.vendor(l.vid);
        auto& vo = vendors[{v.vid, m.id}];
        vo.any = true;  // every active listing shows on its category page
        ListingObs lo;
        for (auto f : {ListingFormat::Generic, ListingFormat::Feedback, ListingFormat::ReturnPolicy}) {
          if (!w_.listing_captured(m.id, l.lid, f)) continue;
          vo.rank = w_.rank_at(v, m);
          vo.sales = v.sales(c);
          if (auto a = v.approval(c)) vo.approval = fraction(*a);
          lo.ships_from = l.ships_from;
          lo.available = w_.availability(m.id, l.lid);
          if (f == ListingFormat::Generic) {
            lo.description = l.description;
            lo.ships_to = l.ships_to;
          }
          if (f == ListingFormat::ReturnPolicy) lo.return_policy = l.return_policy;
          if (f == ListingFormat::Feedback)
            for (const auto& e : l.feedback)
              if (e.at <= c) {
                const Date d = date_of(e.at);
                feedback.emplace(l.lid, year_of(d), month_of(d), day_of(d), e.user, e.message);
              }
        }
        auto lv = w_.listing_vendor_patch.find(l.lid);
        const int64_t vid = lv != w_.listing_vendor_patch.end() ? lv->second : l.vid;
        listings[{l.lid, m.id, l.title}] = {str(l.lid), str(vid), str(m.id), l.title, l.price,
                                            lo.description.value_or(""), str(l.cid), lo.ships_from.value_or(""),
                                            lo.ships_to.value_or(""), l.product_class,
                                            lo.available ? flag(*lo.available) : "", lo.return_policy.value_or("")};
      }
      for (const auto& o : w_.off_by_one) {
        if (o.mscrape != m.id) continue;
        const Listing& l = w_.listing(o.lid);
        listings[{o.shown, m.id, l.title}] = {str(o.shown), str(w_.listing_vendor_patch.at(o.shown)), str(m.id),
                                              l.title, l.price, "", str(l.cid), "", "", l.product_class, "", ""};
      }
      for (const auto& v : w_.vendors) {
        if (!w_.vendor_exists(v, c)) continue;
        for (auto f : {VendorFormat::Generic, VendorFormat::Feedback, VendorFormat::LegacySales, VendorFormat::Pgp,
                       VendorFormat::ReturnPolicy}) {
          if (v.disabled(c) && f != VendorFormat::Generic) continue;
          if (!w_.vendor_captured(m.id, v.vid, f)) continue;
          auto& vo = vendors[{v.vid, m.id}];
          vo.any = true;
          vo.disabled = v.disabled(c);
          if (v.disabled(c)) continue;
          vo.rank = w_.rank_at(v, m);
          vo.sales = v.sales(c);
          if (auto sc = w_.sales_conflicts.find({v.vid, m.id}); sc != w_.sales_conflicts.end() && f == VendorFormat::Generic)
            sales_conflict_.insert({v.vid, m.id});
          vo.positive = v.positive(c);
          vo.neutral = v.neutral(c);
          vo.negative = v.negative(c);
          if (f == VendorFormat::LegacySales) vo.legacy = v.legacy;
          if (f == VendorFormat::Pgp) vo.pgp = v.pgp;
          if (f == VendorFormat::ReturnPolicy) vo.return_policy = v.return_policy;
        }
      }
    }

    auto& vrows = out_.rows[tables::kVendors.path];
    for (const auto& [key, vo] : vendors) {
      const auto& [vid, m] = key;
      const Vendor& v = w_.vendor(vid);
      Row r{str(vid), str(m), v.name};
      if (vo.disabled.value_or(false)) {
        r.insert(r.end(), 9, std::string());
      } else {
        std::optional<int64_t> sales;
        if (m >= w_.profile.sales_from_mscrape) {
          sales = vo.sales;
          if (sales_conflict_.count({vid, m})) sales = w_.sales_conflicts.at({vid, m}).sales;
        }
        r.insert(r.end(), {vo.rank.value_or(""), str(sales), vo.approval.value_or(""), str(vo.positive),
                           str(vo.neutral), str(vo.negative), vo.legacy.value_or(""), vo.pgp.value_or(""),
                           vo.return_policy.value_or("")});
      }
      r.push_back(vo.disabled ? flag(*vo.disabled) : "");
      vendor_names_.emplace(vid, v.name);
      vrows.push_back(std::move(r));
    }
    auto& lrows = out_.rows[tables::kListings.path];
    for (auto& [key, r] : listings) lrows.push_back(std::move(r));
    auto& frows = out_.rows[tables::kFeedback.path];
    for (const auto& [lid, y, mo, d, user, msg] : feedback)
      frows.push_back({str(lid), user, std::to_string(y), std::to_string(mo), std::to_string(d), msg});
  }

  void match_table() {
    std::set<std::pair<int64_t, std::string>> users, vendors;
    for (const auto& r : out_.rows[tables::kUser.path]) users.emplace(std::stoll(r[0]), r[1]);
    vendors = vendor_names_;
    std::set<std::string> names;
    for (const auto& [id, n] : users) names.insert(n);
    for (const auto& [id, n] : vendors) names.insert(n);
    auto& rows = out_.rows[tables::kMatch.path];
    int64_t next = 0;
    for (const auto& n : names) {
      if (n.empty()) continue;
      std::vector<int64_t> uids, vids;
      for (const auto& [id, un] : users)
        if (un == n) uids.push_back(id);
      for (const auto& [id, vn] : vendors)
        if (vn == n) vids.push_back(id);
      if (!uids.empty() && !vids.empty()) {
        ++next;
        for (auto u : uids)
          for (auto v : vids) rows.push_back({str(next), n, str(u), str(v)});
      } else {
        for (auto u : uids) rows.push_back({"", n, str(u), ""});
        for (auto v : vids) rows.push_back({"", n, "", str(v)});
      }
    }
  }

  void manifest() {
    auto& rows = out_.rows[tables::kIngestManifest];
    for (const auto& f : files_)
      rows.push_back({std::to_string(f.scrape), std::string(to_string(f.side)), f.path,
                      std::string(to_string(f.page_class)), std::string(to_string(f.quirk)), format_datetime(f.mtime)});
  }

  const World& w_;
  const std::vector<FileRecord>& files_;
  ExpectedTables out_;
  std::map<int, std::set<int64_t>> vf_, vt_, pr_;
  std::map<int64_t, int> last_vt_;
  std::map<int64_t, std::set<std::string>> names_;
  std::map<int64_t, std::pair<int, std::string>> latest_name_;
  std::map<std::string, int64_t> uid_by_name_;
  std::map<std::pair<int64_t, int>, UserScrape> users_;
  std::set<std::pair<int64_t, int>> sales_conflict_;
  std::set<std::pair<int64_t, std::string>> vendor_names_;
};

}  // namespace

ExpectedTables expected_tables(const World& w, const std::vector<FileRecord>& files) {
  return Oracle(w, files).run();
}

}  // namespace dnm::synth
