#include "dnmetl/forum_resolve.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "dnmetl/error.hpp"
#include "dnmetl/raw_io.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/text.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

namespace fs = std::filesystem;

std::optional<Date> resolve_date_label(std::string_view label, DateTime retrieval, std::optional<Date> scrape_date) {
  label = trim(label);
  if (auto d = parse_date(label)) return d;
  Date base = date_of(retrieval);
  if (scrape_date && base == *scrape_date + std::chrono::days{7}) base = *scrape_date;
  if (label == "Today") return base;
  if (label == "Yesterday") return base - std::chrono::days{1};
  if (label == "Tomorrow") return base + std::chrono::days{1};
  return std::nullopt;
}

std::optional<Date> normalize_relative_date(std::string_view label, DateTime retrieval,
                                            std::optional<Date> scrape_date, std::span<const Date> siblings) {
  std::optional<Date> best = resolve_date_label(label, retrieval, scrape_date);
  for (Date d : siblings)
    if (!best || d < *best) best = d;
  return best;
}

const std::vector<std::string>& title_order() {
  static const std::vector<std::string> order{
      "Administrator", "Market Moderator",        "Forum Moderator", "Moderator", "Public Relations",
      "Banned",        "Vendor",                  "Resident Medical Expert",     "Troll",
      "Member",        "Guest",                   "Sports Referee",  "Sports Fan"};
  return order;
}

int title_rank(std::string_view title) {
  const auto& order = title_order();
  auto it = std::find(order.begin(), order.end(), title);
  return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

std::string_view better_title(std::string_view a, std::string_view b) {
  const int ra = title_rank(a), rb = title_rank(b);
  if (ra != rb) return ra < rb ? a : b;
  return std::min(a, b);
}

std::vector<GapRow> order_topic(std::int64_t tid, std::vector<SeqKey>& posts) {
  std::sort(posts.begin(), posts.end(), [](const SeqKey& a, const SeqKey& b) {
    return std::tie(a.page, a.position, a.pid) < std::tie(b.page, b.position, b.pid);
  });
  std::vector<GapRow> gaps;
  std::int64_t prev = 0;
  for (const auto& p : posts) {
    const std::int64_t gap = p.position - prev - 1;
    if (gap > 0) gaps.push_back({tid, p.pid, gap});
    prev = p.position;
  }
  return gaps;
}

namespace {

using UserKey = std::pair<std::int64_t, int>;  // (uid, scrape_id)

// Orders observations by retrieval time, then scrape id.
bool newer(const SourceTag& a, const SourceTag& b) {
  return std::tie(a.retrieval_time, a.scrape_id) > std::tie(b.retrieval_time, b.scrape_id);
}

template <typename T>
struct Latest {
  std::optional<T> value;
  DateTime when{};
  int scrape = 0;

  void offer(const SourceTag& src, const T& v) {
    if (!value || std::tie(src.retrieval_time, src.scrape_id) > std::tie(when, scrape) ||
        (src.retrieval_time == when && src.scrape_id == scrape && *value < v)) {
      value = v;
      when = src.retrieval_time;
      scrape = src.scrape_id;
    }
  }
};

void offer_max(std::optional<std::int64_t>& slot, const std::optional<std::int64_t>& v) {
  if (v && (!slot || *v > *slot)) slot = v;
}

std::string opt_year(const std::optional<Date>& d) { return d ? std::to_string(year_of(*d)) : std::string(); }
std::string opt_month(const std::optional<Date>& d) { return d ? std::to_string(month_of(*d)) : std::string(); }
std::string opt_day(const std::optional<Date>& d) { return d ? std::to_string(day_of(*d)) : std::string(); }

struct UserScrape {
  std::optional<std::string> title;
  std::optional<std::int64_t> num_posts;
  Latest<std::string> location;
  std::optional<SourceTag> profile;  // latest profile observation
  std::optional<DateLabel> lp;
};

struct UserInfo {
  Latest<std::string> name;  // latest observed username
  std::set<std::string> names;
  std::optional<Date> registered;
};

struct PostAgg {
  SourceTag latest;
  RawPostRow row;  // latest observation
  std::optional<Date> date;
  std::string time;
  std::optional<SourceTag> edit_src;
  std::optional<EditInfo> edit;
};

struct TopicScrape {
  Latest<std::string> title;
  std::optional<std::int64_t> vf_posts;
  std::optional<std::int64_t> views;
  bool viewforum = false;
  bool moved = false;
  Latest<bool> closed;  // non-moved viewforum observations
  bool moved_only = true;
  std::optional<DateTime> lp_at;
  SourceTag lp_src;
  std::string lp_user;
};

struct ForumScrape {
  Latest<std::string> category, title, description;
  Latest<std::int64_t> posts, index_topics;
  std::optional<std::int64_t> pages;
  bool index = false, viewforum = false;
};

class Resolver {
 public:
  Resolver(const fs::path& raw_dir, const ScrapeIndex& index, const OverridePatch& patch, const fs::path& out_dir,
           const ForumResolveOptions& options)
      : raw_(raw_dir), patch_(patch), out_(out_dir), opt_(options) {
    for (const auto& e : index.entries)
      if (e.side == Side::Forum) scrape_dates_[e.scrape_id] = e.date;
    if (opt_.scratch_dir.empty()) opt_.scratch_dir = out_ / ".scratch";
  }

  ForumResolveReport run() {
    resolve_users();
    resolve_posts();
    resolve_topics();
    resolve_fora();
    write_users();
    return std::move(report_);
  }

 private:
  std::optional<Date> scrape_date(int scrape_id) const {
    auto it = scrape_dates_.find(scrape_id);
    if (it == scrape_dates_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<Date> label_date(std::string_view label, const SourceTag& src) const {
    return resolve_date_label(label, src.retrieval_time, scrape_date(src.scrape_id));
  }

  void diag(std::string msg) { report_.diagnostics.push_back(std::move(msg)); }

  void observe_name(std::int64_t uid, const std::string& name, const SourceTag& src) {
    if (name.empty()) return;
    auto& u = users_[uid];
    u.name.offer(src, name);
    u.names.insert(name);
  }

  void observe_registration(std::int64_t uid, const std::optional<std::string>& label, const SourceTag& src) {
    if (!label) return;
    auto d = label_date(*label, src);
    if (!d) {
      diag(fmt::format("uid {}: unparseable registration date '{}' in {}", uid, *label, src.path));
      return;
    }
    auto& reg = users_[uid].registered;
    if (!reg || *d < *reg) reg = d;
  }

  void observe_title(UserScrape& us, const std::optional<std::string>& title) {
    if (!title) return;
    us.title = us.title ? std::string(better_title(*us.title, *title)) : *title;
  }

  // Users from profile pages and the poster block of every post.
  void resolve_users() {
    read_profile_rows(raw_, [&](Tagged<RawProfileRow>&& t) {
      const auto& p = t.row;
      observe_name(p.uid, p.username, t.src);
      observe_registration(p.uid, p.registered, t.src);
      auto& us = user_scrape_[{p.uid, t.src.scrape_id}];
      observe_title(us, p.title);
      offer_max(us.num_posts, p.num_posts);
      if (!us.profile || newer(t.src, *us.profile)) {
        us.profile = t.src;
        us.lp = p.last_post;
        us.location = {};
        if (p.location) us.location.offer(t.src, *p.location);
      }
    });
    read_post_rows(raw_, [&](Tagged<RawPostRow>&& t) {
      const auto& p = t.row;
      max_tid_ = std::max(max_tid_, p.tid);
      observe_name(p.uid, p.username, t.src);
      observe_registration(p.uid, p.poster_registered, t.src);
      auto& us = user_scrape_[{p.uid, t.src.scrape_id}];
      observe_title(us, p.poster_title);
      offer_max(us.num_posts, p.poster_post_count);
    });
    for (const auto& [uid, name] : patch_.user_names) {
      auto it = users_.find(uid);
      if (it == users_.end()) {
        diag(fmt::format("override for uid {} matches no observed user", uid));
        continue;
      }
      it->second.names.insert(name);
    }
    for (const auto& [uid, u] : users_) {
      if (u.names.size() > 1 && !patch_.user_names.count(uid))
        diag(fmt::format("uid {} has {} usernames and no override; using the latest", uid, u.names.size()));
      for (const auto& n : u.names) {
        auto& best = uid_by_name_[n];
        best = std::max(best, uid);
      }
    }
  }

  std::optional<std::int64_t> lookup_uid(const std::string& name) const {
    auto it = uid_by_name_.find(name);
    if (it == uid_by_name_.end()) return std::nullopt;
    return it->second;
  }

  void mention(const std::string& name, int scrape_id, std::string_view what) {
    auto uid = lookup_uid(name);
    if (!uid) {
      diag(fmt::format("{} '{}' in scrape {} matches no uid", what, name, scrape_id));
      return;
    }
    mentioned_.insert({*uid, scrape_id});
  }

  std::string username_of(std::int64_t uid) const {
    if (auto p = patch_.user_names.find(uid); p != patch_.user_names.end()) return p->second;
    auto it = users_.find(uid);
    return it != users_.end() && it->second.name.value ? *it->second.name.value : std::string();
  }

  // Splits raw post rows into tid-range shards small enough to resolve in memory.
  std::vector<fs::path> shard_posts() {
    const fs::path src = raw_ / raw::kPostRows;
    const std::uintmax_t bytes = fs::file_size(src);
    const std::uintmax_t want = std::max<std::uintmax_t>(1, (bytes + opt_.shard_bytes - 1) / std::max<std::uintmax_t>(1, opt_.shard_bytes));
    const std::int64_t shards = static_cast<std::int64_t>(std::min<std::uintmax_t>(want, 4096));
    report_.shards = static_cast<std::size_t>(shards);
    if (shards == 1) return {src};
    const std::int64_t width = max_tid_ / shards + 1;
    fs::create_directories(opt_.scratch_dir);
    std::vector<fs::path> paths;
    std::vector<std::ofstream> outs;
    std::ifstream in(src, std::ios::binary);
    std::string header;
    std::getline(in, header);
    for (std::int64_t i = 0; i < shards; ++i) {
      paths.push_back(opt_.scratch_dir / fmt::format("post-shard-{:04d}.tsv", i));
      outs.emplace_back(paths.back(), std::ios::binary | std::ios::trunc);
      outs.back() << header << '\n';
    }
    std::string line;
    while (std::getline(in, line)) {
      // tid is the fifth column and never needs escaping.
      std::size_t pos = 0;
      for (int c = 0; c < 4 && pos != std::string::npos; ++c) pos = line.find('\t', pos) + 1;
      auto end = line.find('\t', pos);
      auto tid = parse_int(std::string_view(line).substr(pos, end - pos));
      if (!tid) throw InputError(fmt::format("{}: row without tid", src.string()));
      outs[static_cast<std::size_t>(std::clamp<std::int64_t>(*tid / width, 0, shards - 1))] << line << '\n';
    }
    return paths;
  }

  void resolve_posts() {
    TsvWriter posts(out_ / tables::kPost.path, tables::kPost.header);
    TsvWriter gaps(out_ / tables::kGaps.path, tables::kGaps.header);
    const auto shards = shard_posts();
    for (const auto& shard : shards) {
      std::unordered_map<std::int64_t, PostAgg> agg;
      std::map<std::pair<std::int64_t, int>, std::unordered_set<std::int64_t>> visible;
      read_post_rows_file(shard, [&](Tagged<RawPostRow>&& t) {
        auto& p = t.row;
        const int scrape = t.src.scrape_id;
        visible[{p.tid, scrape}].insert(p.pid);
        auto& implied = implied_posts_[{p.tid, scrape}];
        implied = std::max(implied, (p.page_number - 1) * opt_.posts_per_page + p.position_on_page);
        if (p.edit) mention(p.edit->username, scrape, "editor");

        auto [it, fresh] = agg.try_emplace(p.pid);
        PostAgg& a = it->second;
        auto d = label_date(p.posted.date, t.src);
        if (!d) diag(fmt::format("pid {}: unparseable date '{}' in {}", p.pid, p.posted.date, t.src.path));
        if (d && (!a.date || std::tie(*d, p.posted.time) < std::tie(*a.date, a.time))) {
          a.date = d;
          a.time = p.posted.time;
        }
        if (p.edit && (!a.edit_src || newer(t.src, *a.edit_src))) {
          a.edit_src = t.src;
          a.edit = p.edit;
        }
        if (fresh || newer(t.src, a.latest)) {
          a.latest = std::move(t.src);
          a.row = std::move(p);
        }
      });
      for (const auto& [key, pids] : visible) visible_posts_[key] = static_cast<std::int64_t>(pids.size());

      std::map<std::int64_t, std::vector<SeqKey>> by_tid;
      for (const auto& [pid, a] : agg) by_tid[a.row.tid].push_back({pid, a.row.page_number, a.row.position});
      for (auto& [tid, keys] : by_tid) {
        for (const auto& g : order_topic(tid, keys)) {
          gaps.write_row({std::to_string(g.tid), std::to_string(g.before_pid), std::to_string(g.gap_size)});
          ++report_.gaps;
        }
        auto& dates = post_dates_[tid];
        std::int64_t seq = 0;
        for (const auto& k : keys) {
          const PostAgg& a = agg.at(k.pid);
          if (a.date) dates.push_back(*a.date);
          std::string edit_uid, ey, em, ed, et;
          if (a.edit) {
            if (auto uid = lookup_uid(a.edit->username)) {
              edit_uid = std::to_string(*uid);
            } else {
              diag(fmt::format("pid {}: editor '{}' matches no uid", k.pid, a.edit->username));
            }
            auto edate = label_date(a.edit->when.date, *a.edit_src);
            ey = opt_year(edate);
            em = opt_month(edate);
            ed = opt_day(edate);
            et = a.edit->when.time;
          }
          posts.write_row({std::to_string(tid), std::to_string(k.pid), std::to_string(++seq), opt_year(a.date),
                           opt_month(a.date), opt_day(a.date), a.date ? a.time : std::string(),
                           std::to_string(a.row.uid), a.row.text, field::of(a.row.signature), edit_uid, ey, em, ed,
                           et});
          ++report_.posts;
        }
        std::sort(dates.begin(), dates.end());
      }
    }
    posts.commit();
    gaps.commit();
    if (shards.size() > 1) fs::remove_all(opt_.scratch_dir);
  }

  std::int64_t posts_found(std::int64_t tid, Date cutoff) const {
    auto it = post_dates_.find(tid);
    if (it == post_dates_.end()) return 0;
    return std::upper_bound(it->second.begin(), it->second.end(), cutoff) - it->second.begin();
  }

  void resolve_topics() {
    std::map<std::tuple<std::int64_t, int, std::int64_t>, TopicScrape> rows;  // (tid, scrape, fid)
    std::map<std::int64_t, Latest<std::string>> first_user;
    read_topic_rows(raw_, [&](Tagged<RawTopicRow>&& t) {
      const auto& r = t.row;
      const int scrape = t.src.scrape_id;
      auto& ts = rows[{r.tid, scrape, r.fid}];
      fid_topics_[{r.fid, scrape}].insert(r.tid);
      if (r.title && !r.title->empty()) ts.title.offer(t.src, *r.title);
      if (r.source != ForumSource::ViewForum) return;
      ts.viewforum = true;
      if (r.first_post_user) {
        first_user[r.tid].offer(t.src, *r.first_post_user);
        mention(*r.first_post_user, scrape, "first poster");
      }
      if (r.moved) {
        ts.moved = true;
        return;
      }
      ts.moved_only = false;
      offer_max(ts.vf_posts, r.posts_expected);
      offer_max(ts.views, r.views);
      if (r.closed) ts.closed.offer(t.src, *r.closed);
      if (r.last_post) {
        mention(r.last_post->username, scrape, "last poster");
        auto d = label_date(r.last_post->when.date, t.src);
        auto tod = parse_time(r.last_post->when.time);
        if (!d) {
          diag(fmt::format("tid {}: unparseable last-post date '{}'", r.tid, r.last_post->when.date));
        } else {
          const DateTime at_time = at(*d, tod.value_or(TimeOfDay{0}));
          if (!ts.lp_at || at_time > *ts.lp_at || (at_time == *ts.lp_at && newer(t.src, ts.lp_src))) {
            ts.lp_at = at_time;
            ts.lp_src = t.src;
            ts.lp_user = r.last_post->username;
          }
        }
      }
    });

    TsvWriter w(out_ / tables::kTopic.path, tables::kTopic.header);
    for (const auto& [key, ts] : rows) {
      const auto& [tid, scrape, fid] = key;
      std::string first_uid;
      if (auto f = first_user.find(tid); f != first_user.end()) {
        if (auto uid = lookup_uid(*f->second.value)) first_uid = std::to_string(*uid);
      }
      std::optional<std::int64_t> posts = ts.vf_posts;
      if (auto it = implied_posts_.find({tid, scrape}); it != implied_posts_.end()) offer_max(posts, it->second);
      std::int64_t visible = 0;
      if (auto it = visible_posts_.find({tid, scrape}); it != visible_posts_.end()) visible = it->second;
      const auto sdate = scrape_date(scrape);
      std::string lp_uid, ly, lm, ld, lt;
      if (ts.lp_at) {
        if (auto uid = lookup_uid(ts.lp_user)) lp_uid = std::to_string(*uid);
        const Date d = date_of(*ts.lp_at);
        ly = std::to_string(year_of(d));
        lm = std::to_string(month_of(d));
        ld = std::to_string(day_of(d));
        lt = format_time(time_of(*ts.lp_at));
      }
      std::optional<bool> closed;
      if (ts.viewforum) closed = ts.moved_only ? std::optional<bool>(false) : ts.closed.value;
      w.write_row({std::to_string(fid), std::to_string(tid), first_uid, std::to_string(scrape),
                   field::of(ts.title.value), field::of(posts), std::to_string(visible),
                   sdate ? std::to_string(posts_found(tid, *sdate)) : std::string(), field::of(ts.views), lp_uid, ly,
                   lm, ld, lt, field::of(closed), field::of(ts.moved)});
      if (ts.viewforum) ++vf_topic_count_[{fid, scrape}];
      ++report_.topics;
    }
    w.commit();
  }

  void resolve_fora() {
    std::map<std::pair<std::int64_t, int>, ForumScrape> rows;  // (fid, scrape)
    read_forum_rows(raw_, [&](Tagged<RawForumRow>&& t) {
      const auto& r = t.row;
      auto& fs_ = rows[{r.fid, t.src.scrape_id}];
      if (r.title && !r.title->empty()) fs_.title.offer(t.src, *r.title);
      switch (r.source) {
        case ForumSource::Index:
          fs_.index = true;
          // Offered even when empty so the latest index observation decides.
          fs_.category.offer(t.src, r.category.value_or(""));
          fs_.description.offer(t.src, r.description.value_or(""));
          if (r.posts_expected) fs_.posts.offer(t.src, *r.posts_expected);
          if (r.topics_expected) fs_.index_topics.offer(t.src, *r.topics_expected);
          break;
        case ForumSource::ViewForum:
          fs_.viewforum = true;
          offer_max(fs_.pages, r.pages);
          break;
        case ForumSource::ViewTopic: break;
      }
    });
    std::map<int, std::pair<SourceTag, IndexStats>> stats;
    read_index_stats(raw_, [&](Tagged<IndexStats>&& t) {
      auto [it, fresh] = stats.try_emplace(t.src.scrape_id, t.src, t.row);
      if (!fresh && newer(t.src, it->second.first)) it->second = {t.src, t.row};
    });

    {
      TsvWriter w(out_ / tables::kForumScrapes.path, tables::kForumScrapes.header);
      for (const auto& [id, date] : scrape_dates_) {
        IndexStats s;
        if (auto it = stats.find(id); it != stats.end()) s = it->second.second;
        w.write_row({std::to_string(id), std::to_string(year_of(date)), std::to_string(month_of(date)),
                     std::to_string(day_of(date)), field::of(s.fora), field::of(s.topics), field::of(s.posts),
                     field::of(s.users)});
      }
      w.commit();
    }

    TsvWriter w(out_ / tables::kForum.path, tables::kForum.header);
    std::int64_t current_fid = -1;
    std::optional<std::int64_t> running_topics;
    std::set<std::int64_t> found;
    int folded_upto = 0;
    auto fold_until = [&](std::int64_t fid, int scrape) {
      for (auto it = fid_topics_.lower_bound({fid, folded_upto + 1}); it != fid_topics_.end(); ++it) {
        if (it->first.first != fid || it->first.second > scrape) break;
        found.insert(it->second.begin(), it->second.end());
      }
      folded_upto = scrape;
    };
    for (const auto& [key, f] : rows) {
      const auto& [fid, scrape] = key;
      if (fid != current_fid) {
        current_fid = fid;
        running_topics.reset();
        found.clear();
        folded_upto = 0;
      }
      fold_until(fid, scrape);
      std::optional<std::int64_t> visible;
      if (f.viewforum) {
        auto it = vf_topic_count_.find({fid, scrape});
        visible = it == vf_topic_count_.end() ? 0 : it->second;
      }
      std::optional<std::int64_t> expected = f.index_topics.value;
      if (!expected) expected = visible;
      offer_max(running_topics, expected);
      const auto sdate = scrape_date(scrape);
      std::int64_t pf = 0;
      if (sdate)
        for (auto tid : found) pf += posts_found(tid, *sdate);
      auto nonempty = [](const std::optional<std::string>& s) {
        return s && !s->empty() ? s : std::optional<std::string>();
      };
      w.write_row({std::to_string(fid), std::to_string(scrape), field::of(nonempty(f.category.value)),
                   field::of(f.title.value), field::of(nonempty(f.description.value)), field::of(f.pages),
                   field::of(running_topics), field::of(visible), std::to_string(found.size()),
                   field::of(f.posts.value), std::to_string(pf)});
      ++report_.fora;
    }
    w.commit();
  }

  void write_users() {
    for (const auto& key : mentioned_) user_scrape_.try_emplace(key);
    TsvWriter w(out_ / tables::kUser.path, tables::kUser.header);
    for (const auto& [key, us] : user_scrape_) {
      const auto& [uid, scrape] = key;
      std::optional<Date> reg;
      if (auto it = users_.find(uid); it != users_.end()) reg = it->second.registered;
      std::optional<Date> lp_date;
      std::string lp_time;
      if (us.lp && us.profile) {
        lp_date = label_date(us.lp->date, *us.profile);
        if (!lp_date) diag(fmt::format("uid {}: unparseable last-post date '{}'", uid, us.lp->date));
        else lp_time = us.lp->time;
      }
      w.write_row({std::to_string(uid), username_of(uid), opt_year(reg), opt_month(reg), opt_day(reg),
                   std::to_string(scrape), field::of(us.title), opt_year(lp_date), opt_month(lp_date),
                   opt_day(lp_date), lp_time, field::of(us.num_posts), field::of(us.location.value)});
      ++report_.users;
    }
    w.commit();
  }

  fs::path raw_;
  const OverridePatch& patch_;
  fs::path out_;
  ForumResolveOptions opt_;
  ForumResolveReport report_;
  std::map<int, Date> scrape_dates_;

  std::unordered_map<std::int64_t, UserInfo> users_;
  std::map<UserKey, UserScrape> user_scrape_;
  std::set<UserKey> mentioned_;
  std::unordered_map<std::string, std::int64_t> uid_by_name_;
  std::int64_t max_tid_ = 0;

  std::map<std::pair<std::int64_t, int>, std::int64_t> visible_posts_;  // (tid, scrape)
  std::map<std::pair<std::int64_t, int>, std::int64_t> implied_posts_;  // (tid, scrape)
  std::unordered_map<std::int64_t, std::vector<Date>> post_dates_;
  std::map<std::pair<std::int64_t, int>, std::set<std::int64_t>> fid_topics_;  // (fid, scrape) -> tids
  std::map<std::pair<std::int64_t, int>, std::int64_t> vf_topic_count_;        // (fid, scrape)
};

}  // namespace

ForumResolveReport resolve_forum(const fs::path& raw_dir, const ScrapeIndex& index, const OverridePatch& patch,
                                 const fs::path& out_dir, const ForumResolveOptions& options) {
  return Resolver(raw_dir, index, patch, out_dir, options).run();
}

}  // namespace dnm
