#include <fmt/format.h>

#include <fstream>

#include "dnmetl/error.hpp"
#include "dnmetl/text.hpp"
#include "model.hpp"

namespace dnm::synth {

namespace fs = std::filesystem;

namespace {

using namespace std::chrono_literals;

std::string esc(std::string_view s) { return encode_entities(s); }

std::string datetime_label(DateTime t) { return format_datetime(t); }

// How a re-captured page labels post dates.
enum class Labels { Absolute, RelativeTodayTomorrow, MidnightToday, SevenDay };

std::string with_commas(int64_t v) {
  std::string s = std::to_string(v < 0 ? -v : v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return v < 0 ? "-" + s : s;
}

class Writer {
 public:
  Writer(const World& w, fs::path root) : w_(w), root_(std::move(root)) {}

  // Writes one captured page plus any quirked re-fetches of it.
  void page(Side side, const Scrape& sc, const std::string& name, const std::string& body, PageClass cls,
            std::optional<DateTime> mtime = std::nullopt) {
    const std::string rel = scrape_dir(side, sc) + "/" + name;
    const DateTime t = mtime ? *mtime : base_time(sc, rel);
    emit(side, sc, rel, body, cls, Quirk::None, t);
    if (!mtime) quirks(side, sc, rel, body, cls);
  }

  // A second capture of the same URL.
  void duplicate(Side side, const Scrape& sc, const std::string& name, const std::string& body, PageClass cls,
                 DateTime mtime) {
    const std::string rel = scrape_dir(side, sc) + "/" + name;
    emit(side, sc, next_suffix(rel), body, cls, Quirk::None, mtime);
  }

  void irrelevant(Side side, const Scrape& sc, const std::string& name, const std::string& body) {
    const std::string rel = scrape_dir(side, sc) + "/" + name;
    emit(side, sc, rel, body, PageClass::Irrelevant, Quirk::None, base_time(sc, rel));
  }

  DateTime base_time(const Scrape& sc, const std::string& key) const {
    return sc.lo + Seconds(w_.keyed.between("t/" + key, 0, (sc.hi - sc.lo).count()));
  }
  DateTime window_time(const Scrape& sc, const std::string& key) const {
    return sc.lo + Seconds(w_.keyed.between(key, 0, (sc.hi - sc.lo).count()));
  }

  RenderStats stats;

 private:
  static std::string scrape_dir(Side side, const Scrape& sc) {
    return fmt::format("{}/{}", to_string(side), format_date(sc.date));
  }

  std::string next_suffix(const std::string& rel) {
    int& n = suffix_[rel];
    return fmt::format("{}.{}", rel, ++n);
  }

  void quirks(Side side, const Scrape& sc, const std::string& rel, const std::string& body, PageClass cls) {
    for (const auto& [q, rate] : w_.profile.quirk_rates) {
      if (rate <= 0) continue;
      if (side == Side::Forum && (q == Quirk::LoggedOut || q == Quirk::Obscured)) continue;
      if (!w_.keyed.chance(fmt::format("q/{}/{}", rel, to_string(q)), rate)) continue;
      std::string content;
      switch (q) {
        case Quirk::Empty: content = "\n"; break;
        case Quirk::ErrorPage: content = "<html><body><h1>502 Bad Gateway</h1><hr><center>nginx</center></body></html>\n"; break;
        case Quirk::Partial: {
          const std::string_view end = side == Side::Forum ? "id=\"brdfooter\"" : "<footer";
          content = body.substr(0, body.find(end) / 2);
          break;
        }
        case Quirk::LoggedOut:
          content = "<html><body><p>You must be logged in to view this page</p><footer></footer></body></html>\n";
          break;
        case Quirk::Obscured:
          content = "<html><body><h1>Welcome to Evolution!</h1><footer></footer></body></html>\n";
          break;
        case Quirk::None: break;
      }
      emit(side, sc, next_suffix(rel), content, cls, q, window_time(sc, fmt::format("qt/{}/{}", rel, to_string(q))));
    }
  }

  void emit(Side side, const Scrape& sc, const std::string& rel, const std::string& body, PageClass cls, Quirk q,
            DateTime t) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    {
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      out << body;
      if (!out) throw InputError(fmt::format("cannot write {}", p.string()));
    }
    set_file_mtime(p, t);
    stats.files.push_back({side, sc.id, rel, cls, q, t});
    if (q == Quirk::None && cls != PageClass::Irrelevant) ++(side == Side::Forum ? stats.forum_pages : stats.market_pages);
  }

  const World& w_;
  fs::path root_;
  std::map<std::string, int> suffix_;
};

// ---------------------------------------------------------------- forum

constexpr std::string_view kForumHead =
    "<!DOCTYPE html>\n<html lang=\"en\"><head><meta charset=\"utf-8\" /><title>{}</title></head>\n"
    "<body>\n<div id=\"punwrap\"><div id=\"brdheader\" class=\"block\"><h1>Evolution Forums</h1></div>\n"
    "<div id=\"brdmain\">\n";
constexpr std::string_view kForumFoot =
    "</div>\n<div id=\"brdfooter\" class=\"block\"><p>Powered by FluxBB</p></div>\n</div>\n</body>\n</html>\n";

std::string forum_head(std::string_view title) { return fmt::format(fmt::runtime(kForumHead), esc(title)); }

std::string pagination(std::string_view base, int64_t current, int64_t pages) {
  std::string s = "<p class=\"pagelink conl\"><span class=\"pages-label\">Pages: </span>";
  for (int64_t i = 1; i <= pages; ++i) {
    if (i == current) s += fmt::format("<strong class=\"item1\">{}</strong> ", i);
    else if (i == 1) s += fmt::format("<a href=\"{}\">1</a> ", base);
    else s += fmt::format("<a href=\"{}&amp;p={}\">{}</a> ", base, i, i);
  }
  return s + "</p>";
}

std::string page_name(std::string_view script, int64_t id, int64_t page) {
  return page == 1 ? fmt::format("{}?id={}", script, id) : fmt::format("{}?id={}&p={}", script, id, page);
}

struct ForumRender {
  const World& w;
  Writer& out;
  const Scrape& sc;

  const DateTime c() const { return sc.cutoff; }

  std::vector<const Topic*> topics_in(int64_t fid) const {
    std::vector<const Topic*> v;
    for (const auto& t : w.topics)
      if (w.topic_exists(t, c()) && t.fid_at(c()) == fid) v.push_back(&t);
    return v;
  }
  std::vector<const Topic*> moved_from(int64_t fid) const {
    std::vector<const Topic*> v;
    for (const auto& t : w.topics)
      if (w.topic_exists(t, c()) && t.fid == fid && t.fid_at(c()) != fid) v.push_back(&t);
    return v;
  }

  void index() {
    std::string s = forum_head("Evolution Forums");
    std::vector<std::string> cats;
    for (const auto& f : w.fora)
      if (std::find(cats.begin(), cats.end(), f.category) == cats.end()) cats.push_back(f.category);
    int n = 0;
    for (const auto& cat : cats) {
      s += fmt::format("<div id=\"idx{}\" class=\"blocktable\"><h2><span>{}</span></h2><div class=\"box\"><div "
                       "class=\"inbox\"><table>\n<thead><tr><th class=\"tcl\">Forum</th><th class=\"tc2\">Topics</th>"
                       "<th class=\"tc3\">Posts</th></tr></thead>\n<tbody>\n",
                       ++n, esc(cat));
      for (const auto& f : w.fora) {
        if (f.category != cat) continue;
        int64_t topics = 0, posts = 0;
        for (const Topic* t : topics_in(f.fid)) {
          ++topics;
          posts += w.posts_at(*t, c());
        }
        s += fmt::format("<tr class=\"rowodd\"><td class=\"tcl\"><div class=\"tclcon\"><div><h3><a "
                         "href=\"viewforum.php?id={}\">{}</a></h3><div class=\"forumdesc\">{}</div></div></div></td>"
                         "<td class=\"tc2\">{}</td><td class=\"tc3\">{}</td></tr>\n",
                         f.fid, esc(f.title), esc(f.description), with_commas(topics), with_commas(posts));
      }
      s += "</tbody>\n</table></div></div></div>\n";
    }
    int64_t topics = 0, posts = 0, users = 0;
    for (const auto& t : w.topics)
      if (w.topic_exists(t, c())) {
        ++topics;
        posts += w.posts_at(t, c());
      }
    for (const auto& u : w.users) users += u.registered <= c();
    if (w.hidden_active) {
      for (const auto& [id, at_t] : w.hidden_topics) topics += at_t <= c();
      for (const auto& [id, at_t] : w.hidden_posts) posts += at_t <= c();
      for (const auto& [id, at_t] : w.hidden_users) users += at_t <= c();
    }
    s += fmt::format("<div id=\"brdstats\" class=\"block\"><h2><span>Board information</span></h2><div class=\"box\">"
                     "<div class=\"inbox\"><dl class=\"conr\"><dt><strong>Board statistics</strong></dt>\n"
                     "<dd><span>Total number of registered users: <strong>{}</strong></span></dd>\n"
                     "<dd><span>Total number of topics: <strong>{}</strong></span></dd>\n"
                     "<dd><span>Total number of posts: <strong>{}</strong></span></dd>\n</dl></div></div></div>\n",
                     with_commas(users), with_commas(topics), with_commas(posts));
    s += kForumFoot;
    out.page(Side::Forum, sc, "index.php", s, PageClass::ForumIndex);
  }

  void viewforum(const Forum& f) {
    struct Row {
      const Topic* t;
      bool moved;
      DateTime last;
    };
    std::vector<Row> rows;
    for (const Topic* t : topics_in(f.fid)) rows.push_back({t, false, w.last_post_at(*t, c())->at});
    for (const Topic* t : moved_from(f.fid)) rows.push_back({t, true, w.last_post_at(*t, c())->at});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return std::tie(b.last, b.t->tid) < std::tie(a.last, a.t->tid);
    });
    constexpr std::size_t kPerPage = 25;
    const int64_t pages = std::max<int64_t>(1, static_cast<int64_t>((rows.size() + kPerPage - 1) / kPerPage));
    auto conflict = w.views_conflicts.find({f.fid, sc.id});
    for (int64_t page = 1; page <= pages; ++page) {
      auto render = [&](int64_t views_drop) {
        std::string s = forum_head(f.title);
        const std::string base = fmt::format("viewforum.php?id={}", f.fid);
        s += "<div class=\"linkst\"><div class=\"inbox\">" + pagination(base, page, pages) +
             fmt::format("<ul class=\"crumbs\"><li><a href=\"index.php\">Index</a></li><li><span>&raquo;&#160;</span>"
                         "<strong><a href=\"viewforum.php?id={}\">{}</a></strong></li></ul></div></div>\n",
                         f.fid, esc(f.title));
        s += fmt::format("<div id=\"vf\" class=\"blocktable\"><h2><span>{}</span></h2><div class=\"box\"><div "
                         "class=\"inbox\"><table>\n<thead><tr><th class=\"tcl\">Topic</th><th class=\"tc2\">Replies</th>"
                         "<th class=\"tc3\">Views</th><th class=\"tcr\">Last post</th></tr></thead>\n<tbody>\n",
                         esc(f.title));
        const std::size_t lo = static_cast<std::size_t>(page - 1) * kPerPage;
        for (std::size_t i = lo; i < std::min(rows.size(), lo + kPerPage); ++i) {
          const Topic& t = *rows[i].t;
          const Post& first = w.posts[t.posts.front()];
          const std::string first_name = esc(w.user(first.uid).name);
          if (rows[i].moved) {
            s += fmt::format("<tr class=\"row{} imoved\"><td class=\"tcl\"><div class=\"icon\"><div class=\"nosize\">{}"
                             "</div></div><div class=\"tclcon\"><div><span class=\"movedtext\">Moved:</span> <a "
                             "href=\"viewtopic.php?id={}\">{}</a> <span class=\"byuser\">by {}</span></div></div></td>"
                             "<td class=\"tc2\">&#160;</td><td class=\"tc3\">&#160;</td><td class=\"tcr\">&#160;</td></tr>\n",
                             i % 2 ? "even" : "odd", i + 1, t.tid, esc(t.title), first_name);
            continue;
          }
          const Post& last = *w.last_post_at(t, c());
          const int64_t views = std::max<int64_t>(0, w.views_at(t, c()) - views_drop);
          s += fmt::format("<tr class=\"row{}{}\"><td class=\"tcl\"><div class=\"icon\"><div class=\"nosize\">{}</div>"
                           "</div><div class=\"tclcon\"><div><a href=\"viewtopic.php?id={}\">{}</a> <span "
                           "class=\"byuser\">by {}</span></div></div></td><td class=\"tc2\">{}</td><td class=\"tc3\">{}"
                           "</td><td class=\"tcr\"><a href=\"viewtopic.php?pid={}#p{}\">{}</a> <span class=\"byuser\">"
                           "by {}</span></td></tr>\n",
                           i % 2 ? "even" : "odd", w.is_closed(t, c()) ? " iclosed" : "", i + 1, t.tid, esc(t.title),
                           first_name, with_commas(w.posts_at(t, c()) - 1), with_commas(views), last.pid, last.pid,
                           datetime_label(last.at), esc(w.user(last.uid).name));
        }
        s += "</tbody>\n</table></div></div></div>\n";
        s += kForumFoot;
        return s;
      };
      const std::string name = page_name("viewforum.php", f.fid, page);
      out.page(Side::Forum, sc, name, render(0), PageClass::ViewForum);
      if (conflict != w.views_conflicts.end())
        out.duplicate(Side::Forum, sc, name,
                      render(w.keyed.between(fmt::format("vd/{}/{}", sc.id, f.fid), 1, 10)), PageClass::ViewForum,
                      out.window_time(sc, fmt::format("vdt/{}/{}/{}", sc.id, f.fid, page)));
    }
  }

  std::string post_label(const Post& p, Labels mode, DateTime retrieval) const {
    const Date d = date_of(p.at);
    const std::string tm = format_time(time_of(p.at));
    const Date rd = date_of(retrieval);
    switch (mode) {
      case Labels::Absolute: break;
      case Labels::RelativeTodayTomorrow:
        if (d == rd)
          return (w.keyed.chance(fmt::format("tt/{}/{}", sc.id, p.pid), 0.5) ? "Tomorrow " : "Today ") + tm;
        if (d == rd - std::chrono::days(1)) return "Yesterday " + tm;
        break;
      case Labels::MidnightToday:
        if (d == sc.date - std::chrono::days(1)) return "Today " + tm;
        break;
      case Labels::SevenDay:
        if (d == sc.date - std::chrono::days(1)) return "Yesterday " + tm;
        break;
    }
    return datetime_label(p.at);
  }

  std::string viewtopic_page(const Topic& t, int64_t page, int64_t pages, const std::string& title, Labels mode,
                             DateTime retrieval) const {
    const Forum& f = *std::find_if(w.fora.begin(), w.fora.end(),
                                   [&](const Forum& x) { return x.fid == t.fid_at(c()); });
    std::string s = forum_head(title);
    const std::string base = fmt::format("viewtopic.php?id={}", t.tid);
    s += fmt::format("<div class=\"linkst\"><div class=\"inbox crumbsplus\"><ul class=\"crumbs\"><li><a "
                     "href=\"index.php\">Index</a></li><li><span>&raquo;&#160;</span><a href=\"viewforum.php?id={}\">{}"
                     "</a></li><li><span>&raquo;&#160;</span><strong><a href=\"viewtopic.php?id={}\">{}</a></strong>"
                     "</li></ul><div class=\"pagepost\">{}</div></div></div>\n",
                     f.fid, esc(f.title), t.tid, esc(title), pagination(base, page, pages));
    const auto per = static_cast<std::size_t>(w.profile.posts_per_page);
    const auto n = static_cast<std::size_t>(w.posts_at(t, c()));
    const std::size_t lo = static_cast<std::size_t>(page - 1) * per;
    for (std::size_t i = lo; i < std::min(n, lo + per); ++i) {
      const Post& p = w.posts[t.posts[i]];
      const User& u = w.user(p.uid);
      const bool edited = p.edited_at && *p.edited_at <= c();
      std::string msg = edited ? p.edited_text : p.text;
      if (edited)
        msg += fmt::format("\n<p class=\"postedit\"><em>Last edited by {} ({})</em></p>", esc(u.name),
                           datetime_label(*p.edited_at));
      std::string sig;
      if (!u.signature.empty())
        sig = fmt::format("<div class=\"postsignature postmsg\"><hr />{}</div>", u.signature);
      s += fmt::format(
          "<div id=\"p{}\" class=\"blockpost row{}{}\"><h2><span><span class=\"conr\">#{}</span> <a "
          "href=\"viewtopic.php?pid={}#p{}\">{}</a></span></h2><div class=\"box\"><div class=\"inbox\"><div "
          "class=\"postbody\"><div class=\"postleft\"><dl><dt><strong><a href=\"profile.php?id={}\">{}</a></strong>"
          "</dt><dd class=\"usertitle\"><strong>{}</strong></dd><dd class=\"postavatar\"></dd><dd><span>Registered: {}"
          "</span></dd><dd><span>Posts: {}</span></dd></dl></div><div class=\"postright\"><h3>Re: {}</h3><div "
          "class=\"postmsg\">\n{}\n</div>{}</div></div></div></div></div>\n",
          p.pid, i % 2 ? "even" : "odd", i == 0 ? " firstpost" : "", p.position + p.label_shift, p.pid, p.pid,
          post_label(p, mode, retrieval), u.uid, esc(u.name), esc(w.user_title_at(u, c())),
          format_date(date_of(u.registered)), with_commas(w.user_posts_at(u, c())), esc(title), msg, sig);
    }
    s += kForumFoot;
    return s;
  }

  void viewtopic(const Topic& t) {
    const auto per = w.profile.posts_per_page;
    const int64_t n = w.posts_at(t, c());
    const int64_t pages = std::max<int64_t>(1, (n + per - 1) / per);
    const auto an = w.profile.anomalies;
    auto conflict = w.title_conflicts.find({t.tid, sc.id});
    const std::string dup_title = conflict != w.title_conflicts.end() ? conflict->second.title : t.title;
    for (int64_t page = 1; page <= pages; ++page) {
      const std::string name = page_name("viewtopic.php", t.tid, page);
      const std::string key = fmt::format("{}/{}", sc.id, name);
      out.page(Side::Forum, sc, name, viewtopic_page(t, page, pages, t.title, Labels::Absolute, sc.lo), PageClass::ViewTopic);
      if (an.today_tomorrow_dates && w.keyed.chance("att/" + key, 0.3)) {
        const DateTime r = out.window_time(sc, "attt/" + key);
        out.duplicate(Side::Forum, sc, name, viewtopic_page(t, page, pages, dup_title, Labels::RelativeTodayTomorrow, r),
                      PageClass::ViewTopic, r);
      }
      if (an.midnight_offset && w.keyed.chance("amo/" + key, 0.5)) {
        const DateTime r = at(sc.date, 30min);
        out.duplicate(Side::Forum, sc, name, viewtopic_page(t, page, pages, dup_title, Labels::MidnightToday, r),
                      PageClass::ViewTopic, r);
      }
      if (an.seven_day_mtime_fault && w.keyed.chance("asd/" + key, 0.2)) {
        const DateTime r = at(sc.date + std::chrono::days(7), Seconds(w.keyed.between("asdt/" + key, 0, 86399)));
        out.duplicate(Side::Forum, sc, name, viewtopic_page(t, page, pages, dup_title, Labels::SevenDay, r),
                      PageClass::ViewTopic, r);
      }
      if (conflict != w.title_conflicts.end() && page == 1) {
        const DateTime r = at(sc.date, 18h);
        out.duplicate(Side::Forum, sc, name, viewtopic_page(t, page, pages, dup_title, Labels::Absolute, r),
                      PageClass::ViewTopic, r);
      }
    }
  }

  std::string profile_page(const User& u, std::string_view title, int64_t num_posts, bool seven_day) const {
    std::string last = "Never";
    if (auto lp = w.user_last_post_at(u, c())) {
      last = datetime_label(*lp);
      if (seven_day && date_of(*lp) == sc.date - std::chrono::days(1)) last = "Yesterday " + format_time(time_of(*lp));
    }
    std::string s = forum_head(fmt::format("Profile of {}", w.profile_name(u, sc.id)));
    s += fmt::format(
        "<div id=\"viewprofile\" class=\"block\"><h2><span>Profile</span></h2><div class=\"box\"><div "
        "class=\"fakeform\">\n<div class=\"inform\"><fieldset><legend>Personal</legend><div class=\"infldset\"><dl>\n"
        "<dt>Username: </dt><dd>{}</dd>\n<dt>Title: </dt><dd>{}</dd>\n<dt>Location: </dt><dd>{}</dd>\n"
        "</dl></div></fieldset></div>\n<div class=\"inform\"><fieldset><legend>Activity</legend><div "
        "class=\"infldset\"><dl>\n<dt>Posts: </dt><dd>{} - <a href=\"search.php?action=show_user_posts&amp;user_id={}\">"
        "Show all posts</a></dd>\n<dt>Last post: </dt><dd>{}</dd>\n<dt>Registered: </dt><dd>{}</dd>\n"
        "</dl></div></fieldset></div>\n</div></div></div>\n",
        esc(w.profile_name(u, sc.id)), esc(title), esc(u.location), with_commas(num_posts), u.uid, last,
        format_date(date_of(u.registered)));
    s += kForumFoot;
    return s;
  }

  void profile(const User& u) {
    const std::string name = fmt::format("profile.php?id={}", u.uid);
    const std::string title = w.user_title_at(u, c());
    const int64_t posts = w.user_posts_at(u, c());
    out.page(Side::Forum, sc, name, profile_page(u, title, posts, false), PageClass::Profile);
    if (auto it = w.profile_conflicts.find({u.uid, sc.id}); it != w.profile_conflicts.end())
      out.duplicate(Side::Forum, sc, name,
                    profile_page(u, it->second.title, std::max<int64_t>(0, posts - it->second.num_posts_drop), false),
                    PageClass::Profile, out.window_time(sc, fmt::format("pct/{}/{}", sc.id, u.uid)));
    if (w.profile.anomalies.seven_day_mtime_fault && w.keyed.chance(fmt::format("asp/{}/{}", sc.id, u.uid), 0.3))
      out.duplicate(Side::Forum, sc, name, profile_page(u, title, posts, true), PageClass::Profile,
                    at(sc.date + std::chrono::days(7), Seconds(w.keyed.between(fmt::format("aspt/{}/{}", sc.id, u.uid), 0, 86399))));
  }

  void run() {
    index();
    for (const auto& f : w.fora)
      if (w.viewforum_captured(sc.id, f.fid)) viewforum(f);
    for (const auto& t : w.topics)
      if (w.topic_exists(t, c()) && w.viewtopic_captured(sc.id, t.tid)) viewtopic(t);
    for (const auto& u : w.users)
      if (u.registered <= c() && w.profile_captured(sc.id, u.uid)) profile(u);
    out.irrelevant(Side::Forum, sc, "extern.php?action=feed&type=rss",
                   "<?xml version=\"1.0\"?><rss version=\"2.0\"><channel></channel></rss>\n");
  }
};

// ---------------------------------------------------------------- market

constexpr std::string_view kMarketFoot = "</div>\n<footer class=\"footer\"><p>Evolution</p></footer>\n</body>\n</html>\n";

std::string market_head(std::string_view title) {
  return fmt::format("<!DOCTYPE html>\n<html><head><title>{} | Evolution</title></head>\n<body>\n<div "
                     "class=\"container\">\n",
                     esc(title));
}

struct MarketRender {
  const World& w;
  Writer& out;
  const Scrape& sc;

  DateTime c() const { return sc.cutoff; }

  std::string breadcrumb(int64_t cid) const {
    std::string s = "<ol class=\"breadcrumb\">";
    for (auto id : w.chain_at(cid, sc.id))
      s += fmt::format("<li><a href=\"/category/{}\">{}</a></li>", id, esc(w.category_view(id, sc.id).name));
    return s + "</ol>\n";
  }

  bool in_subtree(int64_t cid, int64_t root) const {
    for (auto id : w.chain_at(cid, sc.id))
      if (id == root) return true;
    return false;
  }

  std::string row(const Listing& l, int64_t shown_lid, const std::string& title, bool vendor_link, bool category_link) const {
    const Vendor& v = w.vendor(l.vid);
    std::string s = fmt::format("<div class=\"listing-row\" data-lid=\"{}\"><a href=\"/listing/{}\">{}</a>", shown_lid,
                                shown_lid, esc(title));
    if (vendor_link) s += fmt::format(" <a href=\"/vendor/{}\">{}</a>", v.vid, esc(v.name));
    if (category_link) s += fmt::format(" <a href=\"/category/{}\">{}</a>", l.cid, esc(w.category_view(l.cid, sc.id).name));
    s += fmt::format(" <span class=\"class\">{}</span> <span class=\"price\">BTC {}</span></div>\n", l.product_class, l.price);
    return s;
  }

  void category(const Category& cat) {
    std::string s = market_head(w.category_view(cat.cid, sc.id).name) + breadcrumb(cat.cid);
    s += fmt::format("<div class=\"category\" data-cid=\"{}\"><h1>{}</h1>\n", cat.cid,
                     esc(w.category_view(cat.cid, sc.id).name));
    const auto children = w.children_at(cat.cid, sc.id);
    if (!children.empty()) {
      s += "<ul class=\"subcategories\">";
      for (auto id : children)
        s += fmt::format("<li><a href=\"/category/{}\">{}</a></li>", id, esc(w.category_view(id, sc.id).name));
      s += "</ul>\n";
    }
    for (const auto& l : w.listings)
      if (w.listing_active(l, c()) && in_subtree(l.cid, cat.cid)) s += row(l, l.lid, l.title, true, false);
    s += "</div>\n";
    s += kMarketFoot;
    out.page(Side::Market, sc, fmt::format("category/{}.html", cat.cid), s, PageClass::MarketCategory);
  }

  void store(const Vendor& v) {
    std::string s = market_head(v.name);
    s += fmt::format("<div class=\"store\" data-vid=\"{}\"><h1 class=\"store-name\">{}</h1>\n", v.vid, esc(v.name));
    for (const auto& l : w.listings) {
      if (l.vid != v.vid || !w.listing_active(l, c())) continue;
      int64_t shown = l.lid;
      bool off = false;
      for (const auto& o : w.off_by_one)
        if (o.lid == l.lid && o.mscrape == sc.id) {
          shown = o.shown;
          off = true;
        }
      std::string title = l.title;
      if (!off && w.profile.anomalies.substring_titles && w.keyed.chance(fmt::format("ss/{}/{}", sc.id, l.lid), 0.3))
        title = l.short_title;
      s += row(l, shown, title, false, true);
    }
    s += "</div>\n";
    s += kMarketFoot;
    out.page(Side::Market, sc, fmt::format("store/{}.html", v.vid), s, PageClass::MarketStore);
  }

  void listing(const Listing& l, ListingFormat f) {
    const Vendor& v = w.vendor(l.vid);
    std::string s = market_head(l.title) + breadcrumb(l.cid);
    const auto approval = v.approval(c());
    s += fmt::format("<div class=\"listing\" data-lid=\"{}\"><h1 class=\"listing-title\">{}</h1>\n", l.lid, esc(l.title));
    s += fmt::format("<div class=\"seller-info\"><a href=\"/vendor/{}\">{}</a> <span class=\"rank\">{}</span> <span "
                     "class=\"sales\">{}</span> <span class=\"approval\">{}</span></div>\n",
                     v.vid, esc(v.name), w.rank_at(v, sc), with_commas(v.sales(c())), approval.value_or("n/a"));
    s += fmt::format("<div class=\"price\">BTC {}</div>\n<dl class=\"details\"><dt>Class</dt><dd>{}</dd><dt>Ships "
                     "From</dt><dd>{}</dd>",
                     l.price, l.product_class, esc(l.ships_from));
    if (f == ListingFormat::Generic) s += fmt::format("<dt>Ships To</dt><dd>{}</dd>", esc(l.ships_to));
    s += fmt::format("<dt>Availability</dt><dd>{}</dd></dl>\n", w.availability(sc.id, l.lid) ? "Available" : "Unavailable");
    std::string name;
    switch (f) {
      case ListingFormat::Generic:
        s += fmt::format("<div class=\"product-description\">\n{}\n</div>\n", l.description);
        name = fmt::format("listing/{}.html", l.lid);
        break;
      case ListingFormat::ReturnPolicy:
        s += fmt::format("<div class=\"return-policy\">\n{}\n</div>\n", l.return_policy);
        name = fmt::format("listing/{}-return-policy.html", l.lid);
        break;
      case ListingFormat::Feedback:
        s += "<table class=\"table feedback\">\n<tr><th>User</th><th>Date</th><th>Message</th></tr>\n";
        for (const auto& e : l.feedback) {
          if (e.at > c()) continue;
          s += fmt::format("<tr><td class=\"fb-user\">{}</td><td class=\"fb-date\">{}</td><td "
                           "class=\"fb-message\">{}</td></tr>\n",
                           esc(e.user), format_date(date_of(e.at)), esc(e.message));
        }
        s += "</table>\n";
        name = fmt::format("listing/{}-feedback.html", l.lid);
        break;
    }
    s += "</div>\n";
    s += kMarketFoot;
    const PageClass cls = f == ListingFormat::Generic  ? PageClass::MarketListingGeneric
                          : f == ListingFormat::Feedback ? PageClass::MarketListingFeedback
                                                         : PageClass::MarketListingReturnPolicy;
    out.page(Side::Market, sc, name, s, cls);
  }

  std::string vendor_page(const Vendor& v, VendorFormat f, int64_t sales) const {
    std::string s = market_head(v.name);
    s += fmt::format("<div class=\"vendor-profile\" data-vid=\"{}\"><h1 class=\"vendor-name\">{}</h1>\n", v.vid, esc(v.name));
    if (v.disabled(c())) {
      s += "<p class=\"alert\">This vendor has been disabled.</p>\n</div>\n";
      return s + std::string(kMarketFoot);
    }
    s += fmt::format("<span class=\"rank\">{}</span> <span class=\"sales\">{}</span>\n<div class=\"feedback-summary\">"
                     "<span class=\"positive\">{}</span> <span class=\"neutral\">{}</span> <span "
                     "class=\"negative\">{}</span></div>\n",
                     w.rank_at(v, sc), with_commas(sales), with_commas(v.positive(c())), with_commas(v.neutral(c())),
                     with_commas(v.negative(c())));
    switch (f) {
      case VendorFormat::LegacySales: s += fmt::format("<div class=\"legacy-sales\">\n{}\n</div>\n", v.legacy); break;
      case VendorFormat::Pgp: s += fmt::format("<pre class=\"pgp-key\">{}</pre>\n", v.pgp); break;
      case VendorFormat::ReturnPolicy: s += fmt::format("<div class=\"return-policy\">\n{}\n</div>\n", v.return_policy); break;
      default: break;
    }
    s += "</div>\n";
    return s + std::string(kMarketFoot);
  }

  void vendor(const Vendor& v) {
    static const std::pair<VendorFormat, std::pair<const char*, PageClass>> kFormats[] = {
        {VendorFormat::Generic, {"", PageClass::VendorProfileGeneric}},
        {VendorFormat::Feedback, {"-feedback", PageClass::VendorProfileFeedback}},
        {VendorFormat::LegacySales, {"-legacy-sales", PageClass::VendorProfileLegacySales}},
        {VendorFormat::Pgp, {"-pgp", PageClass::VendorProfilePgp}},
        {VendorFormat::ReturnPolicy, {"-return-policy", PageClass::VendorProfileReturnPolicy}},
    };
    const bool disabled = v.disabled(c());
    for (const auto& [f, meta] : kFormats) {
      if (disabled && f != VendorFormat::Generic) continue;
      if (!w.vendor_captured(sc.id, v.vid, f)) continue;
      const std::string name = fmt::format("vendor/{}{}.html", v.vid, meta.first);
      out.page(Side::Market, sc, name, vendor_page(v, f, v.sales(c())), meta.second);
      if (f == VendorFormat::Generic)
        if (auto it = w.sales_conflicts.find({v.vid, sc.id}); it != w.sales_conflicts.end())
          out.duplicate(Side::Market, sc, name, vendor_page(v, f, it->second.sales), meta.second, at(sc.date, 18h));
    }
  }

  void run() {
    for (const auto& cat : w.categories)
      if (w.category_view(cat.cid, sc.id).shown) category(cat);
    for (const auto& v : w.vendors) {
      if (!w.vendor_exists(v, c())) continue;
      if (!v.disabled(c()) && w.store_captured(sc.id, v.vid)) store(v);
      vendor(v);
    }
    for (const auto& l : w.listings) {
      if (!w.listing_active(l, c())) continue;
      for (auto f : {ListingFormat::Generic, ListingFormat::Feedback, ListingFormat::ReturnPolicy})
        if (w.listing_captured(sc.id, l.lid, f)) listing(l, f);
    }
    out.irrelevant(Side::Market, sc, "index.html", "<html><body><a href=\"/login\">Login</a></body></html>\n");
  }
};

}  // namespace

RenderStats render_corpus(const World& w, const fs::path& corpus_root) {
  Writer out(w, corpus_root);
  for (const auto& sc : w.fscrapes) ForumRender{w, out, sc}.run();
  for (const auto& sc : w.mscrapes) MarketRender{w, out, sc}.run();
  auto stats = std::move(out.stats);
  std::sort(stats.files.begin(), stats.files.end(),
            [](const FileRecord& a, const FileRecord& b) { return a.path < b.path; });
  return stats;
}

}  // namespace dnm::synth
