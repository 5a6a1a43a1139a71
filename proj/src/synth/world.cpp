#include <fmt/format.h>

#include <numeric>

#include "dnmetl/error.hpp"
#include "model.hpp"

namespace dnm::synth {

namespace {

using namespace std::chrono_literals;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

const std::vector<std::string> kAdjectives{"silent", "dark",  "lucky", "crypto", "blue",  "rapid", "hidden", "frosty",
                                           "red",    "lazy",  "night", "green",  "quiet", "wild",  "solar",  "iron"};
const std::vector<std::string> kNouns{"fox",    "owl",   "panda", "tiger", "ghost", "rabbit", "falcon", "wolf",
                                      "otter",  "badger", "raven", "viper", "moose", "lynx",  "koala",  "hawk"};
const std::vector<std::string> kWords{"shipping", "stealth", "quality", "vendor",  "order",   "package", "review",
                                      "price",    "batch",   "escrow",  "tracking", "fast",   "great",   "thanks",
                                      "recommend", "product", "arrived", "week",    "sample",  "reship",  "safe",
                                      "pgp",      "wallet",  "bitcoin", "update",  "question", "harm",   "dose"};
const std::vector<std::string> kCountries{"Germany", "Netherlands", "United Kingdom", "United States",
                                          "Canada",  "Australia",   "Belgium",        "Spain"};
const std::vector<std::string> kForumTitles{"Announcements",  "Newbie Questions", "Drug Safety",   "Vendor Reviews",
                                            "Security",       "Off Topic Chat",   "Market Talk",   "Scam Reports"};
const std::vector<std::string> kForumCategories{"General", "Marketplace", "Community"};
const std::vector<std::pair<const char*, double>> kTitles{
    {"Member", 0.78}, {"Vendor", 0.07}, {"Moderator", 0.02}, {"Troll", 0.02},
    {"Resident Medical Expert", 0.01}, {"Public Relations", 0.01}, {"Sports Fan", 0.03}, {"Guest", 0.02},
    {"Forum Moderator", 0.02}, {"Sports Referee", 0.02}};
const std::vector<std::string> kProducts{"Blue Dream", "MDMA Crystal", "LSD Tabs", "Ketamine", "Xanax Bars",
                                         "Speed Paste", "Cocaine", "Heroin No4", "Vaporizer", "Guide Bundle",
                                         "VPN Account", "Hash"};

DateTime at_dt(Date d, int h, int m = 0, int s = 0) { return at(d, std::chrono::hours(h) + std::chrono::minutes(m) + Seconds(s)); }

DateTime uniform_time(Rng& r, DateTime lo, DateTime hi) {
  if (hi <= lo) return lo;
  return lo + Seconds(r.between(0, (hi - lo).count()));
}

std::string words(Rng& r, int lo, int hi) {
  std::string s;
  const auto n = r.between(lo, hi);
  for (int64_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += r.pick(kWords);
  }
  return s;
}

std::string unique_name(Rng& r, std::set<std::string>& taken) {
  for (;;) {
    std::string n = fmt::format("{}_{}{}", r.pick(kAdjectives), r.pick(kNouns), r.between(1, 999));
    if (taken.insert(n).second) return n;
  }
}

std::vector<Scrape> make_scrapes(int n, Date first, Date last) {
  const auto span = (last - first).count();
  const auto step = n > 1 ? span / (n - 1) : 0;
  if (n > 1 && step < 10)
    throw UsageError(fmt::format("{} scrapes need at least {} days between first and last scrape", n, 10 * (n - 1)));
  std::vector<Scrape> out;
  for (int i = 0; i < n; ++i) {
    Scrape s;
    s.id = i + 1;
    s.date = first + std::chrono::days(i * step);
    s.cutoff = at_dt(s.date - std::chrono::days(1), 6);
    s.lo = s.cutoff;
    s.hi = at_dt(s.date, 17, 59, 59);
    out.push_back(s);
  }
  return out;
}

// Hands out ascending ids, leaving reserved slots behind. The second id is
// always preceded by one reserved slot so every id space has a gap.
class IdAllocator {
 public:
  IdAllocator(Rng& r, double rate) : r_(r), rate_(rate) {}
  template <class F>
  int64_t next(F&& on_reserved) {
    const bool force = issued_ == 1;
    while (force ? reserved_here_ == 0 : r_.chance(rate_)) {
      on_reserved(next_id_);
      ++next_id_;
      ++reserved_here_;
      if (force) break;
    }
    reserved_here_ = 0;
    ++issued_;
    return next_id_++;
  }

 private:
  Rng& r_;
  double rate_;
  int64_t next_id_ = 1;
  int64_t issued_ = 0;
  int reserved_here_ = 0;
};

constexpr std::int64_t kLeafCategories[] = {2, 4, 5, 6, 7, 8, 10, 11, 12, 13};

}  // namespace

double Keyed::uniform(std::string_view key) const {
  return static_cast<double>(splitmix(seed_ ^ splitmix(fnv1a(key))) >> 11) * 0x1.0p-53;
}

std::string pct_label(int64_t basis) { return fmt::format("{}.{:02}%", basis / 100, basis % 100); }

int64_t Vendor::sales(DateTime t) const {
  if (t < joined) return 0;
  const double days = static_cast<double>((t - joined).count()) / 86400.0;
  return static_cast<int64_t>(days * sales_per_day);
}

std::optional<std::string> Vendor::approval(DateTime t) const {
  const int64_t pos = positive(t), tot = positive(t) + neutral(t) + negative(t);
  if (tot == 0) return std::nullopt;
  return pct_label((pos * 20000 + tot) / (2 * tot));
}

int64_t World::posts_at(const Topic& t, DateTime c) const {
  auto it = std::upper_bound(t.posts.begin(), t.posts.end(), c,
                             [&](DateTime v, std::size_t i) { return v < posts[i].at; });
  return it - t.posts.begin();
}

const Post* World::last_post_at(const Topic& t, DateTime c) const {
  const auto n = posts_at(t, c);
  return n ? &posts[t.posts[static_cast<std::size_t>(n - 1)]] : nullptr;
}

int64_t World::views_at(const Topic& t, DateTime c) const {
  const double days = static_cast<double>((c - t.created(posts)).count()) / 86400.0;
  return t.views_base + static_cast<int64_t>(std::max(0.0, days) * t.views_per_day) + 3 * posts_at(t, c);
}

int64_t World::user_posts_at(const User& u, DateTime c) const {
  return std::upper_bound(u.post_times.begin(), u.post_times.end(), c) - u.post_times.begin();
}

std::optional<DateTime> World::user_last_post_at(const User& u, DateTime c) const {
  const auto n = user_posts_at(u, c);
  if (n == 0) return std::nullopt;
  return u.post_times[static_cast<std::size_t>(n - 1)];
}

std::string World::user_title_at(const User& u, DateTime c) const {
  return u.banned_at && c >= *u.banned_at ? "Banned" : u.title;
}

std::string World::profile_name(const User& u, int scrape) const {
  return !u.alt_name.empty() && scrape >= u.alt_from ? u.alt_name : u.name;
}

bool World::viewforum_captured(int s, int64_t fid) const {
  return keyed.chance(fmt::format("vf/{}/{}", s, fid), profile.p_viewforum);
}
bool World::viewtopic_captured(int s, int64_t tid) const {
  return keyed.chance(fmt::format("vt/{}/{}", s, tid), profile.p_viewtopic);
}
bool World::profile_captured(int s, int64_t uid) const {
  return keyed.chance(fmt::format("pr/{}/{}", s, uid), profile.p_profile);
}

bool World::listing_active(const Listing& l, DateTime c) const {
  const Vendor& v = vendor(l.vid);
  return l.created <= c && v.joined <= c && !v.disabled(c);
}

std::string World::rank_at(const Vendor& v, const Scrape& m) const {
  const int64_t s = v.sales(m.cutoff);
  if (profile.anomalies.rank_epoch_switch && m.date < make_date(2014, 5, 5)) {
    static const std::pair<int64_t, const char*> kOld[] = {{4, "Freshman"},  {8, "Sophomore"},  {16, "Junior"},
                                                           {32, "Senior"},   {64, "Premium"},   {128, "Advanced"},
                                                           {256, "Expert"},  {512, "Master"},   {1024, "Grandmaster"}};
    for (const auto& [cap, name] : kOld)
      if (s <= cap) return name;
    return "Godlike";
  }
  if (s < 25) return "Level 1";
  if (s < 100) return "Level 2";
  if (s < 250) return "Level 3";
  if (s < 500) return "Level 4";
  return "Level 5";
}

bool World::availability(int m, int64_t lid) const { return keyed.chance(fmt::format("av/{}/{}", m, lid), 0.9); }

bool World::store_captured(int m, int64_t vid) const {
  return keyed.chance(fmt::format("st/{}/{}", m, vid), profile.p_store);
}

bool World::listing_captured(int m, int64_t lid, ListingFormat f) const {
  switch (f) {
    case ListingFormat::Generic: return keyed.chance(fmt::format("lg/{}/{}", m, lid), profile.p_listing);
    case ListingFormat::Feedback: return keyed.chance(fmt::format("lf/{}/{}", m, lid), profile.p_listing * 0.6);
    case ListingFormat::ReturnPolicy:
      return !listing(lid).return_policy.empty() &&
             keyed.chance(fmt::format("lr/{}/{}", m, lid), profile.p_listing * 0.5);
  }
  return false;
}

bool World::vendor_captured(int m, int64_t vid, VendorFormat f) const {
  const Vendor& v = vendor(vid);
  const double p = profile.p_vendor;
  switch (f) {
    case VendorFormat::Generic: return keyed.chance(fmt::format("vg/{}/{}", m, vid), p);
    case VendorFormat::Feedback: return keyed.chance(fmt::format("vf/{}/{}", m, vid), p * 0.5);
    case VendorFormat::LegacySales: return !v.legacy.empty() && keyed.chance(fmt::format("vl/{}/{}", m, vid), p * 0.6);
    case VendorFormat::Pgp: return !v.pgp.empty() && keyed.chance(fmt::format("vp/{}/{}", m, vid), p * 0.6);
    case VendorFormat::ReturnPolicy:
      return !v.return_policy.empty() && keyed.chance(fmt::format("vr/{}/{}", m, vid), p * 0.5);
  }
  return false;
}

World::CategoryView World::category_view(int64_t cid, int m) const {
  const Category& c = category(cid);
  CategoryView v{c.name, c.parent, true};
  if (!profile.anomalies.category_rename || category_switch == 0) return v;
  if (m >= category_switch) {
    if (cid == 8) v.name = "Paraphernalia";
    return v;
  }
  switch (cid) {
    case 3: v.shown = false; break;
    case 4:
    case 5: v.parent = 1; break;
    case 6: v.name = "Disassociatives"; break;
    case 8: v.parent.reset(); break;
    default: break;
  }
  return v;
}

std::vector<int64_t> World::chain_at(int64_t cid, int m) const {
  std::vector<int64_t> chain;
  for (std::optional<int64_t> c = cid; c; c = category_view(*c, m).parent) chain.push_back(*c);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

std::vector<int64_t> World::children_at(int64_t cid, int m) const {
  std::vector<int64_t> out;
  for (const auto& c : categories) {
    auto v = category_view(c.cid, m);
    if (v.shown && v.parent == cid) out.push_back(c.cid);
  }
  return out;
}

World build_world(const CorpusProfile& profile) {
  World w;
  w.profile = profile;
  w.keyed = Keyed(profile.seed);
  Rng r(profile.seed, kWorld);

  w.fscrapes = make_scrapes(profile.forum_scrapes, profile.first_scrape, profile.last_scrape);
  w.mscrapes = make_scrapes(profile.market_scrapes, profile.first_scrape + std::chrono::days(4),
                            profile.last_scrape - std::chrono::days(4));
  const DateTime world_start = at_dt(make_date(2013, 10, 1), 0);
  const DateTime forum_end = w.fscrapes.back().cutoff;
  const DateTime market_end = w.mscrapes.back().cutoff;
  std::set<std::string> taken;

  // Fora.
  {
    IdAllocator ids(r, 0.15);
    for (int i = 0; i < profile.fora; ++i) {
      Forum f;
      f.fid = ids.next([](int64_t) {});
      f.category = kForumCategories[static_cast<std::size_t>(i) * kForumCategories.size() /
                                    static_cast<std::size_t>(profile.fora)];
      f.title = i < static_cast<int>(kForumTitles.size()) ? kForumTitles[static_cast<std::size_t>(i)]
                                                          : fmt::format("Board {}", i + 1);
      if (r.chance(0.8)) f.description = fmt::format("Talk about {}", words(r, 2, 6));
      w.fora.push_back(std::move(f));
    }
  }

  // Users, uids in registration order.
  {
    std::vector<DateTime> regs;
    const DateTime early_end = at_dt(make_date(2013, 11, 30), 23);
    for (int i = 0; i < profile.users; ++i)
      regs.push_back(i < std::max(1, profile.users / 4) ? uniform_time(r, world_start, early_end)
                                                        : uniform_time(r, early_end, forum_end - std::chrono::days(20)));
    std::sort(regs.begin(), regs.end());
    IdAllocator ids(r, 0.06);
    for (int i = 0; i < profile.users; ++i) {
      User u;
      u.registered = regs[static_cast<std::size_t>(i)];
      u.uid = ids.next([&](int64_t id) { w.hidden_users.emplace_back(id, u.registered - 60s); });
      u.name = unique_name(r, taken);
      if (i == 0) {
        u.title = "Administrator";
      } else {
        double x = r.uniform();
        for (const auto& [t, p] : kTitles) {
          if (x < p) {
            u.title = t;
            break;
          }
          x -= p;
        }
      }
      if (r.chance(0.4)) u.location = r.pick(kCountries);
      if (r.chance(0.3)) u.signature = fmt::format("<em>{}</em>", words(r, 2, 5));
      w.users.push_back(std::move(u));
    }
  }
  auto eligible = [&](DateTime t) {
    auto it = std::upper_bound(w.users.begin(), w.users.end(), t,
                               [](DateTime v, const User& u) { return v < u.registered; });
    return static_cast<int64_t>(it - w.users.begin());
  };

  // Topics and posts.
  {
    std::vector<DateTime> created;
    const DateTime first_reg = w.users.front().registered + 3600s;
    for (int i = 0; i < profile.topics; ++i)
      created.push_back(std::max(first_reg, uniform_time(r, at_dt(make_date(2013, 12, 1), 0), forum_end)));
    std::sort(created.begin(), created.end());
    IdAllocator ids(r, 0.05);
    const DateTime post_end = forum_end + std::chrono::days(20);
    for (int i = 0; i < profile.topics; ++i) {
      Topic t;
      const DateTime start = created[static_cast<std::size_t>(i)];
      t.tid = ids.next([&](int64_t id) { w.hidden_topics.emplace_back(id, start - 60s); });
      t.fid = r.pick(w.fora).fid;
      t.title = fmt::format("{} #{:04X}", words(r, 2, 5), i + 1);
      if (r.chance(0.08)) t.closed_at = start + Seconds(static_cast<int64_t>(r.exponential(20 * 86400.0)) + 60);
      t.views_base = r.between(3, 40);
      t.views_per_day = 0.5 + r.uniform() * 25;
      const int64_t n = 1 + static_cast<int64_t>(r.exponential(std::max(0.0, profile.posts_per_topic - 1)));
      DateTime at_t = start;
      for (int64_t k = 0; k < n; ++k) {
        if (k) at_t += Seconds(30 + static_cast<int64_t>(r.exponential(1.2 * 86400.0)));
        if (at_t > post_end) break;
        Post p;
        p.tid = t.tid;
        p.at = at_t;
        p.position = k + 1;
        p.uid = w.users[static_cast<std::size_t>(r.between(0, eligible(at_t) - 1))].uid;
        p.text = fmt::format("<p>{}</p>", words(r, 4, 30));
        if (r.chance(0.3)) p.text += fmt::format("\n<p>{} &amp; {}</p>", words(r, 2, 8), words(r, 1, 3));
        if (r.chance(0.1)) {
          p.edited_at = at_t + Seconds(60 + static_cast<int64_t>(r.exponential(2 * 86400.0)));
          p.edited_text = p.text + fmt::format("<p>Edit: {}</p>", words(r, 2, 6));
        }
        t.posts.push_back(w.posts.size());
        w.posts.push_back(std::move(p));
      }
      w.topics.push_back(std::move(t));
    }
    // pids follow posting order.
    std::vector<std::size_t> order(w.posts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Post &x = w.posts[a], &y = w.posts[b];
      return std::tie(x.at, x.tid, x.position) < std::tie(y.at, y.tid, y.position);
    });
    IdAllocator pids(r, 0.04);
    for (auto i : order) {
      Post& p = w.posts[i];
      p.pid = pids.next([&](int64_t id) { w.hidden_posts.emplace_back(id, p.at - 1s); });
    }
  }

  // Market catalogue.
  {
    const std::vector<std::tuple<int64_t, const char*, std::optional<int64_t>>> tree{
        {1, "Drugs", std::nullopt},   {2, "Cannabis", 1},     {3, "Stimulants", 1},        {4, "Cocaine", 3},
        {5, "Speed", 3},              {6, "Dissociatives", 1}, {7, "Opioids", 1},          {8, "Drug Paraphernalia", 1},
        {9, "Digital Goods", std::nullopt}, {10, "E-Books", 9}, {11, "Software", 9},
        {12, "Services", std::nullopt}, {13, "Other", std::nullopt}};
    for (const auto& [cid, name, parent] : tree) w.categories.push_back({cid, name, parent});
  }
  Rng mr(profile.seed, kMarket);
  {
    std::vector<DateTime> joined;
    for (int i = 0; i < profile.vendors; ++i)
      joined.push_back(uniform_time(mr, at_dt(make_date(2013, 12, 1), 0), market_end - std::chrono::days(30)));
    std::sort(joined.begin(), joined.end());
    IdAllocator ids(mr, 0.05);
    for (int i = 0; i < profile.vendors; ++i) {
      Vendor v;
      v.vid = ids.next([](int64_t) {});
      v.joined = joined[static_cast<std::size_t>(i)];
      v.name = mr.chance(0.5) ? mr.pick(w.users).name : unique_name(mr, taken);
      v.sales_per_day = 0.05 + mr.uniform() * mr.uniform() * 4;
      if (mr.chance(0.3)) v.legacy = fmt::format("<p>Silk Road 2.0: {} sales</p>", mr.between(5, 900));
      if (mr.chance(0.8))
        v.pgp = fmt::format("-----BEGIN PGP PUBLIC KEY BLOCK-----\n{:016x}\n-----END PGP PUBLIC KEY BLOCK-----",
                            static_cast<std::uint64_t>(mr.between(1, INT64_MAX)));
      if (mr.chance(0.4)) v.return_policy = fmt::format("<p>{}</p>", words(mr, 4, 12));
      w.vendors.push_back(std::move(v));
    }
    if (profile.vendors >= 4) w.vendors[static_cast<std::size_t>(profile.vendors - 2)].name = w.vendors[1].name;
    if (profile.vendors >= 3 && w.mscrapes.size() >= 2) {
      Vendor& v = w.vendors.back();
      const DateTime when = w.mscrapes[w.mscrapes.size() - 2].cutoff + std::chrono::days(1);
      if (v.joined < when) v.disabled_at = when;
    }
    for (std::size_t i = 0; i < w.vendors.size(); ++i) w.vendor_at[w.vendors[i].vid] = i;

    std::vector<Listing> pending;
    for (const auto& v : w.vendors) {
      const auto n = mr.between(1, 2 * profile.listings_per_vendor - 1);
      for (int64_t k = 0; k < n; ++k) {
        Listing l;
        l.vid = v.vid;
        l.created = uniform_time(mr, v.joined, std::max(v.joined, market_end - std::chrono::days(5)));
        l.cid = kLeafCategories[mr.between(0, std::size(kLeafCategories) - 1)];
        l.product_class = (l.cid == 10 || l.cid == 11) ? "Digital" : "Physical";
        l.short_title = fmt::format("{} {}g", mr.pick(kProducts), mr.between(1, 100));
        l.price = fmt::format("{}.{:04}", mr.between(0, 2), mr.between(1, 9999));
        l.description = fmt::format("<p>{}</p>", words(mr, 5, 25));
        l.ships_from = mr.pick(kCountries);
        l.ships_to = mr.chance(0.6) ? "Worldwide" : mr.pick(kCountries);
        if (mr.chance(0.3)) l.return_policy = fmt::format("<p>{}</p>", words(mr, 3, 10));
        const auto nf = static_cast<int64_t>(mr.exponential(profile.feedback_per_listing) + 0.5);
        for (int64_t f = 0; f < nf; ++f) {
          if (f > 0 && mr.chance(0.05)) {
            l.feedback.push_back(l.feedback.back());
            continue;
          }
          const std::string who = unique_name(mr, taken);
          FeedbackEntry e;
          e.at = uniform_time(mr, l.created, market_end);
          e.user = fmt::format("{}...{}", who.front(), who.back());
          if (mr.chance(0.7)) e.message = words(mr, 1, 8);
          l.feedback.push_back(std::move(e));
        }
        std::stable_sort(l.feedback.begin(), l.feedback.end(),
                         [](const FeedbackEntry& a, const FeedbackEntry& b) { return a.at < b.at; });
        pending.push_back(std::move(l));
      }
    }
    std::stable_sort(pending.begin(), pending.end(),
                     [](const Listing& a, const Listing& b) { return a.created < b.created; });
    IdAllocator ids2(mr, 0.05);
    int code = 0;
    for (auto& l : pending) {
      l.lid = ids2.next([](int64_t) {});
      l.title = fmt::format("{} [{:05X}]", l.short_title, 0x10000 + ++code);
      w.listings.push_back(std::move(l));
    }
  }

  for (std::size_t i = 0; i < w.users.size(); ++i) w.user_at[w.users[i].uid] = i;
  for (std::size_t i = 0; i < w.topics.size(); ++i) w.topic_at[w.topics[i].tid] = i;
  for (std::size_t i = 0; i < w.listings.size(); ++i) w.listing_at[w.listings[i].lid] = i;
  for (std::size_t i = 0; i < w.categories.size(); ++i) w.category_at[w.categories[i].cid] = i;

  // Anomalies, each from its own stream so toggling one leaves the others alone.
  const auto& an = profile.anomalies;
  auto stream = [&](std::string_view name) {
    const auto& names = AnomalyToggles::names();
    return Rng(profile.seed, kAnomaly + static_cast<std::uint64_t>(std::find(names.begin(), names.end(), name) - names.begin()));
  };
  const int nf = static_cast<int>(w.fscrapes.size());

  if (an.moved_topics && w.fora.size() >= 2 && nf >= 2) {
    Rng a = stream("moved_topics");
    const auto count = std::max<std::size_t>(1, w.topics.size() / 50);
    for (std::size_t k = 0; k < count * 4 && k < w.topics.size() * 4; ++k) {
      Topic& t = w.topics[static_cast<std::size_t>(a.between(0, static_cast<int64_t>(w.topics.size()) - 1))];
      if (t.moved_at) continue;
      const DateTime when = w.fscrapes[static_cast<std::size_t>(a.between(1, nf - 1))].cutoff - 3600s;
      if (t.created(w.posts) >= when) continue;
      do t.moved_to = a.pick(w.fora).fid;
      while (t.moved_to == t.fid);
      t.moved_at = when;
      if (std::count_if(w.topics.begin(), w.topics.end(), [](const Topic& x) { return x.moved_at.has_value(); }) >=
          static_cast<std::ptrdiff_t>(count))
        break;
    }
  }

  if (an.post_deletion_gaps) {
    Rng a = stream("post_deletion_gaps");
    bool any = false;
    for (auto& t : w.topics) {
      if (t.posts.size() < 3 || !(a.chance(0.3) || (!any && &t == &w.topics.back()))) continue;
      const auto k = a.between(2, static_cast<int64_t>(t.posts.size()));
      const auto g = a.between(1, 3);
      for (auto i : t.posts)
        if (w.posts[i].position >= k) w.posts[i].label_shift = g;
      any = true;
    }
  }

  for (const auto& p : w.posts) w.users[w.user_at.at(p.uid)].post_times.push_back(p.at);
  for (auto& u : w.users) std::sort(u.post_times.begin(), u.post_times.end());

  if (an.banned_uid_reuse && nf >= 2) {
    Rng a = stream("banned_uid_reuse");
    const DateTime limit = w.fscrapes[static_cast<std::size_t>(nf - 2)].cutoff - std::chrono::days(2);
    std::vector<std::size_t> cands;
    for (std::size_t i = 1; i < w.users.size(); ++i)
      if (!w.users[i].post_times.empty() && w.users[i].post_times.back() < limit) cands.push_back(i);
    if (!cands.empty()) {
      User& old = w.users[a.pick(cands)];
      old.banned_at = old.post_times.back() + std::chrono::days(1);
      User fresh;
      int64_t top = w.users.back().uid;
      for (const auto& [id, _] : w.hidden_users) top = std::max(top, id);
      fresh.uid = top + 1;
      fresh.name = old.name;
      fresh.registered = *old.banned_at + std::chrono::days(1);
      w.users.push_back(std::move(fresh));
      w.user_at[w.users.back().uid] = w.users.size() - 1;
    }
  }

  if (an.multi_username_uid) {
    Rng a = stream("multi_username_uid");
    std::vector<std::size_t> cands;
    for (std::size_t i = 1; i < w.users.size(); ++i)
      if (!w.users[i].banned_at && w.users[i].name != w.users.back().name && w.users[i].registered < w.fscrapes.front().cutoff)
        cands.push_back(i);
    if (!cands.empty()) {
      User& u = w.users[a.pick(cands)];
      u.alt_name = u.name + "_x";
      u.alt_from = nf / 2 + 1;
      w.user_name_patch[u.uid] = u.name;
    }
  }

  if (an.hidden_id_gaps) w.hidden_active = true;

  if (an.category_rename && w.mscrapes.size() >= 2) w.category_switch = static_cast<int>(w.mscrapes.size()) / 2 + 1;

  if (an.lid_off_by_one) {
    Rng a = stream("lid_off_by_one");
    const auto want = std::max<std::size_t>(1, w.listings.size() / 40);
    std::set<std::pair<int64_t, int>> used;
    for (std::size_t k = 0; k < want * 20 && w.off_by_one.size() < want; ++k) {
      const Listing& l = a.pick(w.listings);
      const int64_t shown = l.lid + (a.chance(0.5) ? 1 : -1);
      auto it = w.listing_at.find(shown);
      if (it == w.listing_at.end() || w.listings[it->second].vid == l.vid) continue;
      const Scrape& m = a.pick(w.mscrapes);
      if (!w.listing_active(l, m.cutoff) || !w.store_captured(m.id, l.vid) || !used.insert({l.lid, m.id}).second)
        continue;
      w.off_by_one.push_back({l.lid, shown, m.id});
      w.listing_vendor_patch[shown] = w.listings[it->second].vid;
    }
  }

  if (an.field_conflicts) {
    Rng a = stream("field_conflicts");
    for (const auto& s : w.fscrapes) {
      for (const auto& t : w.topics)
        if (w.topic_exists(t, s.cutoff) && w.viewtopic_captured(s.id, t.tid) && a.chance(0.1))
          w.title_conflicts[{t.tid, s.id}] = {t.tid, s.id, t.title + " (updated)"};
      for (const auto& u : w.users)
        if (u.registered <= s.cutoff && w.profile_captured(s.id, u.uid) && a.chance(0.1))
          w.profile_conflicts[{u.uid, s.id}] = {u.uid, s.id, kTitles[static_cast<std::size_t>(a.between(0, std::size(kTitles) - 1))].first,
                                                a.between(1, 5)};
      for (const auto& f : w.fora)
        if (w.viewforum_captured(s.id, f.fid) && a.chance(0.15)) w.views_conflicts[{f.fid, s.id}] = {f.fid, s.id};
    }
    for (const auto& m : w.mscrapes)
      for (const auto& v : w.vendors)
        if (v.joined <= m.cutoff && !v.disabled(m.cutoff) && w.vendor_captured(m.id, v.vid, VendorFormat::Generic) &&
            a.chance(0.15))
          w.sales_conflicts[{v.vid, m.id}] = {v.vid, m.id, v.sales(m.cutoff) + a.between(1, 9)};
  }
  return w;
}

}  // namespace dnm::synth
