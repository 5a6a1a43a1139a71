#include "dnmetl/market_resolve.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

#include "dnmetl/error.hpp"
#include "dnmetl/forum_resolve.hpp"
#include "dnmetl/raw_io.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

namespace fs = std::filesystem;

const RankSystem& RankSystem::standard() {
  static const RankSystem sys = [] {
    RankSystem s;
    const char* pre[] = {"Freshman", "Sophomore", "Junior", "Senior", "Premium",
                         "Advanced", "Expert",    "Master", "Grandmaster"};
    std::int64_t cap = 4;
    for (const char* name : pre) {
      s.pre_ranks.push_back({name, cap});
      cap *= 2;
    }
    s.pre_ranks.push_back({"Godlike", std::nullopt});
    s.post_ranks = {{"Level 1", 0, 24, std::nullopt, std::nullopt},
                    {"Level 2", 25, 99, 1.0, 0.9},
                    {"Level 3", 100, 249, 10.0, 0.9},
                    {"Level 4", 250, 499, 50.0, 0.9},
                    {"Level 5", 500, std::nullopt, 100.0, 0.9}};
    return s;
  }();
  return sys;
}

std::string_view to_string(RankVerdict v) {
  switch (v) {
    case RankVerdict::Consistent: return "Consistent";
    case RankVerdict::SalesExceedRange: return "SalesExceedRange";
    case RankVerdict::Inconsistent: return "Inconsistent";
    case RankVerdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

RankVerdict check_rank(std::string_view rank, std::optional<std::int64_t> sales, std::optional<double> revenue_btc,
                       std::optional<double> approval, Date date, const RankSystem& system) {
  if (date < system.epoch_switch) {
    std::int64_t floor = 0;  // sales must exceed the previous rank's cap
    for (const auto& r : system.pre_ranks) {
      if (r.name == rank) {
        if (!sales) return RankVerdict::Unknown;
        const bool above = floor == 0 ? *sales >= 0 : *sales > floor;
        const bool below = !r.max_sales || *sales <= *r.max_sales;
        return above && below ? RankVerdict::Consistent : RankVerdict::Inconsistent;
      }
      floor = r.max_sales.value_or(floor);
    }
    return RankVerdict::Inconsistent;
  }
  for (const auto& r : system.post_ranks) {
    if (r.name != rank) continue;
    if (r.revenue_btc) {
      if (!revenue_btc || !approval) return RankVerdict::Unknown;
      if (*revenue_btc < *r.revenue_btc || (r.feedback && *approval < *r.feedback)) return RankVerdict::Inconsistent;
    }
    if (!sales) return RankVerdict::Unknown;
    if (*sales < r.min_sales) return RankVerdict::Inconsistent;
    if (r.max_sales && *sales > *r.max_sales) return RankVerdict::SalesExceedRange;
    return RankVerdict::Consistent;
  }
  return RankVerdict::Inconsistent;
}

std::map<std::string, std::string> collapse_titles(const std::vector<std::string>& titles) {
  std::set<std::string> uniq(titles.begin(), titles.end());
  std::map<std::string, std::string> out;
  for (const auto& t : uniq) {
    const std::string* best = &t;
    for (const auto& u : uniq) {
      if (u.size() < best->size() || u.find(t) == std::string::npos) continue;
      if (u.size() > best->size() || u < *best) best = &u;
    }
    out[t] = *best;
  }
  return out;
}

std::map<std::int64_t, std::optional<std::int64_t>> deepest_parents(const std::vector<CategoryObservation>& obs) {
  std::map<std::int64_t, std::set<std::optional<std::int64_t>>> cand;
  for (const auto& o : obs) {
    cand[o.cid].insert(o.parent);
    if (o.parent) cand[*o.parent];
  }
  std::map<std::int64_t, int> depth;
  std::map<std::int64_t, std::optional<std::int64_t>> parent;
  std::set<std::int64_t> visiting;
  std::function<int(std::int64_t)> solve = [&](std::int64_t cid) -> int {
    if (auto it = depth.find(cid); it != depth.end()) return it->second;
    if (!visiting.insert(cid).second) throw InputError(fmt::format("category hierarchy has a cycle through {}", cid));
    int best = -1;
    std::optional<std::int64_t> chosen;
    for (const auto& p : cand[cid]) {
      const int d = p ? solve(*p) + 1 : 0;
      if (d > best) {  // set order puts "none" first, then ascending cids
        best = d;
        chosen = p;
      }
    }
    visiting.erase(cid);
    parent[cid] = chosen;
    return depth[cid] = std::max(best, 0);
  };
  for (const auto& [cid, _] : cand) solve(cid);
  return parent;
}

std::vector<std::int64_t> prune_ancestors(const std::vector<std::int64_t>& cids,
                                          const std::map<std::int64_t, std::optional<std::int64_t>>& parents) {
  std::set<std::int64_t> ancestors;
  for (auto c : cids) {
    std::size_t guard = 0;
    for (auto it = parents.find(c); it != parents.end() && it->second && guard++ < parents.size();
         it = parents.find(*it->second))
      ancestors.insert(*it->second);
  }
  std::vector<std::int64_t> out;
  for (auto c : cids)
    if (!ancestors.count(c)) out.push_back(c);
  return out;
}

namespace {

bool newer(const SourceTag& a, const SourceTag& b) {
  return std::tie(a.retrieval_time, a.scrape_id) > std::tie(b.retrieval_time, b.scrape_id);
}

// Latest observation carrying a value; equal stamps prefer the larger value.
template <typename T>
struct Latest {
  std::optional<T> value;
  DateTime when{};
  int scrape = 0;

  void offer(const SourceTag& src, const std::optional<T>& v) {
    if (!v) return;
    if (!value || std::tie(src.retrieval_time, src.scrape_id) > std::tie(when, scrape) ||
        (src.retrieval_time == when && src.scrape_id == scrape && *value < *v)) {
      value = v;
      when = src.retrieval_time;
      scrape = src.scrape_id;
    }
  }
};

struct VendorAgg {
  Latest<std::string> username, rank, approval, legacy_sales, pgp_key, return_policy;
  Latest<std::int64_t> sales, positive, neutral, negative;
  Latest<bool> disabled;
};

struct ListingObs {
  SourceTag src;
  RawListingRow row;
};

struct ListingAgg {
  Latest<std::int64_t> vid;
  Latest<std::string> price, description, ships_from, ships_to, product_class, return_policy;
  Latest<bool> available;
  std::vector<std::pair<SourceTag, std::int64_t>> cids;
};

std::string to_fixed(const std::optional<std::string>& s) { return s.value_or(""); }

}  // namespace

MarketResolveReport resolve_market(const fs::path& raw_dir, const ScrapeIndex& index, const OverridePatch& patch,
                                   const fs::path& out_dir, const MarketResolveOptions& options) {
  MarketResolveReport report;
  auto diag = [&](std::string m) { report.diagnostics.push_back(std::move(m)); };
  std::map<int, Date> dates;
  for (const auto& e : index.entries)
    if (e.side == Side::Market) dates[e.scrape_id] = e.date;

  {
    TsvWriter w(out_dir / tables::kMarketScrapes.path, tables::kMarketScrapes.header);
    for (const auto& [id, d] : dates)
      w.write_row({std::to_string(id), std::to_string(year_of(d)), std::to_string(month_of(d)),
                   std::to_string(day_of(d))});
    w.commit();
  }

  // Categories: deepest hierarchy, earliest name after corrections.
  std::vector<CategoryObservation> cat_obs;
  std::map<std::int64_t, std::pair<SourceTag, std::string>> cat_names;
  read_category_rows(raw_dir, [&](Tagged<RawCategoryRow>&& t) {
    cat_obs.push_back({t.row.cid, t.row.parent_cid});
    std::string name = t.row.name;
    if (auto r = options.category_renames.find(name); r != options.category_renames.end()) name = r->second;
    auto [it, fresh] = cat_names.try_emplace(t.row.cid, t.src, name);
    auto& [src, cur] = it->second;
    if (!fresh && (std::tie(t.src.retrieval_time, t.src.scrape_id) < std::tie(src.retrieval_time, src.scrape_id) ||
                   (t.src.retrieval_time == src.retrieval_time && t.src.scrape_id == src.scrape_id && name < cur)))
      it->second = {t.src, name};
  });
  const auto parents = deepest_parents(cat_obs);
  {
    TsvWriter w(out_dir / tables::kCategories.path, tables::kCategories.header);
    for (const auto& [cid, parent] : parents) {
      auto n = cat_names.find(cid);
      if (n == cat_names.end()) diag(fmt::format("category {} seen only as a parent", cid));
      w.write_row({std::to_string(cid), n == cat_names.end() ? std::string() : n->second.second,
                   field::of(parent)});
      ++report.categories;
    }
    w.commit();
  }

  // Vendors, one row per (vid, mscrape).
  std::map<std::pair<std::int64_t, int>, VendorAgg> vendors;
  read_vendor_rows(raw_dir, [&](Tagged<RawVendorRow>&& t) {
    const auto& v = t.row;
    auto& a = vendors[{v.vid, t.src.scrape_id}];
    a.username.offer(t.src, v.username.empty() ? std::nullopt : std::optional<std::string>(v.username));
    a.rank.offer(t.src, v.rank);
    a.sales.offer(t.src, v.sales);
    a.approval.offer(t.src, v.approval_rating);
    a.positive.offer(t.src, v.positive_feedback);
    a.neutral.offer(t.src, v.neutral_feedback);
    a.negative.offer(t.src, v.negative_feedback);
    a.legacy_sales.offer(t.src, v.legacy_sales);
    a.pgp_key.offer(t.src, v.pgp_key);
    a.return_policy.offer(t.src, v.return_policy);
    a.disabled.offer(t.src, v.disabled);
  });
  for (const auto& [vid, _] : patch.vendor_names)
    if (vendors.lower_bound({vid, 0}) == vendors.end() || vendors.lower_bound({vid, 0})->first.first != vid)
      diag(fmt::format("override for vid {} matches no observed vendor", vid));
  {
    TsvWriter w(out_dir / tables::kVendors.path, tables::kVendors.header);
    for (const auto& [key, a] : vendors) {
      const auto& [vid, scrape] = key;
      std::string username = a.username.value.value_or("");
      if (auto p = patch.vendor_names.find(vid); p != patch.vendor_names.end()) username = p->second;
      const bool disabled = a.disabled.value.value_or(false);
      std::vector<std::string> row{std::to_string(vid), std::to_string(scrape), username};
      if (disabled) {
        row.resize(tables::kVendors.header.size() - 1);
      } else {
        const bool sales_known = scrape >= options.sales_from_mscrape;
        row.insert(row.end(), {to_fixed(a.rank.value), sales_known ? field::of(a.sales.value) : std::string(),
                               to_fixed(a.approval.value), field::of(a.positive.value), field::of(a.neutral.value),
                               field::of(a.negative.value), to_fixed(a.legacy_sales.value),
                               to_fixed(a.pgp_key.value), to_fixed(a.return_policy.value)});
      }
      row.push_back(field::of(a.disabled.value));
      w.write_row(row);
      ++report.vendors;
    }
    w.commit();
  }

  // Listings: group per (lid, mscrape), collapse substring titles.
  std::map<std::pair<std::int64_t, int>, std::vector<ListingObs>> listing_obs;
  read_listing_rows(raw_dir, [&](Tagged<RawListingRow>&& t) {
    listing_obs[{t.row.lid, t.src.scrape_id}].push_back({std::move(t.src), std::move(t.row)});
  });
  std::map<std::int64_t, std::set<std::int64_t>> vids_of_lid;
  for (const auto& [key, obs] : listing_obs)
    for (const auto& o : obs) vids_of_lid[key.first].insert(o.row.vid);
  for (const auto& [lid, vids] : vids_of_lid)
    if (vids.size() > 1 && !patch.listing_vendors.count(lid))
      diag(fmt::format("lid {} seen under {} vendors and no override", lid, vids.size()));
  {
    TsvWriter w(out_dir / tables::kListings.path, tables::kListings.header);
    for (const auto& [key, obs] : listing_obs) {
      const auto& [lid, scrape] = key;
      std::vector<std::string> titles;
      for (const auto& o : obs) titles.push_back(o.row.title);
      const auto canon = collapse_titles(titles);
      std::map<std::string, ListingAgg> groups;
      for (const auto& o : obs) {
        auto& g = groups[canon.at(o.row.title)];
        const auto& r = o.row;
        g.vid.offer(o.src, r.vid);
        g.price.offer(o.src, r.price);
        g.description.offer(o.src, r.description);
        g.ships_from.offer(o.src, r.ships_from);
        g.ships_to.offer(o.src, r.ships_to);
        g.product_class.offer(o.src, r.product_class);
        g.return_policy.offer(o.src, r.return_policy);
        g.available.offer(o.src, r.listing_available);
        if (r.cid) g.cids.emplace_back(o.src, *r.cid);
      }
      for (const auto& [title, g] : groups) {
        std::int64_t vid = *g.vid.value;
        if (auto p = patch.listing_vendors.find(lid); p != patch.listing_vendors.end()) vid = p->second;
        std::optional<std::int64_t> cid;
        if (!g.cids.empty()) {
          std::vector<std::int64_t> cands;
          for (const auto& c : g.cids) cands.push_back(c.second);
          std::sort(cands.begin(), cands.end());
          cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
          const auto kept = prune_ancestors(cands, parents);
          Latest<std::int64_t> best;
          for (const auto& [src, c] : g.cids)
            if (std::find(kept.begin(), kept.end(), c) != kept.end()) best.offer(src, c);
          cid = best.value;
        }
        w.write_row({std::to_string(lid), std::to_string(vid), std::to_string(scrape), title,
                     to_fixed(g.price.value), to_fixed(g.description.value), field::of(cid),
                     to_fixed(g.ships_from.value), to_fixed(g.ships_to.value), to_fixed(g.product_class.value),
                     field::of(g.available.value), to_fixed(g.return_policy.value)});
        ++report.listings;
      }
    }
    w.commit();
  }

  // Feedback: exact duplicates on (lid, username, date, message) collapse.
  std::set<std::tuple<std::int64_t, int, unsigned, unsigned, std::string, std::string>> feedback;
  read_feedback_rows(raw_dir, [&](Tagged<RawFeedbackRow>&& t) {
    std::optional<Date> sdate;
    if (auto it = dates.find(t.src.scrape_id); it != dates.end()) sdate = it->second;
    auto d = resolve_date_label(t.row.date_label, t.src.retrieval_time, sdate);
    if (!d) {
      diag(fmt::format("lid {}: unparseable feedback date '{}' in {}", t.row.lid, t.row.date_label, t.src.path));
      return;
    }
    feedback.emplace(t.row.lid, year_of(*d), month_of(*d), day_of(*d), t.row.username,
                     t.row.message.value_or(""));
  });
  {
    TsvWriter w(out_dir / tables::kFeedback.path, tables::kFeedback.header);
    for (const auto& [lid, y, m, d, user, msg] : feedback) {
      w.write_row({std::to_string(lid), user, std::to_string(y), std::to_string(m), std::to_string(d), msg});
      ++report.feedback;
    }
    w.commit();
  }
  return report;
}

}  // namespace dnm
