#include <fmt/format.h>

#include "dnmetl/error.hpp"
#include "dnmetl/synth.hpp"
#include "dnmetl/text.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

namespace {

struct ToggleEntry {
  const char* name;
  bool AnomalyToggles::*member;
};

constexpr ToggleEntry kToggles[] = {
    {"today_tomorrow_dates", &AnomalyToggles::today_tomorrow_dates},
    {"midnight_offset", &AnomalyToggles::midnight_offset},
    {"seven_day_mtime_fault", &AnomalyToggles::seven_day_mtime_fault},
    {"moved_topics", &AnomalyToggles::moved_topics},
    {"banned_uid_reuse", &AnomalyToggles::banned_uid_reuse},
    {"multi_username_uid", &AnomalyToggles::multi_username_uid},
    {"lid_off_by_one", &AnomalyToggles::lid_off_by_one},
    {"substring_titles", &AnomalyToggles::substring_titles},
    {"category_rename", &AnomalyToggles::category_rename},
    {"rank_epoch_switch", &AnomalyToggles::rank_epoch_switch},
    {"hidden_id_gaps", &AnomalyToggles::hidden_id_gaps},
    {"post_deletion_gaps", &AnomalyToggles::post_deletion_gaps},
    {"field_conflicts", &AnomalyToggles::field_conflicts},
};

std::optional<bool> parse_bool(std::string_view v) {
  if (v == "true" || v == "True" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "False" || v == "0" || v == "off" || v == "no") return false;
  return std::nullopt;
}

std::optional<double> parse_rate(std::string_view v) {
  try {
    std::size_t used = 0;
    double d = std::stod(std::string(v), &used);
    if (used != v.size() || d < 0 || d > 1) return std::nullopt;
    return d;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

const std::vector<std::string>& AnomalyToggles::names() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v;
    for (const auto& t : kToggles) v.emplace_back(t.name);
    return v;
  }();
  return all;
}

bool* AnomalyToggles::find(std::string_view name) {
  for (const auto& t : kToggles)
    if (name == t.name) return &(this->*t.member);
  return nullptr;
}

bool AnomalyToggles::get(std::string_view name) const {
  for (const auto& t : kToggles)
    if (name == t.name) return this->*t.member;
  return false;
}

CorpusProfile CorpusProfile::parse(std::string_view text, std::vector<std::string>& errors) {
  CorpusProfile p;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(fmt::format("line {}: expected key = value", line_no));
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    auto bad = [&] { errors.push_back(fmt::format("line {}: invalid value '{}' for {}", line_no, value, key)); };
    auto set_int = [&](int& dst, int lo, int hi) {
      auto v = parse_int(value);
      if (!v || *v < lo || *v > hi) return bad();
      dst = static_cast<int>(*v);
    };
    auto set_rate = [&](double& dst) {
      if (auto v = parse_rate(value)) dst = *v;
      else bad();
    };
    auto set_mean = [&](double& dst, double lo, double hi) {
      try {
        double d = std::stod(value);
        if (d < lo || d > hi) return bad();
        dst = d;
      } catch (const std::exception&) {
        bad();
      }
    };
    if (key == "seed") {
      auto v = parse_int(value);
      if (!v || *v < 0) bad();
      else p.seed = static_cast<std::uint64_t>(*v);
    } else if (key == "forum_scrapes") set_int(p.forum_scrapes, 1, 40);
    else if (key == "market_scrapes") set_int(p.market_scrapes, 1, 40);
    else if (key == "fora") set_int(p.fora, 1, 1000);
    else if (key == "users") set_int(p.users, 2, 10'000'000);
    else if (key == "topics") set_int(p.topics, 1, 10'000'000);
    else if (key == "posts_per_topic") set_mean(p.posts_per_topic, 1, 1000);
    else if (key == "vendors") set_int(p.vendors, 1, 1'000'000);
    else if (key == "listings_per_vendor") set_int(p.listings_per_vendor, 1, 10'000);
    else if (key == "feedback_per_listing") set_mean(p.feedback_per_listing, 0, 1000);
    else if (key == "p_viewforum") set_rate(p.p_viewforum);
    else if (key == "p_viewtopic") set_rate(p.p_viewtopic);
    else if (key == "p_profile") set_rate(p.p_profile);
    else if (key == "p_store") set_rate(p.p_store);
    else if (key == "p_listing") set_rate(p.p_listing);
    else if (key == "p_vendor") set_rate(p.p_vendor);
    else if (key == "sales_from_mscrape") set_int(p.sales_from_mscrape, 1, 1000);
    else if (key == "posts_per_page") set_int(p.posts_per_page, 1, 1000);
    else if (key == "first_scrape" || key == "last_scrape") {
      auto d = parse_date(value);
      if (!d) bad();
      else (key == "first_scrape" ? p.first_scrape : p.last_scrape) = *d;
    } else if (key.starts_with("quirk.")) {
      auto q = quirk_from_string(std::string_view(key).substr(6));
      if (!q || *q == Quirk::None) {
        errors.push_back(fmt::format("line {}: unknown quirk '{}'", line_no, key.substr(6)));
        continue;
      }
      set_rate(p.quirk_rates[*q]);
    } else if (key.starts_with("anomaly.")) {
      bool* t = p.anomalies.find(std::string_view(key).substr(8));
      auto b = parse_bool(value);
      if (!t) errors.push_back(fmt::format("line {}: unknown anomaly '{}'", line_no, key.substr(8)));
      else if (!b) bad();
      else *t = *b;
    } else if (key == "anomalies") {
      for (auto part : split(value, ',')) {
        auto name = trim(part);
        if (name.empty() || name == "none") continue;
        if (name == "all") {
          for (const auto& n : AnomalyToggles::names()) *p.anomalies.find(n) = true;
          continue;
        }
        if (bool* t = p.anomalies.find(name)) *t = true;
        else errors.push_back(fmt::format("line {}: unknown anomaly '{}'", line_no, name));
      }
    } else {
      errors.push_back(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
  }
  if (p.last_scrape <= p.first_scrape) errors.push_back("last_scrape must be after first_scrape");
  return p;
}

CorpusProfile CorpusProfile::load(const std::filesystem::path& file) {
  std::vector<std::string> errors;
  CorpusProfile p = parse(read_file(file), errors);
  if (!errors.empty()) {
    std::string msg = fmt::format("{}: {} problem(s)", file.string(), errors.size());
    for (const auto& e : errors) msg += "\n  " + e;
    throw UsageError(msg);
  }
  return p;
}

}  // namespace dnm
