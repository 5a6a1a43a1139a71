#include "dnmetl/config.hpp"

#include <fmt/format.h>

#include <cstdlib>

#include "dnmetl/error.hpp"
#include "dnmetl/text.hpp"
#include "dnmetl/tsv.hpp"

extern char** environ;

namespace dnm {

namespace fs = std::filesystem;

namespace {

std::string env_name(std::string key) {
  for (auto& c : key) c = c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return "ETL_" + key;
}

fs::path resolve_path(const std::string& v, const fs::path& base) {
  fs::path p(v);
  return p.is_absolute() || base.empty() ? p : base / p;
}

// "2014-01" -> (2014, 1)
bool parse_month(const std::string& v, int& y, unsigned& m) {
  auto d = parse_date(v + "-01");
  if (!d) return false;
  y = year_of(*d);
  m = month_of(*d);
  return true;
}

std::vector<std::string> split_list(const std::string& v, char sep) {
  std::vector<std::string> out;
  for (auto part : split(v, sep))
    if (auto t = trim(part); !t.empty()) out.emplace_back(t);
  return out;
}

std::optional<double> parse_double(const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) return std::nullopt;
    return d;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string apply_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value,
                             const fs::path& base) {
  auto bad = [&] { return fmt::format("invalid value '{}' for {}", value, key); };
  auto set_int = [&](auto& dst, std::int64_t lo, std::int64_t hi) -> std::string {
    auto v = parse_int(value);
    if (!v || *v < lo || *v > hi) return bad();
    dst = static_cast<std::remove_reference_t<decltype(dst)>>(*v);
    return "";
  };
  auto set_duration = [&](Seconds& dst) -> std::string {
    auto d = parse_duration(value);
    if (!d) return bad();
    dst = *d;
    return "";
  };
  auto& net = cfg.network;
  if (key == "root") cfg.root = resolve_path(value, base);
  else if (key == "out") cfg.out = resolve_path(value, base);
  else if (key == "overrides") {
    cfg.overrides.clear();
    for (const auto& p : split_list(value, ',')) cfg.overrides.push_back(resolve_path(p, base));
  } else if (key == "jobs") return set_int(cfg.jobs, 0, 4096);
  else if (key == "forum.posts_per_page") return set_int(cfg.posts_per_page, 1, 100000);
  else if (key == "forum.shard_mb") {
    std::int64_t mb = 0;
    if (auto e = set_int(mb, 1, 1 << 20); !e.empty()) return e;
    cfg.shard_bytes = static_cast<std::uintmax_t>(mb) << 20;
  } else if (key == "market.sales_from_mscrape") return set_int(cfg.sales_from_mscrape, 1, 100000);
  else if (key == "net.delta_phi") return set_int(net.params.delta_phi, -1000000, 1000000);
  else if (key == "net.delta_t") return set_duration(net.params.delta_t);
  else if (key == "net.t_lim") return set_duration(net.params.t_lim);
  else if (key == "net.omega_lower" || key == "net.omega_first") {
    auto d = parse_double(value);
    if (!d) return bad();
    (key == "net.omega_lower" ? net.params.omega_lower : net.params.omega_first) = *d;
  } else if (key == "net.first_month") {
    if (!parse_month(value, net.first_year, net.first_month)) return bad();
  } else if (key == "net.last_month") {
    if (!parse_month(value, net.last_year, net.last_month)) return bad();
  } else if (key == "stats.diameters") {
    if (value == "all" || value == "true") cfg.diameters = Diameters::All;
    else if (value == "last") cfg.diameters = Diameters::Last;
    else if (value == "none" || value == "false") cfg.diameters = Diameters::None;
    else return bad();
  } else if (key == "markers.error") cfg.markers.error = split_list(value, '|');
  else if (key == "markers.logged_out") cfg.markers.logged_out = split_list(value, '|');
  else if (key == "markers.obscured") cfg.markers.obscured = split_list(value, '|');
  else if (key == "markers.forum_content_end") cfg.markers.forum_content_end = value;
  else if (key == "markers.market_content_end") cfg.markers.market_content_end = value;
  else return fmt::format("unknown key '{}'", key);
  return "";
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::entries() const {
  const auto& p = network.params;
  return {{"root", root.string()},
          {"out", out.string()},
          {"overrides", [&] {
             std::vector<std::string> v;
             for (const auto& o : overrides) v.push_back(o.string());
             return join(v, ",");
           }()},
          {"jobs", std::to_string(jobs)},
          {"forum.posts_per_page", std::to_string(posts_per_page)},
          {"forum.shard_mb", std::to_string(shard_bytes >> 20)},
          {"market.sales_from_mscrape", std::to_string(sales_from_mscrape)},
          {"net.delta_phi", std::to_string(p.delta_phi)},
          {"net.delta_t", format_duration(p.delta_t)},
          {"net.t_lim", format_duration(p.t_lim)},
          {"net.omega_lower", fmt::format("{}", p.omega_lower)},
          {"net.omega_first", fmt::format("{}", p.omega_first)},
          {"net.first_month", fmt::format("{}-{:02}", network.first_year, network.first_month)},
          {"net.last_month", fmt::format("{}-{:02}", network.last_year, network.last_month)},
          {"stats.diameters", diameters == Diameters::All ? "all" : diameters == Diameters::Last ? "last" : "none"},
          {"markers.error", join(markers.error, "|")},
          {"markers.logged_out", join(markers.logged_out, "|")},
          {"markers.obscured", join(markers.obscured, "|")},
          {"markers.forum_content_end", markers.forum_content_end},
          {"markers.market_content_end", markers.market_content_end}};
}

std::vector<std::string> validate_config(const PipelineConfig& cfg) {
  std::vector<std::string> errs;
  for (auto& e : cfg.network.params.validate()) errs.push_back("net: " + e);
  const auto& n = cfg.network;
  if (std::make_pair(n.first_year, n.first_month) > std::make_pair(n.last_year, n.last_month))
    errs.push_back("net.first_month is after net.last_month");
  if (cfg.markers.forum_content_end.empty()) errs.push_back("markers.forum_content_end must not be empty");
  if (cfg.markers.market_content_end.empty()) errs.push_back("markers.market_content_end must not be empty");
  for (const auto& o : cfg.overrides)
    if (!fs::is_regular_file(o)) errs.push_back(fmt::format("override file {} does not exist", o.string()));
  return errs;
}

std::map<std::string, std::string> etl_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    if (!kv.starts_with("ETL_")) continue;
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return env;
}

PipelineConfig load_config(const fs::path& file, const std::map<std::string, std::string>& env,
                           const std::vector<std::pair<std::string, std::string>>& cli) {
  PipelineConfig cfg;
  std::vector<std::string> errors;
  fs::path base;
  if (!file.empty()) {
    if (!fs::is_regular_file(file)) throw UsageError(fmt::format("config file {} does not exist", file.string()));
    base = fs::absolute(file).parent_path();
    const std::string text = read_file(file);
    int line_no = 0;
    for (auto raw : split(text, '\n')) {
      ++line_no;
      auto line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        errors.push_back(fmt::format("{}:{}: expected key = value", file.string(), line_no));
        continue;
      }
      auto e = apply_config_key(cfg, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), base);
      if (!e.empty()) errors.push_back(fmt::format("{}:{}: {}", file.string(), line_no, e));
    }
  }
  // Environment values are relative to the working directory.
  PipelineConfig probe;
  for (const auto& [key, _] : probe.entries()) {
    auto it = env.find(env_name(key));
    if (it == env.end()) continue;
    auto e = apply_config_key(cfg, key, it->second, fs::current_path());
    if (!e.empty()) errors.push_back(fmt::format("{}: {}", it->first, e));
  }
  for (const auto& [key, value] : cli) {
    auto e = apply_config_key(cfg, key, value, fs::current_path());
    if (!e.empty()) errors.push_back(fmt::format("command line: {}", e));
  }
  for (auto& e : validate_config(cfg)) errors.push_back(std::move(e));
  if (!errors.empty()) {
    std::string msg = fmt::format("configuration has {} problem(s):", errors.size());
    for (const auto& e : errors) msg += "\n  " + e;
    throw UsageError(msg);
  }
  return cfg;
}

}  // namespace dnm
