#include "dnmetl/network.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "dnmetl/error.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/text.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

namespace fs = std::filesystem;

namespace {

struct Unit {
  const char* suffix;
  std::int64_t seconds;
};

// Longest suffixes first so "min" and "mo" win over a bare "m".
constexpr Unit kUnits[] = {{"min", 60}, {"mo", 2629746}, {"s", 1}, {"h", 3600}, {"d", 86400}, {"w", 604800}};

}  // namespace

std::optional<Seconds> parse_duration(std::string_view text) {
  text = trim(text);
  std::int64_t mult = 1;
  for (const auto& u : kUnits) {
    std::string_view suf(u.suffix);
    if (text.size() > suf.size() && text.substr(text.size() - suf.size()) == suf) {
      mult = u.seconds;
      text.remove_suffix(suf.size());
      break;
    }
  }
  text = trim(text);
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::nullopt;
  auto n = parse_int(text);
  if (!n) return std::nullopt;
  return Seconds{*n * mult};
}

std::string format_duration(Seconds s) {
  for (const auto& u : {kUnits[1], kUnits[4], kUnits[3], kUnits[0]})
    if (s.count() != 0 && s.count() % u.seconds == 0)
      return fmt::format("{}{}", s.count() / u.seconds, u.suffix);
  return fmt::format("{}s", s.count());
}

std::vector<std::string> NetParams::validate() const {
  std::vector<std::string> errs;
  if (delta_phi < 1) errs.push_back(fmt::format("delta_phi must be >= 1 (got {})", delta_phi));
  if (!(omega_lower > 0 && omega_lower < 1)) errs.push_back(fmt::format("omega_lower must be in (0,1) (got {})", omega_lower));
  if (!(omega_first > 0 && omega_first <= 1)) errs.push_back(fmt::format("omega_first must be in (0,1] (got {})", omega_first));
  if (t_lim.count() <= 0) errs.push_back("t_lim must be positive");
  if (t_lim > delta_t) errs.push_back("t_lim must not exceed delta_t");
  return errs;
}

double edge_weight(Seconds time_diff, const NetParams& p) {
  if (time_diff.count() < 0) throw std::invalid_argument("edge_weight: negative time difference");
  if (time_diff >= p.t_lim) return p.omega_lower;
  const double lim = static_cast<double>(p.t_lim.count());
  const double x = 3.0 * (lim - static_cast<double>(time_diff.count())) / lim;
  return p.omega_lower + (1.0 - p.omega_lower) * std::expm1(x) / std::expm1(3.0);
}

std::vector<TemporalEdge> build_topic_edges(std::int64_t tid, std::span<const NetPost> posts, const NetParams& p,
                                            std::size_t* clamped) {
  std::vector<TemporalEdge> edges;
  if (posts.empty()) return edges;
  auto diff = [&](std::int64_t later, std::int64_t earlier) {
    if (later >= earlier) return later - earlier;
    if (clamped) ++*clamped;
    return std::int64_t{0};
  };
  const NetPost& first = posts.front();
  std::unordered_map<std::int64_t, std::int64_t> last_seq;  // node -> seq of its previous post
  for (std::size_t i = 0; i < posts.size(); ++i) {
    const NetPost& pi = posts[i];
    auto it = last_seq.find(pi.node);
    const std::int64_t lower = it == last_seq.end() ? 0 : it->second;
    for (std::size_t j = i; j-- > 0;) {
      const NetPost& pj = posts[j];
      if (pj.seq <= lower || pi.seq - pj.seq > p.delta_phi) break;
      if (pj.node == pi.node) continue;
      const std::int64_t td = diff(pi.timestamp, pj.timestamp);
      if (td > p.delta_t.count()) continue;
      edges.push_back({pi.node, pj.node, edge_weight(Seconds{td}, p), false, td, pi.seq - pj.seq, pi.timestamp, tid});
    }
    if (i > 0 && pi.node != first.node) {
      const std::int64_t td = diff(pi.timestamp, first.timestamp);
      edges.push_back({pi.node, first.node, p.omega_first, true, td, pi.seq - first.seq, pi.timestamp, tid});
    }
    last_seq[pi.node] = pi.seq;
  }
  return edges;
}

std::vector<std::pair<int, unsigned>> month_range(int y0, unsigned m0, int y1, unsigned m1) {
  std::vector<std::pair<int, unsigned>> out;
  for (int y = y0; y < y1 || (y == y1 && m0 <= m1); ++y, m0 = 1)
    for (unsigned m = m0; m <= 12 && (y < y1 || m <= m1); ++m) out.emplace_back(y, m);
  return out;
}

std::string edge_file_name(int year, unsigned month) { return fmt::format("network/edges-{}-{}.tsv", year, month); }

void write_edges(const fs::path& file, std::span<const TemporalEdge> edges) {
  TsvWriter w(file, tables::kEdgeHeader);
  for (const auto& e : edges)
    w.write_row({std::to_string(e.source), std::to_string(e.target), fmt::format("{:.6f}", e.weight),
                 field::of(e.to_first), std::to_string(e.time_diff), std::to_string(e.seq_diff),
                 std::to_string(e.timestamp), std::to_string(e.tid)});
  w.commit();
}

std::vector<TemporalEdge> read_edges(const fs::path& file) {
  std::vector<TemporalEdge> edges;
  for_each_row(file, [&](const std::vector<std::string>& h, std::vector<std::string>& r) {
    if (h != tables::kEdgeHeader) throw InputError(fmt::format("{}: not an edge file", file.string()));
    TemporalEdge e;
    e.source = field::req_int(r[0], "Source");
    e.target = field::req_int(r[1], "Target");
    e.weight = std::stod(r[2]);
    e.to_first = field::opt_bool(r[3]).value_or(false);
    e.time_diff = field::req_int(r[4], "time_diff");
    e.seq_diff = field::req_int(r[5], "seq_diff");
    e.timestamp = field::req_int(r[6], "timestamp");
    e.tid = field::req_int(r[7], "tid");
    edges.push_back(e);
  });
  return edges;
}

NetworkReport build_network(const fs::path& out_dir, const NetworkOptions& options) {
  NetworkReport report;
  if (auto errs = options.params.validate(); !errs.empty()) throw UsageError(join(errs, "; "));

  // Identity: uids sharing a username are one node, named by the lowest uid.
  std::unordered_map<std::int64_t, std::string> name_of;
  for_each_row(out_dir / tables::kUser.path, [&](const std::vector<std::string>&, std::vector<std::string>& r) {
    name_of.try_emplace(field::req_int(r[0], "uid"), r[1]);
  });
  std::map<std::string, std::set<std::int64_t>> uids_of;
  for (const auto& [uid, name] : name_of) uids_of[name.empty() ? fmt::format("\x01{}", uid) : name].insert(uid);
  auto ident = [&](std::int64_t uid) -> std::string {
    auto it = name_of.find(uid);
    if (it == name_of.end() || it->second.empty()) return fmt::format("\x01{}", uid);
    return it->second;
  };
  std::unordered_map<std::int64_t, std::int64_t> node_of;
  for (const auto& [name, uids] : uids_of)
    for (auto u : uids) node_of[u] = *uids.begin();
  auto node = [&](std::int64_t uid) {
    auto it = node_of.find(uid);
    return it == node_of.end() ? uid : it->second;
  };

  std::map<std::string, std::int64_t> match_of;
  const fs::path match_file = out_dir / tables::kMatch.path;
  if (fs::exists(match_file))
    for_each_row(match_file, [&](const std::vector<std::string>&, std::vector<std::string>& r) {
      if (auto id = field::opt_int(r[0])) match_of.try_emplace(r[1], *id);
    });

  std::map<std::string, std::optional<Date>> first_post;  // identity -> earliest post date
  std::vector<TemporalEdge> edges;
  std::vector<NetPost> topic;
  std::int64_t current_tid = -1;
  auto flush = [&] {
    auto e = build_topic_edges(current_tid, topic, options.params, &report.clamped);
    edges.insert(edges.end(), e.begin(), e.end());
    topic.clear();
  };
  for_each_row(out_dir / tables::kPost.path, [&](const std::vector<std::string>&, std::vector<std::string>& r) {
    const std::int64_t tid = field::req_int(r[0], "tid");
    const std::int64_t uid = field::req_int(r[7], "uid");
    if (tid != current_tid) {
      if (current_tid >= 0) flush();
      current_tid = tid;
    }
    const std::string id = ident(uid);
    if (id[0] == '\x01') uids_of[id].insert(uid);
    auto& fp = first_post[id];
    auto y = field::opt_int(r[3]), m = field::opt_int(r[4]), d = field::opt_int(r[5]);
    auto t = field::opt_time(r[6]);
    if (!y || !m || !d) {
      ++report.skipped_posts;
      report.diagnostics.push_back(fmt::format("pid {}: no timestamp, left out of the network", r[1]));
      return;
    }
    const Date date = make_date(static_cast<int>(*y), static_cast<unsigned>(*m), static_cast<unsigned>(*d));
    if (!fp || date < *fp) fp = date;
    topic.push_back({field::req_int(r[2], "seq_id"), node(uid), network_seconds(at(date, t.value_or(TimeOfDay{0})))});
  });
  if (current_tid >= 0) flush();
  if (report.clamped)
    report.diagnostics.push_back(fmt::format("{} edges had posts dated out of sequence; time_diff clamped to 0",
                                             report.clamped));
  std::sort(edges.begin(), edges.end());
  report.edges = edges.size();

  {
    TsvWriter w(out_dir / tables::kNodes.path, tables::kNodes.header);
    std::vector<std::pair<std::int64_t, std::string>> nodes;
    for (const auto& [name, _] : first_post) nodes.emplace_back(*uids_of[name].begin(), name);
    std::sort(nodes.begin(), nodes.end());
    for (const auto& [uid, name] : nodes) {
      const auto& uids = uids_of[name];
      if (uids.size() > 3)
        report.diagnostics.push_back(fmt::format("username of uid {} has {} uids; only three are listed", uid, uids.size()));
      std::vector<std::string> ids;
      for (auto u : uids) ids.push_back(std::to_string(u));
      ids.resize(3);
      std::string match;
      if (name[0] != '\x01')
        if (auto it = match_of.find(name); it != match_of.end()) match = std::to_string(it->second);
      const auto& fp = first_post[name];
      w.write_row({ids[0], ids[1], ids[2], match, fp ? std::to_string(year_of(*fp)) : std::string(),
                   fp ? std::to_string(month_of(*fp)) : std::string()});
      ++report.nodes;
    }
    w.commit();
  }

  auto it = edges.begin();
  for (const auto& [y, m] : month_range(options.first_year, options.first_month, options.last_year,
                                        options.last_month)) {
    const std::int64_t cutoff = network_seconds(end_of_month(y, m));
    it = std::upper_bound(it, edges.end(), cutoff,
                          [](std::int64_t c, const TemporalEdge& e) { return c < e.timestamp; });
    write_edges(out_dir / edge_file_name(y, m), std::span<const TemporalEdge>(edges.data(), it - edges.begin()));
    ++report.snapshots;
  }
  return report;
}

}  // namespace dnm
