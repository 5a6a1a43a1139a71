// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and time limits are fixed below.
//
//   acceptance --work DIR --etl PATH [--only 1,4,9]

#include <sys/resource.h>
#include <sys/wait.h>
#include <fcntl.h>
#include <unistd.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dnmetl/config.hpp"
#include "dnmetl/market_resolve.hpp"
#include "dnmetl/net_stats.hpp"
#include "dnmetl/network.hpp"
#include "dnmetl/pipeline.hpp"
#include "dnmetl/quality.hpp"
#include "dnmetl/synth.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/tsv.hpp"
#include "dnmetl/user_match.hpp"
#include "oracles.hpp"

using namespace dnm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kWeightTol = 1e-9;
constexpr double kWeightLimitSec = 1.0;
constexpr double kEdgeLimitSec = 30.0;
constexpr double kStatsLimitSec = 60.0;
constexpr double kClusteringTol = 1e-12;
constexpr double kScaleLimitSec = 600.0;
constexpr std::size_t kScaleMinFiles = 100000;
constexpr std::uint64_t kSyntheticSeed = 1;
constexpr std::uint64_t kScaleSeed = 5;

struct Outcome {
  enum Kind { Pass, Fail, NotRun } kind = Pass;
  std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failure messages, keeping only the first few.
struct Failures {
  std::vector<std::string> msgs;
  std::size_t count = 0;
  void add(std::string m) {
    if (count++ < 5) msgs.push_back(std::move(m));
  }
  Outcome outcome(std::string ok_detail) const {
    if (count == 0) return {Outcome::Pass, std::move(ok_detail)};
    std::string d = fmt::format("{} failure(s)", count);
    for (const auto& m : msgs) d += "; " + m;
    return {Outcome::Fail, d};
  }
};

// ---- 1 ----------------------------------------------------------------------

Outcome edge_weight_curve() {
  using big = boost::multiprecision::cpp_dec_float_50;
  const auto t0 = Clock::now();
  Failures f;
  NetParams p;
  const std::int64_t tl = p.t_lim.count();

  if (edge_weight(Seconds{0}, p) != 1.0) f.add(fmt::format("w(0) = {:.17g}", edge_weight(Seconds{0}, p)));
  if (std::abs(edge_weight(p.t_lim, p) - p.omega_lower) > 1e-15)
    f.add(fmt::format("w(t_lim) = {:.17g}", edge_weight(p.t_lim, p)));

  for (double lo : {0.2, 0.5, 0.05}) {
    p.omega_lower = lo;
    const big e3 = boost::multiprecision::exp(big(3));
    const big half = big(lo) + (1 - big(lo)) * (boost::multiprecision::exp(big(3) / 2) - 1) / (e3 - 1);
    const double got = edge_weight(Seconds{tl / 2}, p);
    if (std::abs(got - half.convert_to<double>()) > kWeightTol)
      f.add(fmt::format("w(t_lim/2) = {:.17g} for omega_lower {}", got, lo));
  }
  p.omega_lower = 0.2;
  if (std::abs(edge_weight(Seconds{tl / 2}, p) - 0.345940419045085072) > kWeightTol)
    f.add("w(3.5 days) differs from 0.345940419045085072");

  double prev = 2;
  for (int i = 0; i <= 1000; ++i) {
    const double w = edge_weight(Seconds{tl * 2 * i / 1000}, p);
    if (w > prev) f.add(fmt::format("increase at grid point {}", i));
    if (i * 2 < 1000 && !(w < prev)) f.add(fmt::format("not strictly decreasing at grid point {}", i));
    prev = w;
  }
  const double sec = since(t0);
  if (sec > kWeightLimitSec) f.add(fmt::format("took {:.3f} s", sec));
  return f.outcome(fmt::format("endpoints, midpoint within {:g} of 50-digit value, 1001-point grid monotone, {:.3f} s",
                               kWeightTol, sec));
}

// ---- 2 ----------------------------------------------------------------------

Outcome topic_edges_vs_oracle() {
  std::mt19937_64 rng(1000);
  NetParams p;
  Failures f;
  std::size_t total = 0;
  double lib_sec = 0;
  const auto t0 = Clock::now();
  for (int t = 0; t < 100; ++t) {
    const auto topic = oracle::random_topic(rng, 200);
    std::vector<NetPost> posts;
    for (const auto& x : topic) posts.push_back({x.seq, x.node, x.timestamp});
    const auto tl = Clock::now();
    auto got = build_topic_edges(t, posts, p);
    lib_sec += since(tl);
    auto want = oracle::topic_edges(t, topic, p);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    total += got.size();
    if (got.size() != want.size()) {
      f.add(fmt::format("topic {}: {} edges, oracle {}", t, got.size(), want.size()));
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i)
      if (got[i].key() != want[i].key() || std::abs(got[i].weight - want[i].weight) > 1e-12) {
        f.add(fmt::format("topic {}: edge {} differs", t, i));
        break;
      }
  }
  const double sec = since(t0);
  if (sec > kEdgeLimitSec) f.add(fmt::format("took {:.1f} s", sec));
  return f.outcome(fmt::format("100 topics, {} edges equal the exhaustive oracle, {:.2f} s ({:.3f} s library)", total,
                               sec, lib_sec));
}

// ---- synthetic corpora (3, 4, 6) -------------------------------------------

struct TableDiff {
  bool rows = false;                // row count or header changed
  std::set<std::string> columns;    // otherwise: columns with a differing cell
};

std::optional<TableDiff> diff_table(const fs::path& a, const fs::path& b) {
  const std::string ta = read_file(a), tb = read_file(b);
  if (ta == tb) return std::nullopt;
  const Table A = read_table(a), B = read_table(b);
  TableDiff d;
  if (A.header != B.header || A.rows.size() != B.rows.size()) {
    d.rows = true;
    return d;
  }
  for (std::size_t r = 0; r < A.rows.size(); ++r)
    for (std::size_t c = 0; c < A.header.size(); ++c)
      if (A.rows[r][c] != B.rows[r][c]) d.columns.insert(A.header[c]);
  return d;
}

// Tables and columns each toggle may change relative to the clean corpus.
// "*" admits any change to the table.
using Scope = std::map<std::string, std::set<std::string>>;

const std::map<std::string, Scope>& toggle_scopes() {
  static const std::map<std::string, Scope> s = [] {
    const std::string man = tables::kIngestManifest;
    std::map<std::string, Scope> m;
    m["today_tomorrow_dates"] = {{man, {"*"}}};
    m["midnight_offset"] = {{man, {"*"}}};
    m["seven_day_mtime_fault"] = {{man, {"*"}}};
    m["moved_topics"] = {{man, {"*"}},
                         {tables::kForum.path, {"pages", "posts", "posts_found", "topics", "topics_found", "topics_visible"}},
                         {tables::kTopic.path, {"*"}}};
    m["banned_uid_reuse"] = {{man, {"*"}},
                             {tables::kForumScrapes.path, {"users"}},
                             {tables::kTopic.path, {"first_uid", "lp_uid"}},
                             {tables::kPost.path, {"uid", "edit_uid"}},
                             {tables::kUser.path, {"*"}},
                             {tables::kMatch.path, {"*"}}};
    m["multi_username_uid"] = {{man, {"*"}}, {tables::kUser.path, {"username"}}, {tables::kMatch.path, {"*"}}};
    m["lid_off_by_one"] = {{man, {"*"}}, {tables::kListings.path, {"*"}}, {tables::kFeedback.path, {"*"}}};
    m["substring_titles"] = {{man, {"*"}}, {tables::kListings.path, {"title"}}};
    m["category_rename"] = {{man, {"*"}}, {tables::kCategories.path, {"category"}}};
    m["rank_epoch_switch"] = {{man, {"*"}}, {tables::kVendors.path, {"rank"}}};
    m["hidden_id_gaps"] = {{man, {"*"}},
                           {tables::kForumScrapes.path, {"fora", "posts", "topics", "users"}},
                           {tables::kForum.path, {"topics"}}};
    m["post_deletion_gaps"] = {{man, {"*"}},
                               {tables::kGaps.path, {"*"}},
                               {tables::kPost.path, {"seq_id"}},
                               {tables::kTopic.path, {"posts"}}};
    m["field_conflicts"] = {{man, {"*"}},
                            {tables::kTopic.path, {"title", "views"}},
                            {tables::kUser.path, {"title", "num_posts"}},
                            {tables::kVendors.path, {"sales"}}};
    return m;
  }();
  return s;
}

struct SynthRun {
  std::string name;  // "clean" or the toggle
  fs::path dir;
  PipelineConfig cfg;
  std::string error;
};

std::vector<SynthRun> run_synthetic(const fs::path& work) {
  std::vector<std::string> names{"clean"};
  for (const auto& n : AnomalyToggles::names()) names.push_back(n);
  std::vector<SynthRun> runs;
  for (const auto& n : names) {
    SynthRun r;
    r.name = n;
    r.dir = work / ("synth-" + n);
    fs::remove_all(r.dir);
    try {
      CorpusProfile p;
      p.seed = kSyntheticSeed;
      if (n != "clean") *p.anomalies.find(n) = true;
      generate_corpus(p, r.dir);
      r.cfg = load_config(r.dir / "pipeline.conf", {});
      std::ostringstream log;
      run_all(r.cfg, {}, log);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    runs.push_back(std::move(r));
  }
  return runs;
}

Outcome manifest_equality(const std::vector<SynthRun>& runs) {
  Failures f;
  const SynthRun& clean = runs.front();
  std::size_t compared = 0;
  for (const auto& r : runs) {
    if (!r.error.empty()) {
      f.add(fmt::format("{}: {}", r.name, r.error));
      continue;
    }
    for (const auto& path : tables::canonical_paths()) {
      ++compared;
      if (read_file(r.cfg.out / path) != read_file(r.dir / "manifest" / path))
        f.add(fmt::format("{}: {} differs from the manifest", r.name, path));
    }
    if (&r == &clean || !clean.error.empty()) continue;
    const Scope& scope = toggle_scopes().at(r.name);
    for (const auto& path : tables::canonical_paths()) {
      const auto d = diff_table(clean.cfg.out / path, r.cfg.out / path);
      if (!d) continue;
      const auto it = scope.find(path);
      const bool any = it != scope.end() && it->second.count("*");
      if (any) continue;
      if (d->rows) {
        f.add(fmt::format("{}: rows of {} changed", r.name, path));
        continue;
      }
      for (const auto& c : d->columns)
        if (it == scope.end() || !it->second.count(c)) f.add(fmt::format("{}: {} column {} changed", r.name, path, c));
    }
  }
  return f.outcome(fmt::format("clean corpus and {} single toggles: {} tables byte-identical, changes confined to "
                               "governed fields",
                               runs.size() - 1, compared));
}

Outcome snapshot_monotonicity(const std::vector<SynthRun>& runs) {
  Failures f;
  const auto months = month_range(2014, 1, 2015, 3);
  std::size_t pairs = 0, files = 0;
  for (const auto& r : runs) {
    if (!r.error.empty()) {
      f.add(fmt::format("{}: {}", r.name, r.error));
      continue;
    }
    std::vector<TemporalEdge> prev;
    bool first = true;
    for (auto [y, m] : months) {
      const fs::path file = r.cfg.out / edge_file_name(y, m);
      if (!fs::exists(file)) {
        f.add(fmt::format("{}: {} missing", r.name, file.filename().string()));
        break;
      }
      ++files;
      auto cur = read_edges(file);
      std::sort(cur.begin(), cur.end());
      const auto cutoff = network_seconds(end_of_month(y, m));
      for (const auto& e : cur)
        if (e.timestamp > cutoff) {
          f.add(fmt::format("{}: edge after {}-{} in its snapshot", r.name, y, m));
          break;
        }
      if (!first) {
        ++pairs;
        if (!std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()))
          f.add(fmt::format("{}: {}-{} does not contain the previous snapshot", r.name, y, m));
      }
      first = false;
      prev = std::move(cur);
    }
  }
  return f.outcome(fmt::format("{} corpora, {} snapshot files, {} consecutive pairs nested", runs.size(), files, pairs));
}

std::vector<std::pair<std::int64_t, std::string>> id_names(const fs::path& file, const char* id_col) {
  std::vector<std::pair<std::int64_t, std::string>> out;
  const Table t = read_table(file);
  const auto i = t.column(id_col), n = t.column("username");
  for (const auto& row : t.rows) out.emplace_back(field::req_int(row[i], id_col), row[n]);
  return out;
}

Outcome match_counts(const std::vector<SynthRun>& runs) {
  Failures f;
  std::size_t rows = 0, cases = 0;
  for (const auto& r : runs) {
    if (!r.error.empty()) continue;
    const auto users = id_names(r.cfg.out / tables::kUser.path, "uid");
    const auto vendors = id_names(r.cfg.out / tables::kVendors.path, "vid");
    const auto want = oracle::match_rows(users, vendors);
    const std::size_t got = read_table(r.cfg.out / tables::kMatch.path).rows.size();
    ++cases;
    rows += got;
    if (got != want.rows) f.add(fmt::format("{}: {} rows, join gives {}", r.name, got, want.rows));
  }
  std::mt19937_64 rng(66);
  for (int round = 0; round < 200; ++round) {
    const int pool = std::uniform_int_distribution<int>(1, 30)(rng);
    std::uniform_int_distribution<int> name(0, pool);
    auto draw = [&](int n) {
      std::vector<std::pair<std::int64_t, std::string>> v;
      std::uniform_int_distribution<std::int64_t> id(1, std::max(1, n / 2));
      for (int i = 0; i < n; ++i) {
        const int k = name(rng);
        v.emplace_back(id(rng), k == 0 ? "" : (k % 7 == 0 ? fmt::format("User{}", k) : fmt::format("user{}", k)));
      }
      return v;
    };
    const auto users = draw(std::uniform_int_distribution<int>(0, 60)(rng));
    const auto vendors = draw(std::uniform_int_distribution<int>(0, 30)(rng));
    const auto got = match_users(users, vendors);
    const auto want = oracle::match_rows(users, vendors);
    ++cases;
    rows += got.size();
    if (got.size() != want.rows) f.add(fmt::format("random round {}: {} rows, join gives {}", round, got.size(), want.rows));
  }
  return f.outcome(fmt::format("{} cases ({} synthetic outputs), {} rows, counts equal the nested-loop join", cases,
                               runs.size(), rows));
}

// ---- 5 ----------------------------------------------------------------------

Outcome graph_stats_vs_oracle() {
  std::mt19937_64 rng(5005);
  Failures f;
  double lib_sec = 0;
  std::size_t nodes = 0;
  for (int round = 0; round < 50; ++round) {
    auto [ids, edges] = oracle::random_graph(rng, 500);
    nodes += ids.size();
    const auto tl = Clock::now();
    const StaticGraph g = StaticGraph::build(ids, edges);
    const auto wl = weak_components(g), sl = strong_components(g);
    const auto cl = local_clustering(g);
    const auto s = compute_stats(ids, edges, true);
    lib_sec += since(tl);

    const oracle::Graph o = oracle::graph_of(ids, edges);
    const auto owl = oracle::wcc(o), osl = oracle::scc(o);
    if (oracle::canonical(wl) != owl) f.add(fmt::format("graph {}: WCC membership", round));
    if (oracle::canonical(sl) != osl) f.add(fmt::format("graph {}: SCC membership", round));
    auto count = [](const std::vector<int>& l) { return l.empty() ? 0 : *std::max_element(l.begin(), l.end()) + 1; };
    if (s.wcc_count != count(owl)) f.add(fmt::format("graph {}: WCC count {} vs {}", round, s.wcc_count, count(owl)));
    if (s.scc_count != count(osl)) f.add(fmt::format("graph {}: SCC count {} vs {}", round, s.scc_count, count(osl)));
    const auto ocl = oracle::clustering(o);
    for (std::size_t v = 0; v < cl.size(); ++v)
      if (std::abs(cl[v] - ocl[v]) > kClusteringTol) {
        f.add(fmt::format("graph {}: clustering of node {}", round, v));
        break;
      }
    if (count(owl) == 0) continue;
    std::vector<int> size(count(owl), 0);
    for (int l : owl)
      if (l >= 0) ++size[l];
    const int big = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
    std::vector<int> members;
    for (int v = 0; v < o.n; ++v)
      if (owl[v] == big) members.push_back(v);
    const auto du = oracle::diameter(o, members, false), dd = oracle::diameter(o, members, true);
    if (s.diameter_undirected != du) f.add(fmt::format("graph {}: undirected diameter {} vs {}", round, s.diameter_undirected, du));
    if (s.diameter_directed != dd) f.add(fmt::format("graph {}: directed diameter {} vs {}", round, s.diameter_directed, dd));
  }
  if (lib_sec > kStatsLimitSec) f.add(fmt::format("library took {:.1f} s", lib_sec));
  return f.outcome(fmt::format("50 graphs, {} nodes: components, clustering within {:g} and diameters match, {:.2f} s",
                               nodes, kClusteringTol, lib_sec));
}

// ---- 7, 8 -------------------------------------------------------------------

Outcome hidden_estimates() {
  struct Row {
    std::int64_t max_seen, found;
    std::optional<std::int64_t> surplus;
    std::int64_t hidden;
    const char* pct;
  };
  const Row rows[] = {{40, 30, 0, 10, "25.0"},
                      {56826, 50271, 610, 5945, "10.5"},
                      {560023, 514256, std::nullopt, 45767, "8.2"},
                      {39849, 28951, 10715, 183, "0.5"}};
  Failures f;
  for (const auto& r : rows) {
    const auto e = estimate_hidden("id", r.max_seen, r.found, r.surplus);
    if (e.hidden != r.hidden || e.hidden_pct() != r.pct)
      f.add(fmt::format("({}, {}): {} ({}%), want {} ({}%)", r.max_seen, r.found, e.hidden, e.hidden_pct(), r.hidden,
                        r.pct));
  }
  return f.outcome("4 reference rows reproduced exactly");
}

Outcome rank_boundaries() {
  const Date pre = make_date(2014, 3, 1), post = make_date(2014, 9, 1);
  using V = RankVerdict;
  struct Case {
    const char* rank;
    std::optional<std::int64_t> sales;
    std::optional<double> rev, appr;
    Date date;
    V want;
  };
  const Case cases[] = {
      {"Freshman", 4, {}, {}, pre, V::Consistent},       {"Freshman", 5, {}, {}, pre, V::Inconsistent},
      {"Sophomore", 5, {}, {}, pre, V::Consistent},      {"Sophomore", 4, {}, {}, pre, V::Inconsistent},
      {"Sophomore", 8, {}, {}, pre, V::Consistent},      {"Sophomore", 9, {}, {}, pre, V::Inconsistent},
      {"Grandmaster", 1024, {}, {}, pre, V::Consistent}, {"Grandmaster", 1025, {}, {}, pre, V::Inconsistent},
      {"Godlike", 1025, {}, {}, pre, V::Consistent},     {"Godlike", 1024, {}, {}, pre, V::Inconsistent},
      {"Level 1", 24, {}, {}, post, V::Consistent},      {"Level 1", 25, {}, {}, post, V::SalesExceedRange},
      {"Level 2", 25, 1.0, 0.9, post, V::Consistent},    {"Level 2", 24, 1.0, 0.9, post, V::Inconsistent},
      {"Level 2", 99, 1.0, 0.9, post, V::Consistent},    {"Level 2", 150, 2.0, 0.95, post, V::SalesExceedRange},
      {"Level 2", 50, 0.5, 0.95, post, V::Inconsistent}, {"Level 2", 50, 2.0, 0.85, post, V::Inconsistent},
      {"Level 3", {}, 20.0, 0.99, post, V::Unknown},     {"Freshman", 3, {}, {}, post, V::Inconsistent},
      {"Level 1", 3, {}, {}, make_date(2014, 5, 4), V::Inconsistent},
      {"Level 1", 3, {}, {}, make_date(2014, 5, 5), V::Consistent},
  };
  Failures f;
  for (const auto& c : cases) {
    const V got = check_rank(c.rank, c.sales, c.rev, c.appr, c.date);
    if (got != c.want)
      f.add(fmt::format("{} with {} sales on {}: {}, want {}", c.rank, c.sales ? std::to_string(*c.sales) : "?",
                        format_date(c.date), to_string(got), to_string(c.want)));
  }
  return f.outcome(fmt::format("{} boundary cases across both rank systems", std::size(cases)));
}

// ---- 9 ----------------------------------------------------------------------

struct ChildRun {
  int status = -1;
  double seconds = 0;
  long max_rss_kb = 0;
};

ChildRun run_child(const std::vector<std::string>& argv, const fs::path& cwd, const fs::path& log) {
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const auto t0 = Clock::now();
  const pid_t pid = fork();
  if (pid == 0) {
    if (chdir(cwd.c_str()) != 0) _exit(127);
    const int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, 1);
      dup2(fd, 2);
    }
    execv(args[0], args.data());
    _exit(127);
  }
  ChildRun r;
  int status = 0;
  rusage ru{};
  if (pid > 0 && wait4(pid, &status, 0, &ru) == pid) {
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    r.max_rss_kb = ru.ru_maxrss;
  }
  r.seconds = since(t0);
  return r;
}

Outcome scale_run(const fs::path& work, const std::string& etl) {
  if (etl.empty()) return {Outcome::Fail, "no --etl binary given"};
  const fs::path dir = work / "scale";
  fs::remove_all(dir);
  CorpusProfile p;
  p.seed = kScaleSeed;
  p.forum_scrapes = 15;
  p.market_scrapes = 15;
  p.fora = 20;
  p.users = 5000;
  p.topics = 4000;
  p.posts_per_topic = 20;
  p.vendors = 500;
  p.listings_per_vendor = 6;
  const auto tg = Clock::now();
  const auto summary = generate_corpus(p, dir);
  const double gen_sec = since(tg);

  const PipelineConfig cfg = load_config(dir / "pipeline.conf", {});
  const std::uintmax_t shard = cfg.shard_bytes;
  // Memory must not grow with the corpus: a fixed allowance plus a few shards.
  const std::uintmax_t rss_limit = (256u << 20) + 4 * shard;
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());

  const auto child = run_child({etl, "--config", "pipeline.conf", "all"}, dir, dir / "etl.log");
  Failures f;
  if (summary.files < kScaleMinFiles) f.add(fmt::format("corpus has only {} files", summary.files));
  if (child.status != 0) f.add(fmt::format("etl all exited with {} (see {})", child.status, (dir / "etl.log").string()));
  if (child.seconds > kScaleLimitSec) f.add(fmt::format("took {:.0f} s", child.seconds));
  const std::uintmax_t rss = static_cast<std::uintmax_t>(child.max_rss_kb) * 1024;
  if (rss > rss_limit) f.add(fmt::format("peak RSS {} MiB over {} MiB", rss >> 20, rss_limit >> 20));
  auto out = f.outcome(fmt::format("{} files: etl all {:.0f} s (limit {:.0f} s) on {} core(s), peak RSS {} MiB "
                                   "(limit {} MiB, shard {} MiB); generation {:.0f} s",
                                   summary.files, child.seconds, kScaleLimitSec, cores, rss >> 20, rss_limit >> 20,
                                   shard >> 20, gen_sec));
  if (out.kind == Outcome::Pass) fs::remove_all(dir);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "dnmetl-acceptance";
  std::string etl;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work" && i + 1 < argc) work = argv[++i];
    else if (a == "--etl" && i + 1 < argc) etl = fs::absolute(argv[++i]).string();
    else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string t; std::getline(ss, t, ',');) only.insert(std::stoi(t));
    } else {
      std::cerr << "usage: acceptance [--work DIR] [--etl PATH] [--only N,M]\n";
      return 2;
    }
  }
  fs::create_directories(work);
  auto wanted = [&](int n) { return only.empty() || only.count(n); };

  std::vector<SynthRun> runs;
  if (wanted(3) || wanted(4) || wanted(6)) runs = run_synthetic(work);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"edge weight curve", edge_weight_curve},
      {"topic edges vs exhaustive oracle", topic_edges_vs_oracle},
      {"snapshot monotonicity", [&] { return snapshot_monotonicity(runs); }},
      {"synthetic corpora vs manifests", [&] { return manifest_equality(runs); }},
      {"graph statistics vs brute force", graph_stats_vs_oracle},
      {"user matching vs nested-loop join", [&] { return match_counts(runs); }},
      {"hidden-data estimates", hidden_estimates},
      {"rank boundaries", rank_boundaries},
      {"100k-file corpus throughput and memory", [&] { return scale_run(work, etl); }},
      {"replication against the original archive",
       [] { return Outcome{Outcome::NotRun, "original scrape archive not available"}; }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!wanted(n)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "NOT RUN";
    failed += o.kind == Outcome::Fail;
    std::cout << fmt::format("criterion {:>2}  {:<7}  {}: {}", n, tag, criteria[i].first, o.detail) << std::endl;
  }
  if (failed == 0)
    for (const auto& r : runs) fs::remove_all(r.dir);
  return failed == 0 ? 0 : 1;
}
