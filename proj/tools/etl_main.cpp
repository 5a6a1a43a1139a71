// etl: command-line driver for the scrape pipeline.
//
// Exit status: 0 ok, 1 usage or configuration error, 2 input error
// (missing data or prior-stage artifacts), 3 internal failure.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

#include "dnmetl/config.hpp"
#include "dnmetl/error.hpp"
#include "dnmetl/net_stats.hpp"
#include "dnmetl/pipeline.hpp"
#include "dnmetl/synth.hpp"
#include "dnmetl/tables.hpp"

namespace fs = std::filesystem;

namespace {

struct Cli {
  std::string config;
  bool dry_run = false, force = false;
  std::string jobs;
  // stage overrides, applied as config keys
  std::string root, out;
  std::vector<std::string> overrides;
  std::string delta_phi, delta_t, omega_lower, t_lim, omega_first, first_month, last_month;
  std::string posts_per_page, sales_from;
  std::string diameters;
  std::string snapshot;
  // synth
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string profile;
  std::vector<std::string> anomalies;
};

void add_paths(CLI::App* sub, Cli& c, bool positional_root) {
  if (positional_root) sub->add_option("root", c.root, "scrape tree root");
  else sub->add_option("--root", c.root, "scrape tree root");
  sub->add_option("--out", c.out, "artifact directory");
}

void add_net(CLI::App* sub, Cli& c) {
  sub->add_option("--delta-phi", c.delta_phi, "maximum post distance");
  sub->add_option("--delta-t", c.delta_t, "maximum time difference (e.g. 1M, 7d, 3600s)");
  sub->add_option("--omega-lower", c.omega_lower, "weight floor");
  sub->add_option("--t-lim", c.t_lim, "time at which the weight reaches the floor");
  sub->add_option("--omega-first", c.omega_first, "weight of edges to the first post");
  sub->add_option("--first-month", c.first_month, "first snapshot month, YYYY-MM");
  sub->add_option("--last-month", c.last_month, "last snapshot month, YYYY-MM");
}

std::vector<std::pair<std::string, std::string>> cli_keys(const Cli& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) kv.emplace_back(key, v);
  };
  put("root", c.root);
  put("out", c.out);
  if (!c.overrides.empty()) {
    std::string joined;
    for (const auto& o : c.overrides) joined += (joined.empty() ? "" : ",") + o;
    kv.emplace_back("overrides", joined);
  }
  put("jobs", c.jobs);
  put("net.delta_phi", c.delta_phi);
  put("net.delta_t", c.delta_t);
  put("net.omega_lower", c.omega_lower);
  put("net.t_lim", c.t_lim);
  put("net.omega_first", c.omega_first);
  put("net.first_month", c.first_month);
  put("net.last_month", c.last_month);
  put("forum.posts_per_page", c.posts_per_page);
  put("market.sales_from_mscrape", c.sales_from);
  put("stats.diameters", c.diameters);
  return kv;
}

int run_synth(const Cli& c) {
  if (c.out.empty()) throw dnm::UsageError("synth: --out is required");
  dnm::CorpusProfile profile = c.profile.empty() ? dnm::CorpusProfile{} : dnm::CorpusProfile::load(c.profile);
  if (c.seed_given) profile.seed = c.seed;
  std::vector<std::string> bad;
  for (const auto& a : c.anomalies) {
    if (a == "all") {
      for (const auto& n : dnm::AnomalyToggles::names()) *profile.anomalies.find(n) = true;
    } else if (bool* t = profile.anomalies.find(a)) {
      *t = true;
    } else {
      bad.push_back(a);
    }
  }
  if (!bad.empty()) {
    std::string msg = "unknown anomaly toggle(s):";
    for (const auto& b : bad) msg += " " + b;
    throw dnm::UsageError(msg);
  }
  if (c.dry_run) {
    std::cout << fmt::format("synth: would write corpus with seed {} to {}\n", profile.seed, c.out);
    return 0;
  }
  auto s = dnm::generate_corpus(profile, c.out);
  std::cout << fmt::format("synth: {} files ({} forum pages, {} market pages), {} gaps injected\n", s.files,
                           s.forum_pages, s.market_pages, s.injected_gaps);
  return 0;
}

int run_pipeline(const std::string& cmd, const Cli& c) {
  const dnm::PipelineConfig cfg = dnm::load_config(c.config, dnm::etl_environment(), cli_keys(c));
  if (cfg.out.empty()) throw dnm::UsageError("no output directory: set `out` in the config or pass --out");
  const bool needs_root = cmd == "all" || cmd == "ingest" || cmd == "extract";
  if (needs_root && cfg.root.empty())
    throw dnm::UsageError("no scrape root: set `root` in the config or pass --root");
  dnm::RunOptions opt{c.dry_run, c.force};

  if (cmd == "all") {
    dnm::run_all(cfg, opt, std::cout);
    return 0;
  }
  if (cmd == "stats" && !c.snapshot.empty()) {
    // One snapshot on demand, outside the stamped stage.
    if (!fs::is_regular_file(cfg.out / dnm::tables::kNodes.path))
      throw dnm::InputError("stage `stats` needs network/nodes.tsv from stage `network`; run `etl network` first");
    if (!fs::is_regular_file(c.snapshot)) throw dnm::InputError(fmt::format("snapshot {} not found", c.snapshot));
    if (c.dry_run) {
      std::cout << fmt::format("stats: would compute {}\n", c.snapshot);
      return 0;
    }
    auto s = dnm::write_snapshot_stats(cfg.out, c.snapshot, dnm::StatsOptions{cfg.diameters != dnm::Diameters::None});
    std::cout << fmt::format("stats: {} nodes, {} static edges\n", s.nodes, s.static_edges);
    return 0;
  }
  dnm::run_stage(*dnm::stage_from_string(cmd), cfg, opt, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scrape-archive ETL: ingest, extract, resolve, match, network, stats, quality"};
  app.require_subcommand(1);
  Cli c;
  app.add_option("--config", c.config, "key = value configuration file");
  app.add_flag("--dry-run", c.dry_run, "print planned actions without running them");
  app.add_flag("--force", c.force, "rerun stages even when their inputs are unchanged");
  app.add_option("--jobs", c.jobs, "worker threads (0: all cores)");

  std::vector<std::pair<std::string, CLI::App*>> subs;
  auto sub = [&](const std::string& name, const std::string& desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    subs.emplace_back(name, s);
    return s;
  };
  add_paths(sub("ingest", "index scrape folders and classify files"), c, true);
  add_paths(sub("extract", "parse pages into raw tables"), c, false);
  {
    auto* s = sub("resolve", "merge raw tables into the canonical tables");
    s->add_option("--out", c.out, "artifact directory");
    s->add_option("--overrides", c.overrides, "override patch files");
    s->add_option("--posts-per-page", c.posts_per_page, "forum posts per topic page");
    s->add_option("--sales-from", c.sales_from, "first market scrape with trustworthy sales counts");
  }
  sub("match", "link forum users and market vendors by username")->add_option("--out", c.out, "artifact directory");
  {
    auto* s = sub("network", "build the interaction network snapshots");
    s->add_option("--out", c.out, "artifact directory");
    add_net(s, c);
  }
  {
    auto* s = sub("stats", "network statistics per snapshot");
    s->add_option("--out", c.out, "artifact directory");
    s->add_option("--snapshot", c.snapshot, "compute one edge file only");
    s->add_option("--diameters", c.diameters, "snapshots that get all-pairs diameters: all, last or none");
    s->add_option("--first-month", c.first_month, "first snapshot month, YYYY-MM");
    s->add_option("--last-month", c.last_month, "last snapshot month, YYYY-MM");
  }
  {
    auto* s = sub("quality", "data-quality reports");
    s->add_option("--out", c.out, "artifact directory");
    s->add_option("--sales-from", c.sales_from, "first market scrape with trustworthy sales counts");
  }
  {
    auto* s = sub("all", "run every stage in order");
    add_paths(s, c, false);
    s->add_option("--overrides", c.overrides, "override patch files");
    s->add_option("--posts-per-page", c.posts_per_page, "forum posts per topic page");
    s->add_option("--sales-from", c.sales_from, "first market scrape with trustworthy sales counts");
    s->add_option("--diameters", c.diameters, "snapshots that get all-pairs diameters: all, last or none");
    add_net(s, c);
  }
  {
    auto* s = sub("synth", "generate a synthetic corpus with expected tables");
    s->add_option("--seed", c.seed, "random seed")->each([&](const std::string&) { c.seed_given = true; });
    s->add_option("--profile", c.profile, "corpus profile (key = value)");
    s->add_option("--out", c.out, "output directory (must be empty)");
    s->add_option("--anomaly", c.anomalies, "enable an anomaly toggle by name, or `all`");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::string cmd;
  for (const auto& [name, s] : subs)
    if (s->parsed()) cmd = name;

  try {
    return cmd == "synth" ? run_synth(c) : run_pipeline(cmd, c);
  } catch (const dnm::UsageError& e) {
    std::cerr << "etl: " << e.what() << "\n";
    return 1;
  } catch (const dnm::InputError& e) {
    std::cerr << "etl: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "etl: internal error: " << e.what() << "\n";
    return 3;
  }
}
