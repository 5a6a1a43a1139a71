#include "dnmetl/pipeline.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dnmetl/error.hpp"
#include "dnmetl/forum_extract.hpp"
#include "dnmetl/forum_resolve.hpp"
#include "dnmetl/market_extract.hpp"
#include "dnmetl/market_resolve.hpp"
#include "dnmetl/net_stats.hpp"
#include "dnmetl/overrides.hpp"
#include "dnmetl/quality.hpp"
#include "dnmetl/raw_io.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/text.hpp"
#include "dnmetl/tsv.hpp"
#include "dnmetl/user_match.hpp"

namespace dnm {

namespace fs = std::filesystem;

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("SHA-256 initialisation failed");
  }
  void update(std::string_view d) { EVP_DigestUpdate(ctx_.get(), d.data(), d.size()); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    std::string out;
    for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

constexpr std::array<std::string_view, 7> kStageNames{"ingest", "extract", "resolve", "match",
                                                      "network", "stats", "quality"};

std::string rel(const fs::path& p, const fs::path& base) { return p.lexically_relative(base).generic_string(); }

// Path, size and modification time of every regular file under root.
// Reading 100k pages twice just to notice nothing changed is too costly;
// classification itself keys on mtime, so a touched file reruns ingest.
std::string tree_fingerprint(const fs::path& root) {
  std::vector<std::string> lines;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    auto t = file_mtime(e.path());
    lines.push_back(fmt::format("{}\t{}\t{}", rel(e.path(), root), e.file_size(), format_datetime(t)));
  }
  std::sort(lines.begin(), lines.end());
  Sha256 h;
  for (const auto& l : lines) {
    h.update(l);
    h.update("\n");
  }
  return h.hex();
}

struct Required {
  fs::path file;
  Stage producer;
};

struct StagePlan {
  std::vector<Required> required;
  std::vector<fs::path> inputs;  // hashed by content
  bool hash_tree = false;        // also fingerprint cfg.root
  std::string params;
  std::vector<std::string> out_dirs;  // relative to cfg.out, owned by the stage
};

std::string months_param(const NetworkOptions& n) {
  return fmt::format("{}-{:02}..{}-{:02}", n.first_year, n.first_month, n.last_year, n.last_month);
}

std::vector<fs::path> snapshot_files(const PipelineConfig& cfg) {
  std::vector<fs::path> files;
  const auto& n = cfg.network;
  for (auto [y, m] : month_range(n.first_year, n.first_month, n.last_year, n.last_month))
    files.push_back(cfg.out / edge_file_name(y, m));
  return files;
}

StagePlan plan_for(Stage s, const PipelineConfig& cfg) {
  const fs::path& o = cfg.out;
  StagePlan p;
  auto need = [&](const fs::path& rel_path, Stage producer) {
    p.required.push_back({o / rel_path, producer});
    p.inputs.push_back(o / rel_path);
  };
  switch (s) {
    case Stage::Ingest: {
      p.hash_tree = true;
      const auto& m = cfg.markers;
      p.params = fmt::format("error={}\nlogged_out={}\nobscured={}\nforum_end={}\nmarket_end={}",
                             join(m.error, "|"), join(m.logged_out, "|"), join(m.obscured, "|"),
                             m.forum_content_end, m.market_content_end);
      p.out_dirs = {"ingest"};
      break;
    }
    case Stage::Extract:
      p.hash_tree = true;
      need(tables::kIngestManifest, Stage::Ingest);
      p.out_dirs = {"raw"};
      break;
    case Stage::Resolve:
      for (const auto& f : raw::all_files()) need(fs::path("raw") / f, Stage::Extract);
      need(tables::kScrapeIndex, Stage::Ingest);
      for (const auto& f : cfg.overrides) p.inputs.push_back(f);
      p.params = fmt::format("posts_per_page={}\nsales_from_mscrape={}", cfg.posts_per_page, cfg.sales_from_mscrape);
      p.out_dirs = {"forum", "market", "diagnostics"};
      break;
    case Stage::Match:
      need(tables::kUser.path, Stage::Resolve);
      need(tables::kVendors.path, Stage::Resolve);
      p.out_dirs = {"forum-market"};
      break;
    case Stage::Network: {
      need(tables::kUser.path, Stage::Resolve);
      need(tables::kPost.path, Stage::Resolve);
      need(tables::kMatch.path, Stage::Match);
      const auto& n = cfg.network.params;
      p.params = fmt::format("delta_phi={}\ndelta_t={}\nomega_lower={}\nt_lim={}\nomega_first={}\nmonths={}",
                             n.delta_phi, n.delta_t.count(), n.omega_lower, n.t_lim.count(), n.omega_first,
                             months_param(cfg.network));
      p.out_dirs = {"network"};
      break;
    }
    case Stage::Stats:
      need(tables::kNodes.path, Stage::Network);
      for (const auto& f : snapshot_files(cfg)) {
        p.required.push_back({f, Stage::Network});
        p.inputs.push_back(f);
      }
      p.params = fmt::format("diameters={}\nmonths={}", static_cast<int>(cfg.diameters), months_param(cfg.network));
      p.out_dirs = {"stats"};
      break;
    case Stage::Quality:
      for (const auto& path : tables::canonical_paths())
        need(path, path.starts_with("ingest/")       ? Stage::Ingest
                   : path.starts_with("forum-market/") ? Stage::Match
                                                       : Stage::Resolve);
      p.params = fmt::format("sales_from_mscrape={}", cfg.sales_from_mscrape);
      p.out_dirs = {"quality"};
      break;
  }
  return p;
}

fs::path stamp_path(const PipelineConfig& cfg, Stage s) { return cfg.out / ".stamps" / std::string(to_string(s)); }

std::string input_digest(Stage s, const StagePlan& p, const PipelineConfig& cfg) {
  Sha256 h;
  h.update(fmt::format("stage {}\n{}\n", to_string(s), p.params));
  if (p.hash_tree) h.update("tree " + tree_fingerprint(cfg.root) + "\n");
  for (const auto& f : p.inputs) h.update(fmt::format("{} {}\n", rel(f, cfg.out), sha256_file(f)));
  return h.hex();
}

std::vector<fs::path> stage_outputs(const PipelineConfig& cfg, const StagePlan& p) {
  std::vector<fs::path> files;
  for (const auto& d : p.out_dirs) {
    if (!fs::is_directory(cfg.out / d)) continue;
    for (const auto& e : fs::recursive_directory_iterator(cfg.out / d))
      if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string stamp_text(const std::string& digest, const PipelineConfig& cfg, const StagePlan& p) {
  std::string s = "inputs " + digest + "\n";
  for (const auto& f : stage_outputs(cfg, p)) s += fmt::format("{}  {}\n", sha256_file(f), rel(f, cfg.out));
  return s;
}

bool up_to_date(Stage s, const std::string& digest, const PipelineConfig& cfg, const StagePlan& p) {
  const fs::path stamp = stamp_path(cfg, s);
  if (!fs::is_regular_file(stamp)) return false;
  return read_file(stamp) == stamp_text(digest, cfg, p);
}

void clear_outputs(const PipelineConfig& cfg, const StagePlan& p) {
  for (const auto& d : p.out_dirs) fs::remove_all(cfg.out / d);
}

std::string execute(Stage s, const PipelineConfig& cfg) {
  const fs::path& o = cfg.out;
  switch (s) {
    case Stage::Ingest: {
      auto index = index_scrapes(cfg.root);
      auto files = classify_scrapes(cfg.root, index, cfg.markers);
      write_scrape_index(o / tables::kScrapeIndex, index);
      write_ingest_manifest(o / tables::kIngestManifest, files);
      std::size_t contributing = std::count_if(files.begin(), files.end(), [](const auto& f) { return f.contributes(); });
      std::string w;
      for (const auto& x : index.warnings) w += fmt::format("\n  warning: {}: {}", x.path.string(), x.message);
      return fmt::format("{} scrapes, {} files, {} usable{}", index.entries.size(), files.size(), contributing, w);
    }
    case Stage::Extract:
      return fmt::format("{} files parsed", extract_all(cfg.root, o));
    case Stage::Resolve: {
      const auto index = read_scrape_index(o / tables::kScrapeIndex);
      const auto patch = load_overrides(cfg.overrides);
      auto fr = resolve_forum(o / "raw", index, patch, o,
                              ForumResolveOptions{cfg.posts_per_page, cfg.shard_bytes, o / ".scratch"});
      MarketResolveOptions mo;
      mo.sales_from_mscrape = cfg.sales_from_mscrape;
      auto mr = resolve_market(o / "raw", index, patch, o, mo);
      TsvWriter diag(o / "diagnostics" / "resolve.tsv", {"side", "message"});
      for (const auto& d : fr.diagnostics) diag.write_row({"forum", d});
      for (const auto& d : mr.diagnostics) diag.write_row({"market", d});
      diag.commit();
      return fmt::format("forum: {} fora, {} topics, {} posts, {} users, {} gaps ({} shards); "
                         "market: {} categories, {} listings, {} vendors, {} feedback; {} diagnostics",
                         fr.fora, fr.topics, fr.posts, fr.users, fr.gaps, fr.shards, mr.categories, mr.listings,
                         mr.vendors, mr.feedback, fr.diagnostics.size() + mr.diagnostics.size());
    }
    case Stage::Match:
      return fmt::format("{} match rows", write_user_matching(o));
    case Stage::Network: {
      auto r = build_network(o, cfg.network);
      return fmt::format("{} nodes, {} edges, {} snapshots, {} posts skipped, {} clamped", r.nodes, r.edges,
                         r.snapshots, r.skipped_posts, r.clamped);
    }
    case Stage::Stats: {
      const auto files = snapshot_files(cfg);
      NetworkStats last;
      for (const auto& f : files) {
        const bool diam = cfg.diameters == Diameters::All || (cfg.diameters == Diameters::Last && f == files.back());
        last = write_snapshot_stats(o, f, StatsOptions{diam});
      }
      const auto& n = cfg.network;
      write_growth(o, month_range(n.first_year, n.first_month, n.last_year, n.last_month));
      return fmt::format("{} snapshots; final: {} nodes, {} static edges, {} WCC, {} SCC", files.size(), last.nodes,
                         last.static_edges, last.wcc_count, last.scc_count);
    }
    case Stage::Quality: {
      auto q = write_quality(o, cfg.sales_from_mscrape);
      return fmt::format("{} hidden-data estimates, {} field tables", q.hidden.size(), q.field_tables);
    }
  }
  return {};
}

StageOutcome run_one(Stage s, const PipelineConfig& cfg, const RunOptions& opt, std::ostream& log,
                     bool upstream_pending) {
  StageOutcome out;
  out.stage = s;
  if (s == Stage::Ingest || s == Stage::Extract) {
    if (!fs::is_directory(cfg.root))
      throw InputError(fmt::format("scrape root '{}' is not a directory", cfg.root.string()));
  }
  const StagePlan p = plan_for(s, cfg);
  std::vector<std::string> missing;
  std::optional<Stage> first_missing;
  for (const auto& r : p.required)
    if (!fs::is_regular_file(r.file)) {
      missing.push_back(rel(r.file, cfg.out));
      if (!first_missing || *first_missing > r.producer) first_missing = r.producer;
    }
  if (!missing.empty() && !(opt.dry_run && upstream_pending))
    throw InputError(fmt::format("stage `{}` needs {} from stage `{}`; run `etl {}` first", to_string(s),
                                 missing.front(), to_string(*first_missing), to_string(*first_missing)));

  if (opt.dry_run) {
    out.planned = true;
    if (!missing.empty() || upstream_pending) out.summary = "would run (after upstream stages)";
    else if (!opt.force && up_to_date(s, input_digest(s, p, cfg), cfg, p)) {
      out.skipped = true;
      out.summary = "up to date";
    } else
      out.summary = "would run";
    log << fmt::format("{}: {}\n", to_string(s), out.summary);
    return out;
  }

  const std::string digest = input_digest(s, p, cfg);
  if (!opt.force && up_to_date(s, digest, cfg, p)) {
    out.skipped = true;
    out.summary = "up to date";
    log << fmt::format("{}: {}\n", to_string(s), out.summary);
    return out;
  }
  fs::remove(stamp_path(cfg, s));
  clear_outputs(cfg, p);
  out.summary = execute(s, cfg);
  write_file_atomic(stamp_path(cfg, s), stamp_text(digest, cfg, p));
  log << fmt::format("{}: {}\n", to_string(s), out.summary);
  return out;
}

void apply_jobs(const PipelineConfig& cfg) {
#ifdef _OPENMP
  if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
#else
  (void)cfg;
#endif
}

}  // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> stage_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i)
    if (kStageNames[i] == s) return static_cast<Stage>(i);
  return std::nullopt;
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> v{Stage::Ingest,  Stage::Extract, Stage::Resolve, Stage::Match,
                                    Stage::Network, Stage::Stats,   Stage::Quality};
  return v;
}

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex();
}

std::string sha256_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", file.string()));
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

std::size_t extract_all(const fs::path& root, const fs::path& out) {
  const auto manifest = read_ingest_manifest(out / tables::kIngestManifest);
  std::vector<const ClassifiedFile*> work;
  for (const auto& f : manifest)
    if (f.contributes()) work.push_back(&f);

  RawWriter writer(out / "raw");
  constexpr std::size_t kChunk = 512;  // pages held in memory at once
  std::vector<RawForumBatch> forum(kChunk);
  std::vector<RawMarketBatch> market(kChunk);
  std::vector<std::string> errors(kChunk);
  for (std::size_t base = 0; base < work.size(); base += kChunk) {
    const std::size_t n = std::min(kChunk, work.size() - base);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = 0; i < n; ++i) {
      const ClassifiedFile& f = *work[base + i];
      errors[i].clear();
      try {
        const std::string contents = read_file(root / f.path);
        if (f.side == Side::Forum) forum[i] = extract_forum_file(f, contents);
        else market[i] = extract_market_file(f, contents);
      } catch (const std::exception& e) {
        errors[i] = fmt::format("{}: {}", f.path, e.what());
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!errors[i].empty()) throw InputError(errors[i]);
      if (work[base + i]->side == Side::Forum) {
        writer.add(forum[i]);
        forum[i] = {};
      } else {
        writer.add(market[i]);
        market[i] = {};
      }
    }
  }
  writer.commit();
  return work.size();
}

StageOutcome run_stage(Stage stage, const PipelineConfig& cfg, const RunOptions& opt, std::ostream& log) {
  apply_jobs(cfg);
  return run_one(stage, cfg, opt, log, false);
}

std::vector<StageOutcome> run_all(const PipelineConfig& cfg, const RunOptions& opt, std::ostream& log) {
  apply_jobs(cfg);
  std::vector<StageOutcome> out;
  bool pending = false;
  for (Stage s : all_stages()) {
    out.push_back(run_one(s, cfg, opt, log, pending));
    if (out.back().planned && !out.back().skipped) pending = true;
  }
  return out;
}

}  // namespace dnm
