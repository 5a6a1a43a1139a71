#include <fmt/format.h>

#include <json.hpp>

#include "dnmetl/error.hpp"
#include "dnmetl/overrides.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/tsv.hpp"
#include "model.hpp"

namespace dnm {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> header_of(const std::string& path) {
  using namespace tables;
  for (const Schema* s : {&kForumScrapes, &kForum, &kTopic, &kPost, &kUser, &kGaps, &kMarketScrapes, &kCategories,
                          &kListings, &kVendors, &kFeedback, &kMatch})
    if (path == s->path) return s->header;
  if (path == kIngestManifest) return kIngestManifestHeader;
  throw InputError(fmt::format("no schema for {}", path));
}

}  // namespace

SynthSummary generate_corpus(const CorpusProfile& profile, const fs::path& out) {
  if (fs::exists(out) && (!fs::is_directory(out) || !fs::is_empty(out)))
    throw UsageError(fmt::format("output directory {} exists and is not empty", out.string()));
  const synth::World world = synth::build_world(profile);
  fs::create_directories(out / "corpus");
  const auto rendered = synth::render_corpus(world, out / "corpus");
  const auto expected = synth::expected_tables(world, rendered.files);

  OverridePatch patch;
  patch.user_names = world.user_name_patch;
  patch.listing_vendors = world.listing_vendor_patch;
  write_overrides(out / "overrides.tsv", patch);

  write_file_atomic(out / "pipeline.conf",
                    fmt::format("# generated with seed {}\nroot = corpus\nout = out\noverrides = overrides.tsv\n"
                                "forum.posts_per_page = {}\nmarket.sales_from_mscrape = {}\n",
                                profile.seed, profile.posts_per_page, profile.sales_from_mscrape));

  for (const auto& path : tables::canonical_paths()) {
    Table t{header_of(path), {}};
    if (auto it = expected.rows.find(path); it != expected.rows.end()) t.rows = it->second;
    fs::create_directories((out / "manifest" / path).parent_path());
    write_table(out / "manifest" / path, t);
  }

  SynthSummary s;
  s.files = rendered.files.size();
  s.forum_pages = rendered.forum_pages;
  s.market_pages = rendered.market_pages;
  s.injected_gaps = expected.gaps;
  for (const auto& f : rendered.files)
    if (f.quirk != Quirk::None) ++s.quirk_files[std::string(to_string(f.quirk))];

  nlohmann::ordered_json j;
  j["seed"] = profile.seed;
  j["files"] = s.files;
  j["forum_pages"] = s.forum_pages;
  j["market_pages"] = s.market_pages;
  j["quirk_files"] = s.quirk_files;
  j["injected_gaps"] = s.injected_gaps;
  nlohmann::ordered_json an = nlohmann::ordered_json::object();
  for (const auto& name : AnomalyToggles::names()) an[name] = profile.anomalies.get(name);
  j["anomalies"] = an;
  nlohmann::ordered_json rows = nlohmann::ordered_json::object();
  for (const auto& path : tables::canonical_paths()) {
    auto it = expected.rows.find(path);
    rows[path] = it == expected.rows.end() ? 0 : it->second.size();
  }
  j["expected_rows"] = rows;
  write_file_atomic(out / "manifest" / "summary.json", j.dump(2) + "\n");
  return s;
}

}  // namespace dnm
