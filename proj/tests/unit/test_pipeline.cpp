#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "dnmetl/config.hpp"
#include "dnmetl/error.hpp"
#include "dnmetl/network.hpp"
#include "dnmetl/pipeline.hpp"
#include "dnmetl/synth.hpp"
#include "dnmetl/tables.hpp"
#include "dnmetl/tsv.hpp"

using namespace dnm;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  fs::path dir;
  PipelineConfig cfg;

  explicit Fixture(const std::string& name, std::uint64_t seed = 3) {
    dir = fs::temp_directory_path() / ("dnmetl_pipeline_" + name);
    fs::remove_all(dir);
    CorpusProfile p;
    p.seed = seed;
    generate_corpus(p, dir);
    cfg = load_config(dir / "pipeline.conf", {});
  }
  ~Fixture() { fs::remove_all(dir); }
};

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[e.path().lexically_relative(root).generic_string()] = read_file(e.path());
  return out;
}

}  // namespace

TEST_CASE("stages require their predecessors by name") {
  Fixture fx("order");
  std::ostringstream log;
  try {
    run_stage(Stage::Stats, fx.cfg, {}, log);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("etl network") != std::string::npos);
  }
  try {
    run_stage(Stage::Resolve, fx.cfg, {}, log);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("etl ingest") != std::string::npos);
  }
}

TEST_CASE("all reproduces the generated tables, reruns are no-ops, output is deterministic") {
  Fixture fx("all");
  std::ostringstream log;
  auto first = run_all(fx.cfg, {}, log);
  CHECK(std::none_of(first.begin(), first.end(), [](auto& o) { return o.skipped; }));
  for (const auto& path : tables::canonical_paths())
    CHECK_MESSAGE(read_file(fx.cfg.out / path) == read_file(fx.dir / "manifest" / path), path);

  const auto before = tree(fx.cfg.out);
  auto second = run_all(fx.cfg, {}, log);
  CHECK(std::all_of(second.begin(), second.end(), [](auto& o) { return o.skipped; }));
  CHECK(tree(fx.cfg.out) == before);

  std::ostringstream plan;
  auto dry = run_all(fx.cfg, RunOptions{true, false}, plan);
  CHECK(std::all_of(dry.begin(), dry.end(), [](auto& o) { return o.planned && o.skipped; }));

  // a second output directory from scratch is byte-identical
  PipelineConfig other = fx.cfg;
  other.out = fx.dir / "out2";
  run_all(other, {}, log);
  CHECK(tree(other.out) == before);

  // changing a network parameter reruns network and later stages only
  PipelineConfig changed = fx.cfg;
  changed.network.params.omega_lower = 0.5;
  auto third = run_all(changed, {}, log);
  for (const auto& o : third)
    CHECK(o.skipped == (o.stage != Stage::Network && o.stage != Stage::Stats));
  for (const auto& e : read_edges(changed.out / edge_file_name(2015, 3)))
    CHECK(e.weight >= (e.to_first ? changed.network.params.omega_first : 0.5));
}

TEST_CASE("snapshots are cumulative") {
  Fixture fx("snap", 9);
  std::ostringstream log;
  run_all(fx.cfg, {}, log);
  auto months = month_range(2014, 1, 2015, 3);
  REQUIRE(months.size() == 15);
  std::vector<TemporalEdge> prev;
  for (auto [y, m] : months) {
    REQUIRE(fs::exists(fx.cfg.out / edge_file_name(y, m)));
    auto cur = read_edges(fx.cfg.out / edge_file_name(y, m));
    CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    const auto cutoff = network_seconds(end_of_month(y, m));
    for (const auto& e : cur) CHECK(e.timestamp <= cutoff);
    prev = std::move(cur);
  }
}
