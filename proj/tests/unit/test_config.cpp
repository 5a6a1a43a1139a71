#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dnmetl/config.hpp"
#include "dnmetl/error.hpp"

using namespace dnm;
namespace fs = std::filesystem;

namespace {

fs::path write_conf(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "dnmetl_config_test";
  fs::create_directories(dir);
  std::ofstream(dir / name) << text;
  return dir / name;
}

std::string error_of(const fs::path& f, const std::map<std::string, std::string>& env = {},
                     const std::vector<std::pair<std::string, std::string>>& cli = {}) {
  try {
    load_config(f, env, cli);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("keys, relative paths and defaults") {
  auto f = write_conf("ok.conf",
                      "# comment\nroot = corpus\nout = /tmp/x\nnet.omega_lower = 0.5\nnet.delta_t = 14d\n"
                      "net.first_month = 2014-03\nmarkers.error = A|B\n");
  auto cfg = load_config(f, {});
  CHECK(cfg.root == f.parent_path() / "corpus");
  CHECK(cfg.out == "/tmp/x");
  CHECK(cfg.network.params.omega_lower == 0.5);
  CHECK(cfg.network.params.delta_t == std::chrono::days{14});
  CHECK(cfg.network.first_month == 3u);
  CHECK(cfg.markers.error == std::vector<std::string>{"A", "B"});
  CHECK(cfg.posts_per_page == 25);
}

TEST_CASE("environment overrides the file and the command line overrides both") {
  auto f = write_conf("env.conf", "net.omega_lower = 0.5\nnet.delta_phi = 3\n");
  auto cfg = load_config(f, {{"ETL_NET_OMEGA_LOWER", "0.3"}, {"ETL_NET_DELTA_PHI", "4"}}, {{"net.delta_phi", "5"}});
  CHECK(cfg.network.params.omega_lower == 0.3);
  CHECK(cfg.network.params.delta_phi == 5);
}

TEST_CASE("every configuration problem is reported at once") {
  auto f = write_conf("bad.conf",
                      "net.omega_lower = 2\nbogus.key = 1\nnet.delta_t = soon\nno equals sign\n"
                      "overrides = missing.tsv\nnet.first_month = 2016-01\n");
  const std::string e = error_of(f, {{"ETL_FORUM_POSTS_PER_PAGE", "zero"}});
  CHECK(e.find("omega_lower") != std::string::npos);
  CHECK(e.find("bogus.key") != std::string::npos);
  CHECK(e.find("net.delta_t") != std::string::npos);
  CHECK(e.find("expected key = value") != std::string::npos);
  CHECK(e.find("missing.tsv") != std::string::npos);
  CHECK(e.find("first_month") != std::string::npos);
  CHECK(e.find("ETL_FORUM_POSTS_PER_PAGE") != std::string::npos);
  CHECK(e.find("7 problem(s)") != std::string::npos);
}

TEST_CASE("missing config file is a usage error") {
  CHECK_THROWS_AS(load_config("/nonexistent/etl.conf", {}), UsageError);
}
