// Python access to the pure computations and to the stage runner.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "dnmetl/config.hpp"
#include "dnmetl/error.hpp"
#include "dnmetl/market_resolve.hpp"
#include "dnmetl/net_stats.hpp"
#include "dnmetl/network.hpp"
#include "dnmetl/pipeline.hpp"
#include "dnmetl/quality.hpp"
#include "dnmetl/synth.hpp"
#include "dnmetl/user_match.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace dnm;

namespace {

NetParams params(std::int64_t delta_phi, std::int64_t delta_t, double omega_lower, std::int64_t t_lim,
                 double omega_first) {
  NetParams p;
  p.delta_phi = delta_phi;
  p.delta_t = Seconds{delta_t};
  p.omega_lower = omega_lower;
  p.t_lim = Seconds{t_lim};
  p.omega_first = omega_first;
  if (auto errs = p.validate(); !errs.empty()) throw UsageError(errs.front());
  return p;
}

py::dict edge_dict(const TemporalEdge& e) {
  py::dict d;
  d["source"] = e.source;
  d["target"] = e.target;
  d["weight"] = e.weight;
  d["to_first"] = e.to_first;
  d["time_diff"] = e.time_diff;
  d["seq_diff"] = e.seq_diff;
  d["timestamp"] = e.timestamp;
  d["tid"] = e.tid;
  return d;
}

std::vector<TemporalEdge> edges_of(const std::vector<std::tuple<std::int64_t, std::int64_t, double>>& edges) {
  std::vector<TemporalEdge> out;
  for (auto [s, t, w] : edges) out.push_back({s, t, w});
  return out;
}

const NetParams kDefaults;

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cryptomarket scrape ETL core";
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_RuntimeError);

  m.def(
      "edge_weight",
      [](std::int64_t time_diff, double omega_lower, std::int64_t t_lim) {
        return edge_weight(Seconds{time_diff}, params(kDefaults.delta_phi, kDefaults.delta_t.count(), omega_lower,
                                                      t_lim, kDefaults.omega_first));
      },
      py::arg("time_diff"), py::arg("omega_lower") = kDefaults.omega_lower,
      py::arg("t_lim") = kDefaults.t_lim.count(), "Edge weight for a reply delay in seconds.");

  m.def(
      "parse_duration",
      [](const std::string& text) -> std::optional<std::int64_t> {
        if (auto s = parse_duration(text)) return s->count();
        return std::nullopt;
      },
      py::arg("text"), "Duration text (e.g. '7d', '1mo') in seconds, or None.");

  m.def(
      "topic_edges",
      [](std::int64_t tid, const std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>>& posts,
         std::int64_t delta_phi, std::int64_t delta_t, double omega_lower, std::int64_t t_lim, double omega_first) {
        std::vector<NetPost> ps;
        for (auto [seq, node, ts] : posts) ps.push_back({seq, node, ts});
        py::list out;
        for (const auto& e : build_topic_edges(tid, ps, params(delta_phi, delta_t, omega_lower, t_lim, omega_first)))
          out.append(edge_dict(e));
        return out;
      },
      py::arg("tid"), py::arg("posts"), py::arg("delta_phi") = kDefaults.delta_phi,
      py::arg("delta_t") = kDefaults.delta_t.count(), py::arg("omega_lower") = kDefaults.omega_lower,
      py::arg("t_lim") = kDefaults.t_lim.count(), py::arg("omega_first") = kDefaults.omega_first,
      "Edges of one topic from (seq, node, timestamp) posts in seq order.");

  m.def(
      "graph_stats",
      [](const std::vector<std::int64_t>& nodes, const std::vector<std::tuple<std::int64_t, std::int64_t, double>>& edges,
         bool diameters) {
        py::dict d;
        for (const auto& [k, v] : stats_rows(compute_stats(nodes, edges_of(edges), diameters))) d[py::str(k)] = v;
        return d;
      },
      py::arg("nodes"), py::arg("edges"), py::arg("diameters") = true,
      "Statistics table for (source, target, weight) edges, keyed by measure.");

  m.def(
      "components",
      [](const std::vector<std::int64_t>& nodes, const std::vector<std::tuple<std::int64_t, std::int64_t, double>>& edges) {
        const auto e = edges_of(edges);
        const StaticGraph g = StaticGraph::build(nodes, e);
        return py::make_tuple(g.ids, weak_components(g), strong_components(g), local_clustering(g));
      },
      py::arg("nodes"), py::arg("edges"), "(ids, wcc labels, scc labels, local clustering); isolated nodes get -1.");

  m.def(
      "estimate_hidden",
      [](std::int64_t max_seen, std::int64_t unique_found, std::optional<std::int64_t> surplus) {
        const auto e = estimate_hidden("id", max_seen, unique_found, surplus);
        return py::make_tuple(e.hidden, e.hidden_pct());
      },
      py::arg("max_seen"), py::arg("unique_found"), py::arg("surplus_reported") = py::none(),
      "(hidden count, percent text).");

  m.def(
      "check_rank",
      [](const std::string& rank, std::optional<std::int64_t> sales, std::optional<double> revenue_btc,
         std::optional<double> approval, const std::string& date) {
        const auto d = parse_date(date);
        if (!d) throw UsageError("date must be YYYY-MM-DD");
        return std::string(to_string(check_rank(rank, sales, revenue_btc, approval, *d)));
      },
      py::arg("rank"), py::arg("sales"), py::arg("revenue_btc") = py::none(), py::arg("approval") = py::none(),
      py::arg("date"), "Rank verdict name.");

  m.def(
      "match_users",
      [](const std::vector<std::pair<std::int64_t, std::string>>& users,
         const std::vector<std::pair<std::int64_t, std::string>>& vendors) {
        py::list out;
        for (const auto& r : match_users(users, vendors)) out.append(py::make_tuple(r.match_id, r.username, r.uid, r.vid));
        return out;
      },
      py::arg("users"), py::arg("vendors"), "(match_id, username, uid, vid) rows.");

  m.def(
      "generate_corpus",
      [](const fs::path& out, std::uint64_t seed, const std::vector<std::string>& anomalies,
         std::optional<fs::path> profile) {
        CorpusProfile p = profile ? CorpusProfile::load(*profile) : CorpusProfile{};
        p.seed = seed;
        for (const auto& a : anomalies) {
          bool* t = p.anomalies.find(a);
          if (!t) throw UsageError("unknown anomaly toggle: " + a);
          *t = true;
        }
        const auto s = generate_corpus(p, out);
        py::dict d;
        d["files"] = s.files;
        d["forum_pages"] = s.forum_pages;
        d["market_pages"] = s.market_pages;
        d["injected_gaps"] = s.injected_gaps;
        return d;
      },
      py::arg("out"), py::arg("seed") = 1, py::arg("anomalies") = std::vector<std::string>{},
      py::arg("profile") = py::none(), "Synthetic corpus with its expected tables under out/manifest.");

  m.attr("anomaly_toggles") = AnomalyToggles::names();

  m.def(
      "run",
      [](const fs::path& config, const std::vector<std::string>& stages,
         const std::vector<std::pair<std::string, std::string>>& settings, bool force, bool dry_run) {
        const PipelineConfig cfg = load_config(config, {}, settings);
        std::vector<Stage> todo;
        for (const auto& s : stages) {
          auto st = stage_from_string(s);
          if (!st) throw UsageError("unknown stage: " + s);
          todo.push_back(*st);
        }
        const RunOptions opt{dry_run, force};
        std::ostringstream log;
        std::vector<StageOutcome> done;
        if (todo.empty()) done = run_all(cfg, opt, log);
        for (Stage s : todo) done.push_back(run_stage(s, cfg, opt, log));
        py::list out;
        for (const auto& o : done) out.append(py::make_tuple(std::string(to_string(o.stage)), o.skipped, o.summary));
        return out;
      },
      py::arg("config"), py::arg("stages") = std::vector<std::string>{},
      py::arg("settings") = std::vector<std::pair<std::string, std::string>>{}, py::arg("force") = false,
      py::arg("dry_run") = false,
      "Runs stages (all when empty) with a config file plus (key, value) settings; returns (stage, skipped, "
      "summary) per stage.");
}
