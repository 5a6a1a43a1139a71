#include "dnmetl/user_match.hpp"

#include <map>
#include <set>

#include "dnmetl/tables.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

std::vector<MatchRow> match_users(const std::vector<std::pair<std::int64_t, std::string>>& users,
                                  const std::vector<std::pair<std::int64_t, std::string>>& vendors) {
  std::map<std::string, std::pair<std::set<std::int64_t>, std::set<std::int64_t>>> by_name;
  for (const auto& [uid, name] : users)
    if (!name.empty()) by_name[name].first.insert(uid);
  for (const auto& [vid, name] : vendors)
    if (!name.empty()) by_name[name].second.insert(vid);

  std::vector<MatchRow> rows;
  std::int64_t next = 0;
  for (const auto& [name, ids] : by_name) {
    const auto& [uids, vids] = ids;
    if (!uids.empty() && !vids.empty()) {
      ++next;
      for (auto u : uids)
        for (auto v : vids) rows.push_back({next, name, u, v});
    } else {
      for (auto u : uids) rows.push_back({std::nullopt, name, u, std::nullopt});
      for (auto v : vids) rows.push_back({std::nullopt, name, std::nullopt, v});
    }
  }
  return rows;
}

namespace {

std::vector<std::pair<std::int64_t, std::string>> id_names(const std::filesystem::path& file, const char* id_col) {
  std::set<std::pair<std::int64_t, std::string>> seen;
  std::size_t id = 0, name = 0;
  bool located = false;
  for_each_row(file, [&](const std::vector<std::string>& h, std::vector<std::string>& r) {
    if (!located) {
      Table t{h, {}};
      id = t.column(id_col);
      name = t.column("username");
      located = true;
    }
    seen.emplace(field::req_int(r[id], id_col), r[name]);
  });
  return {seen.begin(), seen.end()};
}

}  // namespace

std::size_t write_user_matching(const std::filesystem::path& out_dir) {
  const auto rows = match_users(id_names(out_dir / tables::kUser.path, "uid"),
                                id_names(out_dir / tables::kVendors.path, "vid"));
  TsvWriter w(out_dir / tables::kMatch.path, tables::kMatch.header);
  for (const auto& r : rows) w.write_row({field::of(r.match_id), r.username, field::of(r.uid), field::of(r.vid)});
  w.commit();
  return rows.size();
}

}  // namespace dnm
