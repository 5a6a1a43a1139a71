#include "dnmetl/overrides.hpp"

#include <fmt/format.h>

#include "dnmetl/error.hpp"
#include "dnmetl/tsv.hpp"

namespace dnm {

OverridePatch load_overrides(const std::vector<std::filesystem::path>& files) {
  OverridePatch patch;
  for (const auto& file : files) {
    Table t = read_table(file);
    if (t.header != kOverrideHeader)
      throw InputError(fmt::format("{}: override header must be kind, id, value", file.string()));
    for (const auto& r : t.rows) {
      const std::int64_t id = field::req_int(r[1], "id");
      if (r[0] == "user_name") {
        patch.user_names[id] = r[2];
      } else if (r[0] == "vendor_name") {
        patch.vendor_names[id] = r[2];
      } else if (r[0] == "listing_vendor") {
        patch.listing_vendors[id] = field::req_int(r[2], "vid");
      } else {
        throw InputError(fmt::format("{}: unknown override kind '{}'", file.string(), r[0]));
      }
    }
  }
  return patch;
}

void write_overrides(const std::filesystem::path& file, const OverridePatch& patch) {
  TsvWriter w(file, kOverrideHeader);
  for (const auto& [uid, name] : patch.user_names) w.write_row({"user_name", std::to_string(uid), name});
  for (const auto& [vid, name] : patch.vendor_names) w.write_row({"vendor_name", std::to_string(vid), name});
  for (const auto& [lid, vid] : patch.listing_vendors)
    w.write_row({"listing_vendor", std::to_string(lid), std::to_string(vid)});
  w.commit();
}

}  // namespace dnm
