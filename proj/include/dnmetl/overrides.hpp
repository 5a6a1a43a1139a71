#pragma once

// Manual fixes supplied as data: a TSV with columns kind, id, value where
// kind is one of user_name, vendor_name, listing_vendor.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dnm {

struct OverridePatch {
  std::map<std::int64_t, std::string> user_names;    // uid -> username
  std::map<std::int64_t, std::string> vendor_names;  // vid -> username
  std::map<std::int64_t, std::int64_t> listing_vendors;  // lid -> vid

  bool empty() const { return user_names.empty() && vendor_names.empty() && listing_vendors.empty(); }
};

inline const std::vector<std::string> kOverrideHeader{"kind", "id", "value"};

/// Merges every file in order; later files win on the same key.
OverridePatch load_overrides(const std::vector<std::filesystem::path>& files);
void write_overrides(const std::filesystem::path& file, const OverridePatch& patch);

}  // namespace dnm
