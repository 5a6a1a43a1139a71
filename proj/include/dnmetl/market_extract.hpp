#pragma once

// Per-file extraction of market pages: listings (generic, feedback and
// return-policy formats), store and category listings, and vendor profiles
// (generic, feedback, legacy-sales, pgp and return-policy formats).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnmetl/ingest.hpp"

namespace dnm {

struct RawListingRow {
  std::int64_t lid = 0;
  std::int64_t vid = 0;
  std::optional<std::string> vendor_username;
  std::string title;
  std::optional<std::string> price;  // decimal BTC, verbatim digits
  std::optional<std::int64_t> cid;
  std::optional<std::string> description;
  std::optional<std::string> ships_from;
  std::optional<std::string> ships_to;
  std::optional<std::string> product_class;
  std::optional<bool> listing_available;
  std::optional<std::string> return_policy;
};

struct RawVendorRow {
  std::int64_t vid = 0;
  std::string username;
  std::optional<std::string> rank;
  std::optional<std::int64_t> sales;
  std::optional<std::string> approval_rating;  // fraction, 4 decimals
  std::optional<std::int64_t> positive_feedback, neutral_feedback, negative_feedback;
  std::optional<std::string> legacy_sales;
  std::optional<std::string> pgp_key;
  std::optional<std::string> return_policy;
  std::optional<bool> disabled;  // set only by profile pages
};

struct RawCategoryRow {
  std::int64_t cid = 0;
  std::string name;
  std::optional<std::int64_t> parent_cid;
};

struct RawFeedbackRow {
  std::int64_t lid = 0;
  std::string username;
  std::string date_label;
  std::optional<std::string> message;
};

struct RawMarketBatch {
  ClassifiedFile source;
  std::vector<RawListingRow> listing_rows;
  std::vector<RawVendorRow> vendor_rows;
  std::vector<RawCategoryRow> category_rows;
  std::vector<RawFeedbackRow> feedback_rows;
  std::vector<std::string> diagnostics;

  bool empty() const {
    return listing_rows.empty() && vendor_rows.empty() && category_rows.empty() && feedback_rows.empty();
  }
};

/// "98.50%" -> "0.9850"; "n/a" and anything unparseable -> nullopt.
std::optional<std::string> percent_to_fraction(std::string_view text);

/// "BTC 0.0120" -> "0.0120". Rejects negative or non-decimal values.
std::optional<std::string> parse_price(std::string_view text);

RawMarketBatch extract_market_file(const ClassifiedFile& file, std::string_view contents);

}  // namespace dnm
