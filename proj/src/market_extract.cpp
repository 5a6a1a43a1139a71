#include "dnmetl/market_extract.hpp"

#include <fmt/format.h>

#include "dnmetl/html_scan.hpp"
#include "dnmetl/text.hpp"

namespace dnm {

namespace {

std::optional<std::string> opt_text(std::string_view fragment) {
  std::string t = inner_text(fragment);
  if (t.empty()) return std::nullopt;
  return t;
}

// Verbatim inner markup of the first element opened by `open_tag`.
std::optional<std::string> opt_markup(std::string_view doc, std::string_view open_tag) {
  auto at = doc.find(open_tag);
  if (at == html::npos) return std::nullopt;
  std::string_view inner = trim(html::element_inner(doc, at));
  if (inner.empty()) return std::nullopt;
  return std::string(inner);
}

std::optional<std::string_view> element(std::string_view doc, std::string_view open_tag) {
  auto at = doc.find(open_tag);
  if (at == html::npos) return std::nullopt;
  return html::element_inner(doc, at);
}

std::optional<std::int64_t> data_int(std::string_view doc, std::string_view open_tag, std::string_view attr) {
  auto at = doc.find(open_tag);
  if (at == html::npos) return std::nullopt;
  auto v = html::attribute(doc, at, attr);
  if (!v) return std::nullopt;
  return parse_int(*v);
}

// Category chain of <ol class="breadcrumb">, outermost first.
std::vector<RawCategoryRow> breadcrumb_chain(std::string_view doc) {
  std::vector<RawCategoryRow> chain;
  auto crumbs = element(doc, "<ol class=\"breadcrumb\"");
  if (!crumbs) return chain;
  for (const auto& a : html::anchors(*crumbs, "/category/")) {
    auto cid = html::path_int(a.href, "/category/");
    if (!cid) continue;
    RawCategoryRow c;
    c.cid = *cid;
    c.name = a.text;
    if (!chain.empty()) c.parent_cid = chain.back().cid;
    chain.push_back(std::move(c));
  }
  return chain;
}

std::optional<std::string> dl_value(std::string_view dl, std::string_view label) {
  std::size_t pos = 0;
  while (auto dt = html::between(dl, "<dt>", "</dt>", pos)) {
    auto dd = html::between(dl, "<dd>", "</dd>", pos);
    if (!dd) break;
    if (inner_text(*dt) == label) return opt_text(*dd);
  }
  return std::nullopt;
}

RawVendorRow seller_info(std::string_view doc, bool& ok) {
  RawVendorRow v;
  ok = false;
  auto info = element(doc, "<div class=\"seller-info\"");
  if (!info) return v;
  auto a = html::first_anchor(*info, "/vendor/");
  if (!a) return v;
  auto vid = html::path_int(a->href, "/vendor/");
  if (!vid) return v;
  v.vid = *vid;
  v.username = a->text;
  if (auto r = html::between(*info, "<span class=\"rank\">", "</span>")) v.rank = opt_text(*r);
  if (auto s = html::between(*info, "<span class=\"sales\">", "</span>")) v.sales = parse_int(inner_text(*s));
  if (auto ap = html::between(*info, "<span class=\"approval\">", "</span>")) v.approval_rating = percent_to_fraction(inner_text(*ap));
  ok = !v.username.empty();
  return v;
}

void extract_listing(std::string_view doc, PageClass cls, RawMarketBatch& batch) {
  auto lid = data_int(doc, "<div class=\"listing\"", "data-lid");
  bool vendor_ok = false;
  RawVendorRow vendor = seller_info(doc, vendor_ok);
  if (!lid || !vendor_ok) {
    batch.diagnostics.push_back("listing page without listing id or seller");
    return;
  }
  RawListingRow l;
  l.lid = *lid;
  l.vid = vendor.vid;
  l.vendor_username = vendor.username;
  if (auto h1 = html::between(doc, "<h1 class=\"listing-title\">", "</h1>")) l.title = inner_text(*h1);
  if (auto p = element(doc, "<div class=\"price\"")) l.price = parse_price(inner_text(*p));
  auto chain = breadcrumb_chain(doc);
  if (!chain.empty()) l.cid = chain.back().cid;
  if (auto dl = element(doc, "<dl class=\"details\"")) {
    l.product_class = dl_value(*dl, "Class");
    l.ships_from = dl_value(*dl, "Ships From");
    if (cls == PageClass::MarketListingGeneric) l.ships_to = dl_value(*dl, "Ships To");
    if (auto avail = dl_value(*dl, "Availability")) l.listing_available = *avail != "Unavailable";
  }
  switch (cls) {
    case PageClass::MarketListingGeneric:
      l.description = opt_markup(doc, "<div class=\"product-description\"");
      break;
    case PageClass::MarketListingReturnPolicy:
      l.return_policy = opt_markup(doc, "<div class=\"return-policy\"");
      break;
    case PageClass::MarketListingFeedback:
      if (auto table = element(doc, "<table class=\"table feedback\"")) {
        for (auto tr : html::find_all(*table, "<tr")) {
          std::string_view row = html::element_inner(*table, tr);
          auto user = html::between(row, "<td class=\"fb-user\">", "</td>");
          auto date = html::between(row, "<td class=\"fb-date\">", "</td>");
          if (!user || !date) continue;
          RawFeedbackRow f;
          f.lid = *lid;
          f.username = inner_text(*user);
          f.date_label = inner_text(*date);
          if (auto m = html::between(row, "<td class=\"fb-message\">", "</td>")) f.message = opt_text(*m);
          batch.feedback_rows.push_back(std::move(f));
        }
      }
      break;
    default: break;
  }
  if (l.title.empty()) {
    batch.diagnostics.push_back(fmt::format("listing {} has no title", l.lid));
    return;
  }
  batch.listing_rows.push_back(std::move(l));
  batch.vendor_rows.push_back(std::move(vendor));
}

// Rows of "listing-row" blocks shared by store and category pages.
void listing_rows(std::string_view doc, std::optional<std::int64_t> vid, std::optional<std::string> vendor_name,
                  std::optional<std::int64_t> cid, RawMarketBatch& batch) {
  for (auto at : html::find_all(doc, "<div class=\"listing-row\"")) {
    auto lid_attr = html::attribute(doc, at, "data-lid");
    std::optional<std::int64_t> lid = lid_attr ? parse_int(*lid_attr) : std::nullopt;
    std::string_view row = html::element_inner(doc, at);
    auto title = html::first_anchor(row, "/listing/");
    if (!lid || !title) continue;
    RawListingRow l;
    l.lid = *lid;
    l.title = title->text;
    l.vid = vid.value_or(0);
    l.vendor_username = vendor_name;
    if (auto v = html::first_anchor(row, "/vendor/")) {
      l.vid = html::path_int(v->href, "/vendor/").value_or(l.vid);
      l.vendor_username = v->text;
    }
    l.cid = cid;
    if (auto c = html::first_anchor(row, "/category/")) l.cid = html::path_int(c->href, "/category/");
    if (auto p = html::between(row, "<span class=\"price\">", "</span>")) l.price = parse_price(inner_text(*p));
    if (auto k = html::between(row, "<span class=\"class\">", "</span>")) l.product_class = opt_text(*k);
    if (l.vid <= 0 || l.title.empty()) continue;
    if (l.vendor_username) {
      RawVendorRow v;
      v.vid = l.vid;
      v.username = *l.vendor_username;
      batch.vendor_rows.push_back(std::move(v));
    }
    batch.listing_rows.push_back(std::move(l));
  }
}

void extract_store(std::string_view doc, RawMarketBatch& batch) {
  auto vid = data_int(doc, "<div class=\"store\"", "data-vid");
  if (!vid) {
    batch.diagnostics.push_back("store page without vendor id");
    return;
  }
  std::optional<std::string> name;
  if (auto h = html::between(doc, "<h1 class=\"store-name\">", "</h1>")) name = opt_text(*h);
  listing_rows(doc, vid, name, std::nullopt, batch);
}

void extract_category(std::string_view doc, RawMarketBatch& batch) {
  auto cid = data_int(doc, "<div class=\"category\"", "data-cid");
  auto chain = breadcrumb_chain(doc);
  if (!cid || chain.empty() || chain.back().cid != *cid) {
    batch.diagnostics.push_back("category page without a breadcrumb ending at its own category");
    return;
  }
  for (auto& c : chain) batch.category_rows.push_back(c);
  if (auto subs = element(doc, "<ul class=\"subcategories\"")) {
    for (const auto& a : html::anchors(*subs, "/category/")) {
      auto sub = html::path_int(a.href, "/category/");
      if (!sub) continue;
      batch.category_rows.push_back({*sub, a.text, *cid});
    }
  }
  listing_rows(doc, std::nullopt, std::nullopt, cid, batch);
}

void extract_vendor(std::string_view doc, PageClass cls, RawMarketBatch& batch) {
  auto vid = data_int(doc, "<div class=\"vendor-profile\"", "data-vid");
  std::optional<std::string> name;
  if (auto h = html::between(doc, "<h1 class=\"vendor-name\">", "</h1>")) name = opt_text(*h);
  if (!vid || !name) {
    batch.diagnostics.push_back("vendor page without vendor id or name");
    return;
  }
  RawVendorRow v;
  v.vid = *vid;
  v.username = *name;
  if (contains(doc, "This vendor has been disabled.")) {
    v.disabled = true;
    batch.vendor_rows.push_back(std::move(v));
    return;
  }
  v.disabled = false;
  auto profile = element(doc, "<div class=\"vendor-profile\"").value_or(doc);
  if (auto r = html::between(profile, "<span class=\"rank\">", "</span>")) v.rank = opt_text(*r);
  if (auto s = html::between(profile, "<span class=\"sales\">", "</span>")) v.sales = parse_int(inner_text(*s));
  if (auto fs = element(profile, "<div class=\"feedback-summary\"")) {
    auto count = [&](std::string_view cls_name) -> std::optional<std::int64_t> {
      auto t = html::between(*fs, fmt::format("<span class=\"{}\">", cls_name), "</span>");
      return t ? parse_int(inner_text(*t)) : std::nullopt;
    };
    v.positive_feedback = count("positive");
    v.neutral_feedback = count("neutral");
    v.negative_feedback = count("negative");
  }
  switch (cls) {
    case PageClass::VendorProfileLegacySales: v.legacy_sales = opt_markup(profile, "<div class=\"legacy-sales\""); break;
    case PageClass::VendorProfilePgp: v.pgp_key = opt_markup(profile, "<pre class=\"pgp-key\""); break;
    case PageClass::VendorProfileReturnPolicy: v.return_policy = opt_markup(profile, "<div class=\"return-policy\""); break;
    default: break;  // generic and feedback formats: feedback here is not used
  }
  batch.vendor_rows.push_back(std::move(v));
}

}  // namespace

std::optional<std::string> percent_to_fraction(std::string_view text) {
  text = trim(text);
  if (!text.ends_with('%')) return std::nullopt;
  text.remove_suffix(1);
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (frac.size() > 2) return std::nullopt;
  auto w = parse_int(whole);
  std::int64_t f = 0;
  if (!frac.empty()) {
    auto fv = parse_int(frac);
    if (!fv) return std::nullopt;
    f = *fv * (frac.size() == 1 ? 10 : 1);
  }
  if (!w || *w < 0 || *w > 100 || whole.find(',') != std::string_view::npos) return std::nullopt;
  const std::int64_t basis = *w * 100 + f;  // hundredths of a percent
  if (basis > 10000) return std::nullopt;
  return fmt::format("{}.{:04d}", basis / 10000, basis % 10000);
}

std::optional<std::string> parse_price(std::string_view text) {
  text = trim(text);
  if (text.starts_with("BTC")) text = trim(text.substr(3));
  if (text.empty()) return std::nullopt;
  bool dot = false;
  for (char c : text) {
    if (c == '.' && !dot) {
      dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
  }
  if (text.front() == '.' || text.back() == '.') return std::nullopt;
  return std::string(text);
}

RawMarketBatch extract_market_file(const ClassifiedFile& file, std::string_view contents) {
  RawMarketBatch batch;
  batch.source = file;
  if (file.quirk != Quirk::None || !is_market_class(file.page_class)) {
    batch.diagnostics.push_back("file is quirked or not a market page; nothing extracted");
    return batch;
  }
  switch (file.page_class) {
    case PageClass::MarketListingGeneric:
    case PageClass::MarketListingFeedback:
    case PageClass::MarketListingReturnPolicy: extract_listing(contents, file.page_class, batch); break;
    case PageClass::MarketStore: extract_store(contents, batch); break;
    case PageClass::MarketCategory: extract_category(contents, batch); break;
    default: extract_vendor(contents, file.page_class, batch); break;
  }
  return batch;
}

}  // namespace dnm
