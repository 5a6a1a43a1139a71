#pragma once

// Landmark scanning over scraped HTML. Nothing here builds a DOM: callers
// locate fixed markers (ids, class names, link patterns) and cut the text
// between them, which keeps extraction working on truncated or unbalanced
// markup.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dnm::html {

inline constexpr std::size_t npos = std::string_view::npos;

/// Text between `open` and the next `close` after it, searching from `from`.
/// On success `from` is advanced past `close`.
std::optional<std::string_view> between(std::string_view doc, std::string_view open,
                                        std::string_view close, std::size_t& from);
std::optional<std::string_view> between(std::string_view doc, std::string_view open,
                                        std::string_view close);

/// Inner HTML of the element whose start tag begins at `tag_start` (the '<').
/// Nested elements of the same name are balanced; an unterminated element
/// yields everything up to the end of `doc`.
std::string_view element_inner(std::string_view doc, std::size_t tag_start);

/// Like element_inner but also returns the offset just past the end tag.
std::string_view element_inner(std::string_view doc, std::size_t tag_start, std::size_t& end);

/// Start offsets of every occurrence of `marker` at or after `from`.
std::vector<std::size_t> find_all(std::string_view doc, std::string_view marker, std::size_t from = 0);

/// Value of attribute `name` inside the start tag beginning at `tag_start`.
std::optional<std::string_view> attribute(std::string_view doc, std::size_t tag_start,
                                          std::string_view name);

/// Integer query parameter from a link such as "viewtopic.php?id=5&amp;p=2".
std::optional<std::int64_t> query_int(std::string_view href, std::string_view key);

/// Trailing integer of a path-style link such as "/vendor/77".
std::optional<std::int64_t> path_int(std::string_view href, std::string_view prefix);

/// Every href attribute value inside `fragment`, in order.
std::vector<std::string_view> hrefs(std::string_view fragment);

/// Text of the first anchor whose href starts with `href_prefix`, with its href.
struct Anchor {
  std::string_view href;
  std::string text;
};
std::optional<Anchor> first_anchor(std::string_view fragment, std::string_view href_prefix);
std::vector<Anchor> anchors(std::string_view fragment, std::string_view href_prefix);

}  // namespace dnm::html
