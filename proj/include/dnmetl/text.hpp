#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dnm {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Integer with optional thousands separators ("50,271") and surrounding
/// whitespace. Returns nullopt for anything else.
std::optional<std::int64_t> parse_int(std::string_view s);

/// Decodes named (&amp; &lt; &gt; &quot; &apos; &nbsp; &raquo; ...) and numeric
/// (&#160; &#xA0;) character references into UTF-8. Unknown references are
/// kept verbatim.
std::string decode_entities(std::string_view s);

/// Minimal escaping for text we render into HTML.
std::string encode_entities(std::string_view s);

/// Text content of an HTML fragment: tags removed, entities decoded,
/// whitespace runs collapsed to a single space and trimmed.
std::string inner_text(std::string_view html);

bool contains(std::string_view hay, std::string_view needle);

}  // namespace dnm
