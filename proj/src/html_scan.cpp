#include "dnmetl/html_scan.hpp"

#include "dnmetl/text.hpp"

namespace dnm::html {

namespace {

bool name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
}

std::string_view tag_name(std::string_view doc, std::size_t tag_start) {
  std::size_t b = tag_start + 1;
  std::size_t e = b;
  while (e < doc.size() && name_char(doc[e])) ++e;
  return doc.substr(b, e - b);
}

}  // namespace

std::optional<std::string_view> between(std::string_view doc, std::string_view open,
                                        std::string_view close, std::size_t& from) {
  auto b = doc.find(open, from);
  if (b == npos) return std::nullopt;
  b += open.size();
  auto e = doc.find(close, b);
  if (e == npos) return std::nullopt;
  from = e + close.size();
  return doc.substr(b, e - b);
}

std::optional<std::string_view> between(std::string_view doc, std::string_view open,
                                        std::string_view close) {
  std::size_t from = 0;
  return between(doc, open, close, from);
}

std::string_view element_inner(std::string_view doc, std::size_t tag_start, std::size_t& end) {
  const std::string_view name = tag_name(doc, tag_start);
  auto gt = doc.find('>', tag_start);
  if (name.empty() || gt == npos) {
    end = doc.size();
    return {};
  }
  const std::size_t body = gt + 1;
  const std::string open = "<" + std::string(name);
  const std::string close = "</" + std::string(name);
  int depth = 1;
  std::size_t pos = body;
  while (pos < doc.size()) {
    auto o = doc.find(open, pos);
    auto c = doc.find(close, pos);
    if (c == npos) break;
    if (o != npos && o < c) {
      std::size_t after = o + open.size();
      if (after < doc.size() && !name_char(doc[after])) ++depth;
      pos = after;
      continue;
    }
    if (--depth == 0) {
      auto cgt = doc.find('>', c);
      end = cgt == npos ? doc.size() : cgt + 1;
      return doc.substr(body, c - body);
    }
    pos = c + close.size();
  }
  end = doc.size();
  return doc.substr(body);
}

std::string_view element_inner(std::string_view doc, std::size_t tag_start) {
  std::size_t end = 0;
  return element_inner(doc, tag_start, end);
}

std::vector<std::size_t> find_all(std::string_view doc, std::string_view marker, std::size_t from) {
  std::vector<std::size_t> out;
  for (auto p = doc.find(marker, from); p != npos; p = doc.find(marker, p + marker.size()))
    out.push_back(p);
  return out;
}

std::optional<std::string_view> attribute(std::string_view doc, std::size_t tag_start,
                                          std::string_view name) {
  auto gt = doc.find('>', tag_start);
  if (gt == npos) gt = doc.size();
  std::string_view tag = doc.substr(tag_start, gt - tag_start);
  std::size_t pos = 0;
  while ((pos = tag.find(name, pos)) != npos) {
    bool boundary = pos > 0 && (tag[pos - 1] == ' ' || tag[pos - 1] == '\t' || tag[pos - 1] == '\n');
    std::size_t eq = pos + name.size();
    if (boundary && eq < tag.size() && tag[eq] == '=') {
      std::size_t v = eq + 1;
      if (v < tag.size() && (tag[v] == '"' || tag[v] == '\'')) {
        char q = tag[v];
        auto close = tag.find(q, v + 1);
        if (close == npos) return tag.substr(v + 1);
        return tag.substr(v + 1, close - v - 1);
      }
      std::size_t e = v;
      while (e < tag.size() && tag[e] != ' ' && tag[e] != '>') ++e;
      return tag.substr(v, e - v);
    }
    pos += name.size();
  }
  return std::nullopt;
}

std::optional<std::int64_t> query_int(std::string_view href, std::string_view key) {
  auto q = href.find('?');
  if (q == npos) return std::nullopt;
  std::string_view rest = href.substr(q + 1);
  for (;;) {
    auto amp = rest.find('&');
    std::string_view part = rest.substr(0, amp);
    if (part.starts_with("amp;")) part.remove_prefix(4);
    auto eq = part.find('=');
    if (eq != npos && part.substr(0, eq) == key) {
      std::string_view value = part.substr(eq + 1);
      auto hash = value.find('#');
      if (hash != npos) value = value.substr(0, hash);
      return parse_int(value);
    }
    if (amp == npos) return std::nullopt;
    rest = rest.substr(amp + 1);
  }
}

std::optional<std::int64_t> path_int(std::string_view href, std::string_view prefix) {
  auto p = href.find(prefix);
  if (p == npos) return std::nullopt;
  std::string_view rest = href.substr(p + prefix.size());
  std::size_t e = 0;
  while (e < rest.size() && rest[e] >= '0' && rest[e] <= '9') ++e;
  return parse_int(rest.substr(0, e));
}

std::vector<std::string_view> hrefs(std::string_view fragment) {
  std::vector<std::string_view> out;
  for (auto p : find_all(fragment, "<a ")) {
    if (auto h = attribute(fragment, p, "href")) out.push_back(*h);
  }
  return out;
}

std::vector<Anchor> anchors(std::string_view fragment, std::string_view href_prefix) {
  std::vector<Anchor> out;
  for (auto p : find_all(fragment, "<a ")) {
    auto h = attribute(fragment, p, "href");
    if (!h || !h->starts_with(href_prefix)) continue;
    out.push_back({*h, inner_text(element_inner(fragment, p))});
  }
  return out;
}

std::optional<Anchor> first_anchor(std::string_view fragment, std::string_view href_prefix) {
  for (auto p : find_all(fragment, "<a ")) {
    auto h = attribute(fragment, p, "href");
    if (!h || !h->starts_with(href_prefix)) continue;
    return Anchor{*h, inner_text(element_inner(fragment, p))};
  }
  return std::nullopt;
}

}  // namespace dnm::html
