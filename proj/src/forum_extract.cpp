#include "dnmetl/forum_extract.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "dnmetl/html_scan.hpp"
#include "dnmetl/text.hpp"

namespace dnm {

namespace {

struct Pagination {
  std::int64_t current = 1;
  std::int64_t total = 1;
  bool found = false;
};

Pagination parse_pagination(std::string_view doc) {
  Pagination p;
  auto at = doc.find("<p class=\"pagelink");
  if (at == html::npos) return p;
  std::string_view inner = html::element_inner(doc, at);
  p.found = true;
  std::int64_t max_seen = 1;
  for (auto pos : html::find_all(inner, "<strong")) {
    if (auto v = parse_int(inner_text(html::element_inner(inner, pos)))) {
      p.current = *v;
      max_seen = std::max(max_seen, *v);
    }
  }
  for (auto pos : html::find_all(inner, "<a ")) {
    if (auto v = parse_int(inner_text(html::element_inner(inner, pos)))) max_seen = std::max(max_seen, *v);
  }
  p.total = max_seen;
  return p;
}

// Basename query parameter, e.g. "p" of "viewtopic.php?id=5&p=2".
std::optional<std::int64_t> name_param(std::string_view path, std::string_view key) {
  auto slash = path.rfind('/');
  std::string_view name = slash == std::string_view::npos ? path : path.substr(slash + 1);
  auto dot = name.rfind('.');
  if (dot != std::string_view::npos && dot + 1 < name.size() &&
      std::all_of(name.begin() + static_cast<std::ptrdiff_t>(dot) + 1, name.end(),
                  [](char c) { return c >= '0' && c <= '9'; }) &&
      name.substr(0, dot).find('?') != std::string_view::npos) {
    name = name.substr(0, dot);
  }
  return html::query_int(name, key);
}

std::optional<std::string> opt_text(std::string_view fragment) {
  std::string t = inner_text(fragment);
  if (t.empty()) return std::nullopt;
  return t;
}

// Text of <span class="byuser">by NAME</span>.
std::optional<std::string> byuser(std::string_view fragment) {
  auto span = html::between(fragment, "<span class=\"byuser\">", "</span>");
  if (!span) return std::nullopt;
  std::string t = inner_text(*span);
  if (t.starts_with("by ")) t.erase(0, 3);
  if (t.empty()) return std::nullopt;
  return t;
}

// Contents of the first <td class="NAME"> cell.
std::optional<std::string_view> cell(std::string_view row, std::string_view cls) {
  auto at = row.find(fmt::format("<td class=\"{}\"", cls));
  if (at == html::npos) return std::nullopt;
  return html::element_inner(row, at);
}

struct Crumbs {
  std::optional<std::int64_t> fid;
  std::optional<std::string> forum_title;
  std::optional<std::int64_t> tid;
  std::optional<std::string> topic_title;
};

Crumbs parse_crumbs(std::string_view doc) {
  Crumbs c;
  auto at = doc.find("<ul class=\"crumbs\">");
  if (at == html::npos) return c;
  std::string_view inner = html::element_inner(doc, at);
  for (const auto& a : html::anchors(inner, "viewforum.php?")) {
    c.fid = html::query_int(a.href, "id");
    c.forum_title = a.text;
  }
  for (const auto& a : html::anchors(inner, "viewtopic.php?")) {
    c.tid = html::query_int(a.href, "id");
    c.topic_title = a.text;
  }
  return c;
}

void extract_index(std::string_view doc, RawForumBatch& batch) {
  std::int64_t fora = 0;
  for (auto block_at : html::find_all(doc, "<div id=\"idx")) {
    std::string_view block = html::element_inner(doc, block_at);
    std::optional<std::string> category;
    if (auto h2 = html::between(block, "<h2>", "</h2>")) category = opt_text(*h2);
    for (auto tr_at : html::find_all(block, "<tr")) {
      std::string_view row = html::element_inner(block, tr_at);
      auto link = html::first_anchor(row, "viewforum.php?");
      if (!link) continue;
      auto fid = html::query_int(link->href, "id");
      if (!fid) continue;
      RawForumRow f;
      f.source = ForumSource::Index;
      f.fid = *fid;
      f.category = category;
      if (!link->text.empty()) f.title = link->text;
      if (auto d = html::between(row, "<div class=\"forumdesc\">", "</div>")) f.description = opt_text(*d);
      if (auto t = cell(row, "tc2")) f.topics_expected = parse_int(inner_text(*t));
      if (auto p = cell(row, "tc3")) f.posts_expected = parse_int(inner_text(*p));
      batch.forum_rows.push_back(std::move(f));
      ++fora;
    }
  }
  auto stats_at = doc.find("<div id=\"brdstats\"");
  if (stats_at != html::npos || fora > 0) {
    IndexStats s;
    if (fora > 0) s.fora = fora;
    if (stats_at != html::npos) {
      std::string_view stats = html::element_inner(doc, stats_at);
      auto grab = [&](std::string_view label) -> std::optional<std::int64_t> {
        auto v = html::between(stats, label, "</strong>");
        if (!v) return std::nullopt;
        return parse_int(inner_text(*v));
      };
      s.users = grab("Total number of registered users: <strong>");
      s.topics = grab("Total number of topics: <strong>");
      s.posts = grab("Total number of posts: <strong>");
    }
    batch.index_stats = s;
  }
  if (!batch.index_stats && batch.forum_rows.empty()) batch.diagnostics.push_back("index page without forum list or board statistics");
}

void extract_viewforum(std::string_view doc, RawForumBatch& batch) {
  const Crumbs crumbs = parse_crumbs(doc);
  std::optional<std::int64_t> fid = crumbs.fid;
  if (!fid) fid = name_param(batch.source.path, "id");
  auto table_at = doc.find("<div id=\"vf\"");
  if (!fid || table_at == html::npos) {
    batch.diagnostics.push_back("viewforum page without forum id or topic table");
    return;
  }
  std::string_view table = html::element_inner(doc, table_at);
  RawForumRow f;
  f.source = ForumSource::ViewForum;
  f.fid = *fid;
  if (auto h2 = html::between(table, "<h2>", "</h2>")) f.title = opt_text(*h2);
  if (!f.title) f.title = crumbs.forum_title;
  const Pagination pg = parse_pagination(doc);
  f.pages = pg.total;
  batch.forum_rows.push_back(std::move(f));

  auto body_at = table.find("<tbody");
  if (body_at == html::npos) return;
  std::string_view body = html::element_inner(table, body_at);
  for (auto tr_at : html::find_all(body, "<tr")) {
    std::string_view row = html::element_inner(body, tr_at);
    auto cls = html::attribute(body, tr_at, "class").value_or("");
    auto tcl = cell(row, "tcl");
    if (!tcl) continue;
    auto link = html::first_anchor(*tcl, "viewtopic.php?");
    if (!link) continue;
    auto tid = html::query_int(link->href, "id");
    if (!tid) continue;
    RawTopicRow t;
    t.source = ForumSource::ViewForum;
    t.tid = *tid;
    t.fid = *fid;
    if (!link->text.empty()) t.title = link->text;
    t.moved = contains(cls, "imoved") || contains(*tcl, "class=\"movedtext\"");
    t.first_post_user = byuser(*tcl);
    if (!t.moved) {
      t.closed = contains(cls, "iclosed");
      if (auto replies = cell(row, "tc2")) {
        if (auto r = parse_int(inner_text(*replies))) t.posts_expected = *r + 1;
      }
      if (auto views = cell(row, "tc3")) t.views = parse_int(inner_text(*views));
      if (auto tcr = cell(row, "tcr")) {
        auto lp = html::first_anchor(*tcr, "viewtopic.php?");
        auto who = byuser(*tcr);
        if (lp && who) t.last_post = LastPostRef{*who, split_date_label(lp->text)};
      }
    }
    batch.topic_rows.push_back(std::move(t));
  }
}

void extract_viewtopic(std::string_view doc, RawForumBatch& batch) {
  const Crumbs crumbs = parse_crumbs(doc);
  std::optional<std::int64_t> tid = crumbs.tid;
  if (!tid) tid = name_param(batch.source.path, "id");
  if (!tid || !crumbs.fid) {
    batch.diagnostics.push_back("viewtopic page without topic or forum breadcrumbs");
    return;
  }
  const Pagination pg = parse_pagination(doc);
  std::int64_t page = pg.found ? pg.current : name_param(batch.source.path, "p").value_or(1);

  RawTopicRow topic;
  topic.source = ForumSource::ViewTopic;
  topic.tid = *tid;
  topic.fid = *crumbs.fid;
  topic.title = crumbs.topic_title;
  if (topic.title && topic.title->empty()) topic.title.reset();

  RawForumRow forum;
  forum.source = ForumSource::ViewTopic;
  forum.fid = *crumbs.fid;
  forum.title = crumbs.forum_title;

  std::int64_t on_page = 0;
  std::int64_t max_position = 0;
  for (auto at : html::find_all(doc, "<div id=\"p")) {
    auto id_attr = html::attribute(doc, at, "id");
    auto cls = html::attribute(doc, at, "class");
    if (!id_attr || !cls || !contains(*cls, "blockpost")) continue;
    auto pid = parse_int(id_attr->substr(1));
    if (!pid) continue;
    std::string_view block = html::element_inner(doc, at);
    ++on_page;

    RawPostRow p;
    p.pid = *pid;
    p.tid = *tid;
    p.page_number = page;
    p.position_on_page = on_page;
    if (auto conr = html::between(block, "<span class=\"conr\">", "</span>")) {
      std::string t = inner_text(*conr);
      if (t.starts_with("#")) p.position = parse_int(std::string_view(t).substr(1)).value_or(0);
    }
    if (auto h2 = html::between(block, "<h2>", "</h2>")) {
      if (auto a = html::first_anchor(*h2, "viewtopic.php?")) p.posted = split_date_label(a->text);
    }
    if (auto dt = html::between(block, "<dt>", "</dt>")) {
      if (auto who = html::first_anchor(*dt, "profile.php?")) {
        p.uid = html::query_int(who->href, "id").value_or(0);
        p.username = who->text;
      } else {
        p.username = inner_text(*dt);
      }
    }
    if (auto title = html::between(block, "<dd class=\"usertitle\">", "</dd>")) p.poster_title = opt_text(*title);
    if (auto reg = html::between(block, "<span>Registered: ", "</span>")) p.poster_registered = opt_text(*reg);
    if (auto posts = html::between(block, "<span>Posts: ", "</span>")) p.poster_post_count = parse_int(inner_text(*posts));

    auto msg_at = block.find("<div class=\"postmsg\">");
    if (msg_at != html::npos) {
      std::string_view msg = html::element_inner(block, msg_at);
      auto edit_at = msg.find("<p class=\"postedit\">");
      if (edit_at != html::npos) {
        std::string edit = inner_text(html::element_inner(msg, edit_at));
        // "Last edited by NAME (DATE TIME)"
        constexpr std::string_view kLead = "Last edited by ";
        auto open = edit.rfind(" (");
        if (edit.starts_with(kLead) && open != std::string::npos && edit.ends_with(")")) {
          EditInfo e;
          e.username = edit.substr(kLead.size(), open - kLead.size());
          e.when = split_date_label(std::string_view(edit).substr(open + 2, edit.size() - open - 3));
          p.edit = std::move(e);
        }
        msg = msg.substr(0, edit_at);
      }
      p.text = std::string(trim(msg));
    }
    auto sig_at = block.find("<div class=\"postsignature");
    if (sig_at != html::npos) {
      std::string_view sig = html::element_inner(block, sig_at);
      auto hr = sig.find("<hr />");
      if (hr != html::npos) sig = sig.substr(hr + 6);
      sig = trim(sig);
      if (!sig.empty()) p.signature = std::string(sig);
    }
    if (p.uid <= 0) {
      batch.diagnostics.push_back(fmt::format("post {} has no poster uid; skipped", p.pid));
      continue;
    }
    max_position = std::max(max_position, p.position);
    batch.post_rows.push_back(std::move(p));
  }
  // Fallback when post numbers are not rendered: derive from page geometry.
  if (!batch.post_rows.empty() && batch.post_rows.front().position == 0) {
    const std::int64_t page_size = static_cast<std::int64_t>(batch.post_rows.size());
    for (auto& p : batch.post_rows) p.position = (p.page_number - 1) * page_size + p.position_on_page;
  }
  batch.topic_rows.push_back(std::move(topic));
  batch.forum_rows.push_back(std::move(forum));
}

void extract_profile(std::string_view doc, RawForumBatch& batch) {
  auto at = doc.find("<div id=\"viewprofile\"");
  if (at == html::npos) {
    batch.diagnostics.push_back("profile page without profile block");
    return;
  }
  std::string_view block = html::element_inner(doc, at);
  RawProfileRow p;
  std::optional<std::int64_t> uid;
  for (const auto& a : html::anchors(block, "search.php?")) {
    if (auto u = html::query_int(a.href, "user_id")) uid = u;
  }
  if (!uid) uid = name_param(batch.source.path, "id");
  std::size_t pos = 0;
  while (auto dt = html::between(block, "<dt>", "</dt>", pos)) {
    std::string label = inner_text(*dt);
    auto dd = html::between(block, "<dd>", "</dd>", pos);
    if (!dd) break;
    std::string value = inner_text(*dd);
    if (label == "Username:") {
      p.username = value;
    } else if (label == "Title:") {
      if (!value.empty()) p.title = value;
    } else if (label == "Location:") {
      if (!value.empty()) p.location = value;
    } else if (label == "Posts:") {
      auto dash = value.find(" - ");
      p.num_posts = parse_int(std::string_view(value).substr(0, dash));
    } else if (label == "Last post:") {
      if (!value.empty() && value != "Never") p.last_post = split_date_label(value);
    } else if (label == "Registered:") {
      if (!value.empty()) p.registered = value;
    }
  }
  if (!uid || p.username.empty()) {
    batch.diagnostics.push_back("profile page without uid or username");
    return;
  }
  p.uid = *uid;
  batch.profile_rows.push_back(std::move(p));
}

}  // namespace

DateLabel split_date_label(std::string_view text) {
  text = trim(text);
  auto sp = text.rfind(' ');
  if (sp != std::string_view::npos) {
    std::string_view t = text.substr(sp + 1);
    if (t.size() == 8 && t[2] == ':' && t[5] == ':') return {std::string(trim(text.substr(0, sp))), std::string(t)};
  }
  return {std::string(text), {}};
}

std::string_view to_string(ForumSource s) {
  switch (s) {
    case ForumSource::Index: return "index";
    case ForumSource::ViewForum: return "viewforum";
    case ForumSource::ViewTopic: return "viewtopic";
  }
  return "index";
}

std::optional<ForumSource> forum_source_from_string(std::string_view s) {
  if (s == "index") return ForumSource::Index;
  if (s == "viewforum") return ForumSource::ViewForum;
  if (s == "viewtopic") return ForumSource::ViewTopic;
  return std::nullopt;
}

RawForumBatch extract_forum_file(const ClassifiedFile& file, std::string_view contents) {
  RawForumBatch batch;
  batch.source = file;
  if (file.quirk != Quirk::None || !is_forum_class(file.page_class)) {
    batch.diagnostics.push_back("file is quirked or not a forum page; nothing extracted");
    return batch;
  }
  switch (file.page_class) {
    case PageClass::ForumIndex: extract_index(contents, batch); break;
    case PageClass::ViewForum: extract_viewforum(contents, batch); break;
    case PageClass::ViewTopic: extract_viewtopic(contents, batch); break;
    case PageClass::Profile: extract_profile(contents, batch); break;
    default: break;
  }
  return batch;
}

}  // namespace dnm
