#include "dnmetl/raw_io.hpp"

#include <fmt/format.h>

#include "dnmetl/error.hpp"

namespace dnm {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kSourceCols{"scrape_id", "path", "retrieval_time"};

std::vector<std::string> with_source(std::initializer_list<const char*> cols) {
  std::vector<std::string> h = kSourceCols;
  for (const char* c : cols) h.emplace_back(c);
  return h;
}

const std::vector<std::string> kIndexStatsHeader = with_source({"fora", "topics", "posts", "users"});
const std::vector<std::string> kForumHeader =
    with_source({"source", "fid", "category", "title", "description", "pages", "topics", "posts"});
const std::vector<std::string> kTopicHeader =
    with_source({"source", "tid", "fid", "title", "posts", "views", "lp_user", "lp_date", "lp_time", "closed",
                 "moved", "first_post_user"});
const std::vector<std::string> kPostHeader =
    with_source({"pid", "tid", "position", "position_on_page", "page_number", "date_label", "time", "uid",
                 "username", "text", "signature", "edit_user", "edit_date_label", "edit_time",
                 "poster_post_count", "poster_title", "poster_registered"});
const std::vector<std::string> kProfileHeader =
    with_source({"uid", "username", "title", "registered", "lp_date", "lp_time", "num_posts", "location"});
const std::vector<std::string> kListingHeader =
    with_source({"lid", "vid", "vendor_username", "title", "price", "cid", "description", "ships_from", "ships_to",
                 "product_class", "listing_available", "return_policy"});
const std::vector<std::string> kVendorHeader =
    with_source({"vid", "username", "rank", "sales", "approval_rating", "positive_feedback", "neutral_feedback",
                 "negative_feedback", "legacy_sales", "pgp_key", "return_policy", "disabled"});
const std::vector<std::string> kCategoryHeader = with_source({"cid", "name", "parent_cid"});
const std::vector<std::string> kFeedbackHeader = with_source({"lid", "username", "date_label", "message"});
const std::vector<std::string> kDiagHeader = {"scrape_id", "path", "message"};

std::vector<std::string> source_fields(const ClassifiedFile& f) {
  return {std::to_string(f.scrape_id), f.path, format_datetime(f.retrieval_time)};
}

SourceTag parse_source(std::vector<std::string>& r, const fs::path& file) {
  SourceTag t;
  t.scrape_id = static_cast<int>(field::req_int(r[0], "scrape_id"));
  t.path = std::move(r[1]);
  auto when = parse_datetime(r[2]);
  if (!when) throw InputError(fmt::format("{}: bad retrieval_time '{}'", file.string(), r[2]));
  t.retrieval_time = *when;
  return t;
}

template <typename Fn>
void read_rows_file(const fs::path& file, const std::vector<std::string>& header, Fn&& fn) {
  if (!fs::exists(file)) throw InputError(fmt::format("missing raw table {}", file.string()));
  bool checked = false;
  for_each_row(file, [&](const std::vector<std::string>& h, std::vector<std::string>& r) {
    if (!checked) {
      if (h != header) throw InputError(fmt::format("{}: unexpected header", file.string()));
      checked = true;
    }
    SourceTag src = parse_source(r, file);
    fn(std::move(src), r);
  });
}

template <typename Fn>
void read_rows(const fs::path& dir, const char* name, const std::vector<std::string>& header, Fn&& fn) {
  read_rows_file(dir / name, header, std::forward<Fn>(fn));
}

std::string opt_label(const std::optional<DateLabel>& d, bool time) {
  if (!d) return {};
  return time ? d->time : d->date;
}

}  // namespace

std::vector<std::string> raw::all_files() {
  return {kIndexStats,  kForumRows,    kTopicRows,    kPostRows,     kProfileRows, kListingRows,
          kVendorRows, kCategoryRows, kFeedbackRows, kDiagnostics};
}

struct RawWriter::Impl {
  TsvWriter index_stats, forum, topic, post, profile, listing, vendor, category, feedback, diag;
  explicit Impl(const fs::path& d)
      : index_stats(d / raw::kIndexStats, kIndexStatsHeader),
        forum(d / raw::kForumRows, kForumHeader),
        topic(d / raw::kTopicRows, kTopicHeader),
        post(d / raw::kPostRows, kPostHeader),
        profile(d / raw::kProfileRows, kProfileHeader),
        listing(d / raw::kListingRows, kListingHeader),
        vendor(d / raw::kVendorRows, kVendorHeader),
        category(d / raw::kCategoryRows, kCategoryHeader),
        feedback(d / raw::kFeedbackRows, kFeedbackHeader),
        diag(d / raw::kDiagnostics, kDiagHeader) {}
};

RawWriter::RawWriter(const fs::path& dir) : impl_(std::make_unique<Impl>(dir)) {}
RawWriter::~RawWriter() = default;

void RawWriter::add(const RawForumBatch& b) {
  auto row = [&](std::initializer_list<std::string> rest) {
    std::vector<std::string> r = source_fields(b.source);
    r.insert(r.end(), rest);
    return r;
  };
  if (b.index_stats) {
    const auto& s = *b.index_stats;
    impl_->index_stats.write_row(row({field::of(s.fora), field::of(s.topics), field::of(s.posts), field::of(s.users)}));
  }
  for (const auto& f : b.forum_rows)
    impl_->forum.write_row(row({std::string(to_string(f.source)), field::of(f.fid), field::of(f.category),
                                field::of(f.title), field::of(f.description), field::of(f.pages),
                                field::of(f.topics_expected), field::of(f.posts_expected)}));
  for (const auto& t : b.topic_rows) {
    std::string lp_user, lp_date, lp_time;
    if (t.last_post) {
      lp_user = t.last_post->username;
      lp_date = t.last_post->when.date;
      lp_time = t.last_post->when.time;
    }
    impl_->topic.write_row(row({std::string(to_string(t.source)), field::of(t.tid), field::of(t.fid),
                                field::of(t.title), field::of(t.posts_expected), field::of(t.views), lp_user, lp_date,
                                lp_time, field::of(t.closed), field::of(t.moved), field::of(t.first_post_user)}));
  }
  for (const auto& p : b.post_rows) {
    std::string eu, ed, et;
    if (p.edit) {
      eu = p.edit->username;
      ed = p.edit->when.date;
      et = p.edit->when.time;
    }
    impl_->post.write_row(row({field::of(p.pid), field::of(p.tid), field::of(p.position),
                               field::of(p.position_on_page), field::of(p.page_number), p.posted.date, p.posted.time,
                               field::of(p.uid), p.username, p.text, field::of(p.signature), eu, ed, et,
                               field::of(p.poster_post_count), field::of(p.poster_title),
                               field::of(p.poster_registered)}));
  }
  for (const auto& p : b.profile_rows)
    impl_->profile.write_row(row({field::of(p.uid), p.username, field::of(p.title), field::of(p.registered),
                                  opt_label(p.last_post, false), opt_label(p.last_post, true),
                                  field::of(p.num_posts), field::of(p.location)}));
  for (const auto& d : b.diagnostics) impl_->diag.write_row({std::to_string(b.source.scrape_id), b.source.path, d});
}

void RawWriter::add(const RawMarketBatch& b) {
  auto row = [&](std::initializer_list<std::string> rest) {
    std::vector<std::string> r = source_fields(b.source);
    r.insert(r.end(), rest);
    return r;
  };
  for (const auto& l : b.listing_rows)
    impl_->listing.write_row(row({field::of(l.lid), field::of(l.vid), field::of(l.vendor_username), l.title,
                                  field::of(l.price), field::of(l.cid), field::of(l.description),
                                  field::of(l.ships_from), field::of(l.ships_to), field::of(l.product_class),
                                  field::of(l.listing_available), field::of(l.return_policy)}));
  for (const auto& v : b.vendor_rows)
    impl_->vendor.write_row(row({field::of(v.vid), v.username, field::of(v.rank), field::of(v.sales),
                                 field::of(v.approval_rating), field::of(v.positive_feedback),
                                 field::of(v.neutral_feedback), field::of(v.negative_feedback),
                                 field::of(v.legacy_sales), field::of(v.pgp_key), field::of(v.return_policy),
                                 field::of(v.disabled)}));
  for (const auto& c : b.category_rows)
    impl_->category.write_row(row({field::of(c.cid), c.name, field::of(c.parent_cid)}));
  for (const auto& f : b.feedback_rows)
    impl_->feedback.write_row(row({field::of(f.lid), f.username, f.date_label, field::of(f.message)}));
  for (const auto& d : b.diagnostics) impl_->diag.write_row({std::to_string(b.source.scrape_id), b.source.path, d});
}

void RawWriter::commit() {
  for (TsvWriter* w : {&impl_->index_stats, &impl_->forum, &impl_->topic, &impl_->post, &impl_->profile,
                       &impl_->listing, &impl_->vendor, &impl_->category, &impl_->feedback, &impl_->diag})
    w->commit();
}

void read_index_stats(const fs::path& dir, const std::function<void(Tagged<IndexStats>&&)>& fn) {
  read_rows(dir, raw::kIndexStats, kIndexStatsHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    IndexStats s{field::opt_int(r[3]), field::opt_int(r[4]), field::opt_int(r[5]), field::opt_int(r[6])};
    fn({std::move(src), s});
  });
}

void read_forum_rows(const fs::path& dir, const std::function<void(Tagged<RawForumRow>&&)>& fn) {
  read_rows(dir, raw::kForumRows, kForumHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    RawForumRow f;
    auto s = forum_source_from_string(r[3]);
    if (!s) throw InputError(fmt::format("forum-rows: bad source '{}'", r[3]));
    f.source = *s;
    f.fid = field::req_int(r[4], "fid");
    f.category = field::opt_str(r[5]);
    f.title = field::opt_str(r[6]);
    f.description = field::opt_str(r[7]);
    f.pages = field::opt_int(r[8]);
    f.topics_expected = field::opt_int(r[9]);
    f.posts_expected = field::opt_int(r[10]);
    fn({std::move(src), std::move(f)});
  });
}

void read_topic_rows(const fs::path& dir, const std::function<void(Tagged<RawTopicRow>&&)>& fn) {
  read_rows(dir, raw::kTopicRows, kTopicHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    RawTopicRow t;
    auto s = forum_source_from_string(r[3]);
    if (!s) throw InputError(fmt::format("topic-rows: bad source '{}'", r[3]));
    t.source = *s;
    t.tid = field::req_int(r[4], "tid");
    t.fid = field::req_int(r[5], "fid");
    t.title = field::opt_str(r[6]);
    t.posts_expected = field::opt_int(r[7]);
    t.views = field::opt_int(r[8]);
    if (!r[9].empty()) t.last_post = LastPostRef{r[9], DateLabel{r[10], r[11]}};
    t.closed = field::opt_bool(r[12]);
    t.moved = field::opt_bool(r[13]).value_or(false);
    t.first_post_user = field::opt_str(r[14]);
    fn({std::move(src), std::move(t)});
  });
}

void read_post_rows(const fs::path& dir, const std::function<void(Tagged<RawPostRow>&&)>& fn) {
  read_post_rows_file(dir / raw::kPostRows, fn);
}

void read_post_rows_file(const fs::path& file, const std::function<void(Tagged<RawPostRow>&&)>& fn) {
  read_rows_file(file, kPostHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    RawPostRow p;
    p.pid = field::req_int(r[3], "pid");
    p.tid = field::req_int(r[4], "tid");
    p.position = field::req_int(r[5], "position");
    p.position_on_page = field::req_int(r[6], "position_on_page");
    p.page_number = field::req_int(r[7], "page_number");
    p.posted = DateLabel{std::move(r[8]), std::move(r[9])};
    p.uid = field::req_int(r[10], "uid");
    p.username = std::move(r[11]);
    p.text = std::move(r[12]);
    p.signature = field::opt_str(r[13]);
    if (!r[14].empty()) p.edit = EditInfo{std::move(r[14]), DateLabel{std::move(r[15]), std::move(r[16])}};
    p.poster_post_count = field::opt_int(r[17]);
    p.poster_title = field::opt_str(r[18]);
    p.poster_registered = field::opt_str(r[19]);
    fn({std::move(src), std::move(p)});
  });
}

void read_profile_rows(const fs::path& dir, const std::function<void(Tagged<RawProfileRow>&&)>& fn) {
  read_rows(dir, raw::kProfileRows, kProfileHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    RawProfileRow p;
    p.uid = field::req_int(r[3], "uid");
    p.username = std::move(r[4]);
    p.title = field::opt_str(r[5]);
    p.registered = field::opt_str(r[6]);
    if (!r[7].empty()) p.last_post = DateLabel{std::move(r[7]), std::move(r[8])};
    p.num_posts = field::opt_int(r[9]);
    p.location = field::opt_str(r[10]);
    fn({std::move(src), std::move(p)});
  });
}

void read_listing_rows(const fs::path& dir, const std::function<void(Tagged<RawListingRow>&&)>& fn) {
  read_rows(dir, raw::kListingRows, kListingHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    RawListingRow l;
    l.lid = field::req_int(r[3], "lid");
    l.vid = field::req_int(r[4], "vid");
    l.vendor_username = field::opt_str(r[5]);
    l.title = std::move(r[6]);
    l.price = field::opt_str(r[7]);
    l.cid = field::opt_int(r[8]);
    l.description = field::opt_str(r[9]);
    l.ships_from = field::opt_str(r[10]);
    l.ships_to = field::opt_str(r[11]);
    l.product_class = field::opt_str(r[12]);
    l.listing_available = field::opt_bool(r[13]);
    l.return_policy = field::opt_str(r[14]);
    fn({std::move(src), std::move(l)});
  });
}

void read_vendor_rows(const fs::path& dir, const std::function<void(Tagged<RawVendorRow>&&)>& fn) {
  read_rows(dir, raw::kVendorRows, kVendorHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    RawVendorRow v;
    v.vid = field::req_int(r[3], "vid");
    v.username = std::move(r[4]);
    v.rank = field::opt_str(r[5]);
    v.sales = field::opt_int(r[6]);
    v.approval_rating = field::opt_str(r[7]);
    v.positive_feedback = field::opt_int(r[8]);
    v.neutral_feedback = field::opt_int(r[9]);
    v.negative_feedback = field::opt_int(r[10]);
    v.legacy_sales = field::opt_str(r[11]);
    v.pgp_key = field::opt_str(r[12]);
    v.return_policy = field::opt_str(r[13]);
    v.disabled = field::opt_bool(r[14]);
    fn({std::move(src), std::move(v)});
  });
}

void read_category_rows(const fs::path& dir, const std::function<void(Tagged<RawCategoryRow>&&)>& fn) {
  read_rows(dir, raw::kCategoryRows, kCategoryHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    RawCategoryRow c;
    c.cid = field::req_int(r[3], "cid");
    c.name = std::move(r[4]);
    c.parent_cid = field::opt_int(r[5]);
    fn({std::move(src), std::move(c)});
  });
}

void read_feedback_rows(const fs::path& dir, const std::function<void(Tagged<RawFeedbackRow>&&)>& fn) {
  read_rows(dir, raw::kFeedbackRows, kFeedbackHeader, [&](SourceTag&& src, std::vector<std::string>& r) {
    RawFeedbackRow f;
    f.lid = field::req_int(r[3], "lid");
    f.username = std::move(r[4]);
    f.date_label = std::move(r[5]);
    f.message = field::opt_str(r[6]);
    fn({std::move(src), std::move(f)});
  });
}

}  // namespace dnm
