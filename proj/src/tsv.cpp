#include "dnmetl/tsv.hpp"

#include <fmt/format.h>

#include <sstream>

#include "dnmetl/error.hpp"
#include "dnmetl/text.hpp"

namespace dnm {

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    char c = escaped[i];
    if (c != '\\' || i + 1 == escaped.size()) {
      out += c;
      continue;
    }
    char n = escaped[++i];
    switch (n) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default:
        out += '\\';
        out += n;
    }
  }
  return out;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw InputError(fmt::format("missing column '{}'", name));
}

TsvWriter::TsvWriter(std::filesystem::path path, const std::vector<std::string>& header)
    : path_(std::move(path)), columns_(header.size()) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  tmp_ = path_;
  tmp_ += ".tmp";
  out_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw InputError(fmt::format("cannot write {}", tmp_.string()));
  write_row(header);
  rows_ = 0;
}

TsvWriter::~TsvWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

void TsvWriter::write_row(std::span<const std::string> fields) {
  if (fields.size() != columns_)
    throw std::logic_error(fmt::format("{}: row has {} fields, header has {}", path_.string(),
                                       fields.size(), columns_));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.put('\t');
    out_ << escape_field(fields[i]);
  }
  out_.put('\n');
  ++rows_;
}

void TsvWriter::commit() {
  out_.close();
  if (!out_) throw InputError(fmt::format("write failed for {}", tmp_.string()));
  std::filesystem::rename(tmp_, path_);
  committed_ = true;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  TsvWriter w(path, table.header);
  for (const auto& r : table.rows) w.write_row(r);
  w.commit();
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  for (auto part : split(line, '\t')) out.push_back(unescape_field(part));
  return out;
}

}  // namespace

void for_each_row(const std::filesystem::path& path,
                  const std::function<void(const std::vector<std::string>&, std::vector<std::string>&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  std::string line;
  if (!std::getline(in, line)) throw InputError(fmt::format("{}: missing header", path.string()));
  const auto header = split_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = split_line(line);
    if (row.size() != header.size())
      throw InputError(fmt::format("{}:{}: expected {} fields, got {}", path.string(), lineno,
                                   header.size(), row.size()));
    fn(header, row);
  }
}

Table read_table(const std::filesystem::path& path) {
  Table t;
  for_each_row(path, [&](const std::vector<std::string>& header, std::vector<std::string>& row) {
    if (t.header.empty()) t.header = header;
    t.rows.push_back(std::move(row));
  });
  if (t.header.empty()) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::getline(in, line);
    t.header = split_line(line);
  }
  return t;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InputError(fmt::format("write failed for {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

namespace field {

std::string of(std::int64_t v) { return std::to_string(v); }
std::string of(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string{}; }
std::string of(bool v) { return v ? "True" : "False"; }
std::string of(const std::optional<bool>& v) { return v ? of(*v) : std::string{}; }
std::string of(const std::optional<std::string>& v) { return v ? *v : std::string{}; }

std::optional<std::int64_t> opt_int(std::string_view f) {
  if (f.empty()) return std::nullopt;
  auto v = parse_int(f);
  if (!v) throw InputError(fmt::format("not an integer: '{}'", f));
  return v;
}

std::int64_t req_int(std::string_view f, std::string_view what) {
  auto v = opt_int(f);
  if (!v) throw InputError(fmt::format("missing required integer field {}", what));
  return *v;
}

std::optional<bool> opt_bool(std::string_view f) {
  if (f.empty()) return std::nullopt;
  if (f == "True") return true;
  if (f == "False") return false;
  throw InputError(fmt::format("not a boolean: '{}'", f));
}

std::optional<std::string> opt_str(std::string_view f) {
  if (f.empty()) return std::nullopt;
  return std::string(f);
}

std::optional<Date> opt_date(std::string_view f) {
  if (f.empty()) return std::nullopt;
  auto d = parse_date(f);
  if (!d) throw InputError(fmt::format("not a date: '{}'", f));
  return d;
}

std::optional<TimeOfDay> opt_time(std::string_view f) {
  if (f.empty()) return std::nullopt;
  auto t = parse_time(f);
  if (!t) throw InputError(fmt::format("not a time: '{}'", f));
  return t;
}

}  // namespace field

}  // namespace dnm
