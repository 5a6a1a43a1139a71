#pragma once

// Tab-separated tables. No quoting; the four bytes that would break a line
// (backslash, tab, newline, carriage return) are backslash-escaped so that
// post texts and descriptions survive a round trip unchanged.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnmetl/civil_time.hpp"

namespace dnm {

std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws InputError if absent.
  std::size_t column(std::string_view name) const;
  bool operator==(const Table&) const = default;
};

/// Writes to `<path>.tmp` and renames onto `path` on commit(). An
/// uncommitted writer removes its temp file on destruction.
class TsvWriter {
 public:
  TsvWriter(std::filesystem::path path, const std::vector<std::string>& header);
  TsvWriter(const TsvWriter&) = delete;
  TsvWriter& operator=(const TsvWriter&) = delete;
  ~TsvWriter();

  void write_row(std::span<const std::string> fields);
  void write_row(const std::vector<std::string>& fields) { write_row(std::span<const std::string>(fields)); }
  void commit();
  std::size_t rows_written() const { return rows_; }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
  bool committed_ = false;
};

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Streams rows without holding the file in memory. The callback receives the
/// header once per call (for column lookup) and each unescaped row.
void for_each_row(const std::filesystem::path& path,
                  const std::function<void(const std::vector<std::string>& header,
                                           std::vector<std::string>& row)>& fn);

/// Atomic whole-file write (temp + rename).
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Field conventions: empty string for absent values, True/False for flags.
namespace field {

std::string of(std::int64_t v);
std::string of(const std::optional<std::int64_t>& v);
std::string of(bool v);
std::string of(const std::optional<bool>& v);
std::string of(const std::optional<std::string>& v);

std::optional<std::int64_t> opt_int(std::string_view f);
std::int64_t req_int(std::string_view f, std::string_view what);
std::optional<bool> opt_bool(std::string_view f);
std::optional<std::string> opt_str(std::string_view f);
std::optional<Date> opt_date(std::string_view f);
std::optional<TimeOfDay> opt_time(std::string_view f);

}  // namespace field

}  // namespace dnm
