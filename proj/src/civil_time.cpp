#include "dnmetl/civil_time.hpp"

#include <fmt/format.h>

#include <charconv>

namespace dnm {

namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const char* b = text.data() + pos;
  for (std::size_t i = 0; i < len; ++i)
    if (b[i] < '0' || b[i] > '9') return false;
  auto [p, ec] = std::from_chars(b, b + len, out);
  return ec == std::errc{} && p == b + len;
}

}  // namespace

Date make_date(int year, unsigned month, unsigned day) {
  return Date{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_fixed(text, 0, 4, y) || !parse_fixed(text, 5, 2, m) || !parse_fixed(text, 8, 2, d))
    return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

std::optional<TimeOfDay> parse_time(std::string_view text) {
  if (text.size() != 8 || text[2] != ':' || text[5] != ':') return std::nullopt;
  int h = 0, m = 0, s = 0;
  if (!parse_fixed(text, 0, 2, h) || !parse_fixed(text, 3, 2, m) || !parse_fixed(text, 6, 2, s))
    return std::nullopt;
  if (h > 23 || m > 59 || s > 59) return std::nullopt;
  return TimeOfDay{h * 3600 + m * 60 + s};
}

std::optional<DateTime> parse_datetime(std::string_view text) {
  if (text.size() != 19 || text[10] != ' ') return std::nullopt;
  auto d = parse_date(text.substr(0, 10));
  auto t = parse_time(text.substr(11));
  if (!d || !t) return std::nullopt;
  return at(*d, *t);
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::string format_time(TimeOfDay t) {
  auto s = t.count();
  return fmt::format("{:02d}:{:02d}:{:02d}", s / 3600, (s / 60) % 60, s % 60);
}

std::string format_datetime(DateTime t) {
  return format_date(date_of(t)) + " " + format_time(time_of(t));
}

int year_of(Date d) { return static_cast<int>(std::chrono::year_month_day{d}.year()); }
unsigned month_of(Date d) { return static_cast<unsigned>(std::chrono::year_month_day{d}.month()); }
unsigned day_of(Date d) { return static_cast<unsigned>(std::chrono::year_month_day{d}.day()); }

DateTime end_of_month(int year, unsigned month) {
  const Date final_day =
      Date{std::chrono::year{year} / std::chrono::month{month} / std::chrono::last};
  return at(final_day, TimeOfDay{86399});
}

std::int64_t network_seconds(DateTime t) {
  return (t - DateTime{kNetworkEpoch}).count();
}

}  // namespace dnm
