#pragma once

// Civil (timezone-free) dates and times. All timestamps in the pipeline are
// server-local wall-clock values; no timezone conversion is ever applied.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dnm {

using Date = std::chrono::sys_days;
using DateTime = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Seconds within a day, 0..86399.
using TimeOfDay = std::chrono::seconds;

/// Origin of the network `timestamp` column: 2014-01-01 00:00:00.
inline constexpr Date kNetworkEpoch = Date{std::chrono::year{2014} / 1 / 1};

Date make_date(int year, unsigned month, unsigned day);

/// "YYYY-MM-DD". Rejects anything else, including out-of-range fields.
std::optional<Date> parse_date(std::string_view text);
/// "HH:MM:SS" (24h).
std::optional<TimeOfDay> parse_time(std::string_view text);
/// "YYYY-MM-DD HH:MM:SS".
std::optional<DateTime> parse_datetime(std::string_view text);

std::string format_date(Date d);
std::string format_time(TimeOfDay t);
std::string format_datetime(DateTime t);

int year_of(Date d);
unsigned month_of(Date d);
unsigned day_of(Date d);

inline Date date_of(DateTime t) { return std::chrono::floor<std::chrono::days>(t); }
inline TimeOfDay time_of(DateTime t) { return t - date_of(t); }
inline DateTime at(Date d, TimeOfDay t) { return DateTime{d} + t; }

/// Last instant (23:59:59) of the calendar month containing `d`.
DateTime end_of_month(int year, unsigned month);

/// Seconds since kNetworkEpoch (may be negative).
std::int64_t network_seconds(DateTime t);

}  // namespace dnm
