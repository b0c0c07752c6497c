#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace bmrisk {

using Date = std::chrono::sys_days;

/// Strict ISO-8601 calendar date, `YYYY-MM-DD`. Throws DataError otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Signed whole days from `from` to `to`.
inline long days_between(Date from, Date to) { return static_cast<long>((to - from).count()); }
inline Date add_days(Date d, long days) { return d + std::chrono::days{days}; }

}  // namespace bmrisk
