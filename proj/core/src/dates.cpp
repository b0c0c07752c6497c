#include "bmrisk/dates.hpp"

#include <charconv>
#include <cstdio>

#include "bmrisk/error.hpp"

namespace bmrisk {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
  int v = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') throw DataError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  std::from_chars(first, last, v);
  return v;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw DataError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{parse_field(text, 0, 4)},
                                        std::chrono::month{static_cast<unsigned>(parse_field(text, 5, 2))},
                                        std::chrono::day{static_cast<unsigned>(parse_field(text, 8, 2))}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
  return std::chrono::sys_days{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace bmrisk
