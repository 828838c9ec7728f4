#include "chainsim/date.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace chainsim {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("malformed date: " + std::string(text));
  }
  return value;
}

}  // namespace

Date parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw std::invalid_argument("malformed date: " + std::string(text));
  }
  const Date date{std::chrono::year{parse_field(text, 0, 4)},
                  std::chrono::month{static_cast<unsigned>(parse_field(text, 5, 2))},
                  std::chrono::day{static_cast<unsigned>(parse_field(text, 8, 2))}};
  if (!date.ok()) throw std::invalid_argument("invalid date: " + std::string(text));
  return date;
}

std::string format_iso_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

Date add_days(const Date& date, int days) {
  return Date{std::chrono::sys_days{date} + std::chrono::days{days}};
}

}  // namespace chainsim
