#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace chainsim {

using Date = std::chrono::year_month_day;

/// Parses "YYYY-MM-DD"; throws std::invalid_argument on malformed or invalid dates.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& date);
Date add_days(const Date& date, int days);

}  // namespace chainsim
