#pragma once

#include "concentra/types.hpp"

#include <compare>
#include <string>

namespace concentra {

// Calendar date in the proleptic Gregorian calendar.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;
};

// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t days);

bool parse_date(const std::string& text, Date& out);  // YYYY-MM-DD
std::string format_date(const Date& d);

// Local wall-clock conversions against a fixed UTC offset.
TimestampMs local_midnight_utc_ms(const Date& date, int utc_offset_minutes);
Date local_date_of(TimestampMs utc_ms, int utc_offset_minutes);

}  // namespace concentra
