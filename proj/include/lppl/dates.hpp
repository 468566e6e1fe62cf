#pragma once

#include <string>
#include <string_view>

namespace lppl {

/// Gregorian calendar date.
struct Date {
    int year = 1970;
    unsigned month = 1; // 1..12
    unsigned day = 1;   // 1..31

    friend bool operator==(const Date&, const Date&) = default;
};

bool is_leap_year(int year);
int days_in_year(int year);

/// 1-based ordinal day within the year (Jan 1 = 1). Throws ValidationError on invalid dates.
int day_of_year(const Date& d);

/// Converts a calendar date to a fractional year:
///   year + (day_of_year - 1) / days_in_year
/// so Jan 1 maps to the integer year and Dec 31 to just below the next one.
/// The fit operates on this axis; it keeps omega and m comparable with the
/// LPPL literature (weekly index units would rescale omega).
double to_decimal_years(const Date& d);

/// Inverse of to_decimal_years, rounded to the nearest calendar day.
Date from_decimal_years(double t);

/// Parses "yyyy-mm-dd". Throws ParseError on malformed text, ValidationError on impossible dates.
Date parse_iso_date(std::string_view text);

std::string format_iso_date(const Date& d);

} // namespace lppl
