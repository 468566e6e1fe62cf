#include "lppl/dates.hpp"

#include "lppl/errors.hpp"

#include <charconv>
#include <chrono>
#include <cmath>

namespace lppl {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(const Date& d) {
    return chr::year_month_day{chr::year{d.year}, chr::month{d.month}, chr::day{d.day}};
}

chr::sys_days jan1(int year) {
    return chr::sys_days{chr::year_month_day{chr::year{year}, chr::month{1}, chr::day{1}}};
}

} // namespace

bool is_leap_year(int year) {
    return chr::year{year}.is_leap();
}

int days_in_year(int year) {
    return is_leap_year(year) ? 366 : 365;
}

int day_of_year(const Date& d) {
    const auto ymd = to_ymd(d);
    if (!ymd.ok())
        throw ValidationError("invalid calendar date: " + format_iso_date(d));
    return static_cast<int>((chr::sys_days{ymd} - jan1(d.year)).count()) + 1;
}

double to_decimal_years(const Date& d) {
    return d.year + static_cast<double>(day_of_year(d) - 1) / days_in_year(d.year);
}

Date from_decimal_years(double t) {
    if (!std::isfinite(t))
        throw ValidationError("non-finite decimal year");
    int year = static_cast<int>(std::floor(t));
    int diy = days_in_year(year);
    int doy = static_cast<int>(std::lround((t - year) * diy)) + 1;
    if (doy > diy) { // rounding landed on Jan 1 of the next year
        year += 1;
        doy = 1;
    }
    const auto ymd = chr::year_month_day{jan1(year) + chr::days{doy - 1}};
    return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day())};
}

Date parse_iso_date(std::string_view text) {
    const auto parse_part = [&](std::string_view part, const char* what) {
        int out = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc{} || ptr != part.data() + part.size())
            throw ParseError("malformed ISO date '" + std::string(text) + "': bad " + what);
        return out;
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw ParseError("malformed ISO date '" + std::string(text) + "': expected yyyy-mm-dd");
    Date d;
    d.year = parse_part(text.substr(0, 4), "year");
    d.month = static_cast<unsigned>(parse_part(text.substr(5, 2), "month"));
    d.day = static_cast<unsigned>(parse_part(text.substr(8, 2), "day"));
    if (!to_ymd(d).ok())
        throw ValidationError("invalid calendar date: " + std::string(text));
    return d;
}

std::string format_iso_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
    return buf;
}

} // namespace lppl
