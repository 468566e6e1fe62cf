#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lppl {

/// Ordered univariate observations on a decimal-year time axis.
/// Invariants (checked by validate / from_points): times strictly increasing,
/// equal nonzero lengths, all values finite. Instances are treated as
/// immutable once built and are safe to share across threads.
struct TimeSeries {
    std::vector<double> times;  // decimal years, strictly increasing
    std::vector<double> values; // series units
    std::string label;

    std::size_t size() const { return times.size(); }
    double first_time() const { return times.front(); }
    double last_time() const { return times.back(); }

    /// Builds a series from unordered (time, value) pairs: sorts by time,
    /// then validates. Duplicate timestamps are a ValidationError.
    static TimeSeries from_points(std::vector<std::pair<double, double>> points,
                                  std::string label = {});

    /// Throws ValidationError if any invariant is broken.
    void validate() const;

    /// Median gap between consecutive observations; the "one observation
    /// spacing" unit used by bandwidth floors and recovery tolerances.
    double median_spacing() const;
};

/// Closed time interval [t1, t2] selecting observations for one fit.
struct Window {
    double t1 = 0; // decimal-year start, inclusive
    double t2 = 0; // decimal-year end, inclusive

    friend bool operator==(const Window&, const Window&) = default;
};

/// A window must keep at least one observation more than the 7 model parameters.
inline constexpr std::size_t kMinWindowObs = 8;

struct CsvSpec {
    std::string date_column = "date";
    std::string value_column = "value";
    char delimiter = ',';
};

/// Reads delimiter-separated text with a header row, one ISO-8601 date column
/// and one numeric value column. Rows are sorted by date. Errors:
///   ParseError            malformed row / missing columns (names the line)
///   ValidationError       duplicate dates
///   InsufficientDataError header-only input
TimeSeries parse_csv(std::istream& in, const CsvSpec& spec = {});
TimeSeries parse_csv(const std::string& text, const CsvSpec& spec = {});
TimeSeries parse_csv_file(const std::string& path, const CsvSpec& spec = {});

/// Re-emits a series as CSV with columns date,decimal_year,value.
void write_series_csv(std::ostream& out, const TimeSeries& series);

/// Trailing (causal) moving average over window_len observations. Output point
/// i carries the timestamp of the newest raw observation in its window, so no
/// future data leaks past any timestamp. Length shrinks by window_len - 1.
TimeSeries moving_average(const TimeSeries& series, int window_len = 13);

/// Observations with t1 <= t <= t2, order preserved.
/// Throws InsufficientDataError when fewer than kMinWindowObs are selected.
TimeSeries slice(const TimeSeries& series, const Window& window);

} // namespace lppl
