#include "lppl/timeseries.hpp"

#include "lppl/dates.hpp"
#include "lppl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace lppl {

TimeSeries TimeSeries::from_points(std::vector<std::pair<double, double>> points,
                                   std::string label) {
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    TimeSeries s;
    s.label = std::move(label);
    s.times.reserve(points.size());
    s.values.reserve(points.size());
    for (const auto& [t, v] : points) {
        s.times.push_back(t);
        s.values.push_back(v);
    }
    s.validate();
    return s;
}

void TimeSeries::validate() const {
    if (times.empty())
        throw ValidationError("time series is empty");
    if (times.size() != values.size())
        throw ValidationError("times and values lengths differ");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
            throw ValidationError("non-finite observation at index " + std::to_string(i));
        if (i > 0 && !(times[i] > times[i - 1]))
            throw ValidationError("timestamps not strictly increasing at index " +
                                  std::to_string(i));
    }
}

double TimeSeries::median_spacing() const {
    if (times.size() < 2)
        throw InsufficientDataError("need at least 2 observations for a spacing");
    std::vector<double> gaps(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i)
        gaps[i - 1] = times[i] - times[i - 1];
    std::sort(gaps.begin(), gaps.end());
    const std::size_t n = gaps.size();
    return n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
}

namespace {

std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim))
        out.push_back(field);
    if (!line.empty() && line.back() == delim)
        out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && is_space(s.back()))
        s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i])))
        ++i;
    return s.substr(i);
}

} // namespace

TimeSeries parse_csv(std::istream& in, const CsvSpec& spec) {
    std::string line;
    if (!std::getline(in, line))
        throw InsufficientDataError("empty input: no header row");

    const auto header = split_row(line, spec.delimiter);
    std::ptrdiff_t date_col = -1;
    std::ptrdiff_t value_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto name = trim(header[i]);
        if (name == spec.date_column)
            date_col = static_cast<std::ptrdiff_t>(i);
        else if (name == spec.value_column)
            value_col = static_cast<std::ptrdiff_t>(i);
    }
    if (date_col < 0)
        throw ParseError("header has no column named '" + spec.date_column + "'");
    if (value_col < 0)
        throw ParseError("header has no column named '" + spec.value_column + "'");

    std::vector<std::pair<double, double>> points;
    std::vector<std::string> dates;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto fields = split_row(line, spec.delimiter);
        const auto need = static_cast<std::size_t>(std::max(date_col, value_col)) + 1;
        if (fields.size() < need)
            throw ParseError("line " + std::to_string(line_no) + ": expected at least " +
                             std::to_string(need) + " fields, got " +
                             std::to_string(fields.size()));
        const std::string date_text = trim(fields[static_cast<std::size_t>(date_col)]);
        const std::string value_text = trim(fields[static_cast<std::size_t>(value_col)]);
        double t;
        try {
            t = to_decimal_years(parse_iso_date(date_text));
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        std::size_t consumed = 0;
        double v = 0;
        try {
            v = std::stod(value_text, &consumed);
        } catch (const std::exception&) {
            consumed = 0;
        }
        if (consumed == 0 || consumed != value_text.size() || !std::isfinite(v))
            throw ParseError("line " + std::to_string(line_no) + ": bad numeric value '" +
                             value_text + "'");
        points.emplace_back(t, v);
        dates.push_back(date_text);
    }
    if (points.empty())
        throw InsufficientDataError("empty input: header but no data rows");

    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first))
            throw ValidationError("duplicate date " +
                                  format_iso_date(from_decimal_years(points[i].first)) +
                                  " in input");
    return TimeSeries::from_points(std::move(points));
}

TimeSeries parse_csv(const std::string& text, const CsvSpec& spec) {
    std::istringstream in(text);
    return parse_csv(in, spec);
}

TimeSeries parse_csv_file(const std::string& path, const CsvSpec& spec) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open input file '" + path + "'");
    auto s = parse_csv(in, spec);
    if (s.label.empty())
        s.label = path;
    return s;
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
    out << "date,decimal_year,value\n";
    char buf[80];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g",
                      format_iso_date(from_decimal_years(series.times[i])).c_str(),
                      series.times[i], series.values[i]);
        out << buf << '\n';
    }
}

TimeSeries moving_average(const TimeSeries& series, int window_len) {
    series.validate();
    if (window_len < 1)
        throw ValidationError("moving-average window must be positive");
    const auto w = static_cast<std::size_t>(window_len);
    if (series.size() < w)
        throw InsufficientDataError("series of length " + std::to_string(series.size()) +
                                    " is shorter than moving-average window " +
                                    std::to_string(window_len));
    TimeSeries out;
    out.label = series.label;
    const std::size_t n_out = series.size() - w + 1;
    out.times.reserve(n_out);
    out.values.reserve(n_out);
    for (std::size_t i = w - 1; i < series.size(); ++i) {
        double sum = 0;
        for (std::size_t j = i + 1 - w; j <= i; ++j)
            sum += series.values[j];
        out.times.push_back(series.times[i]);
        out.values.push_back(sum / static_cast<double>(w));
    }
    return out;
}

TimeSeries slice(const TimeSeries& series, const Window& window) {
    if (!(window.t1 < window.t2))
        throw ValidationError("window start must precede its end");
    const auto lo = std::lower_bound(series.times.begin(), series.times.end(), window.t1);
    const auto hi = std::upper_bound(series.times.begin(), series.times.end(), window.t2);
    const auto first = static_cast<std::size_t>(lo - series.times.begin());
    const auto last = static_cast<std::size_t>(hi - series.times.begin());
    if (last - first < kMinWindowObs)
        throw InsufficientDataError("window [" + std::to_string(window.t1) + ", " +
                                    std::to_string(window.t2) + "] selects " +
                                    std::to_string(last - first) + " observations, need >= " +
                                    std::to_string(kMinWindowObs));
    TimeSeries out;
    out.label = series.label;
    out.times.assign(series.times.begin() + static_cast<std::ptrdiff_t>(first),
                     series.times.begin() + static_cast<std::ptrdiff_t>(last));
    out.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(first),
                      series.values.begin() + static_cast<std::ptrdiff_t>(last));
    return out;
}

} // namespace lppl
