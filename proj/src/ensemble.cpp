#include "lppl/ensemble.hpp"

#include "lppl/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace lppl {

namespace {

// Type-7 empirical quantile (linear interpolation at rank h = (n-1)p + 1)
// on an already-sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n)
        return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double sample_sd(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs)
        mean += x;
    mean /= n;
    double ss = 0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1));
}

// Silverman bandwidth with the R-style fallback when the IQR degenerates.
// Returns nullopt when the sample has no spread at all (point mass).
std::optional<double> silverman_bandwidth(std::vector<double> sorted, double floor_value) {
    const auto [mn, mx] = std::minmax_element(sorted.begin(), sorted.end());
    if (*mn == *mx || sorted.size() < 2)
        return std::nullopt;
    const double sd = sample_sd(sorted);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double scale = std::min(sd, iqr / 1.34);
    if (scale == 0)
        scale = sd;
    const double bw =
        0.9 * scale * std::pow(static_cast<double>(sorted.size()), -0.2);
    const double floored = std::max(bw, floor_value);
    if (floored <= 0)
        return std::nullopt;
    return floored;
}

DensityCurve point_mass_curve(double at) {
    DensityCurve c;
    c.point_mass = true;
    c.point_mass_at = at;
    return c;
}

} // namespace

double DensityCurve::mode() const {
    if (point_mass)
        return point_mass_at;
    const auto it = std::max_element(density.begin(), density.end());
    return grid[static_cast<std::size_t>(it - density.begin())];
}

std::vector<double> EnsembleSummary::tcs() const {
    std::vector<double> out;
    out.reserve(fits.size());
    for (const auto& f : fits)
        out.push_back(f.nl.tc);
    return out;
}

std::vector<Window> generate_windows(double t2, double span_min, double span_max, double step) {
    if (!(span_min > 0) || !(span_max >= span_min) || !(step > 0))
        throw ConfigError("inconsistent window spans: need 0 < span_min <= span_max, step > 0");
    std::vector<Window> out;
    const double tol = 1e-9 * step;
    for (int k = 0;; ++k) {
        const double t1 = t2 - span_max + k * step;
        if (t1 > t2 - span_min + tol)
            break;
        out.push_back(Window{t1, t2});
    }
    if (out.empty())
        throw ConfigError("window grid is empty");
    return out;
}

std::map<double, double> tc_quantiles(const std::vector<double>& tcs,
                                      const std::vector<double>& probs) {
    if (tcs.empty())
        throw ValidationError("quantiles of an empty sample");
    std::vector<double> sorted = tcs;
    std::sort(sorted.begin(), sorted.end());
    std::map<double, double> out;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("probability " + std::to_string(p) + " outside [0, 1]");
        out[p] = quantile_sorted(sorted, p);
    }
    return out;
}

DensityCurve tc_density(const std::vector<double>& tcs, const std::vector<double>& grid,
                        double bandwidth_floor) {
    if (tcs.empty())
        throw ValidationError("density of an empty sample");
    if (grid.size() < 2)
        throw ValidationError("density grid needs at least 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ValidationError("density grid must be strictly increasing");

    std::vector<double> sorted = tcs;
    std::sort(sorted.begin(), sorted.end());
    const auto bw = silverman_bandwidth(sorted, bandwidth_floor);
    if (!bw)
        return point_mass_curve(sorted.front());

    DensityCurve c;
    c.grid = grid;
    c.bandwidth = *bw;
    c.density.resize(grid.size());
    const double norm = 1.0 / (static_cast<double>(tcs.size()) * *bw *
                               std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0;
        for (double tc : sorted) {
            const double z = (grid[i] - tc) / *bw;
            acc += std::exp(-0.5 * z * z);
        }
        c.density[i] = norm * acc;
    }
    double integral = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        integral += 0.5 * (c.density[i] + c.density[i - 1]) * (grid[i] - grid[i - 1]);
    if (!(integral > 0))
        throw ValidationError("density grid does not cover the sample support");
    for (double& d : c.density)
        d /= integral;
    return c;
}

DensityCurve tc_density_auto(const std::vector<double>& tcs, double bandwidth_floor,
                             int grid_size) {
    if (tcs.empty())
        throw ValidationError("density of an empty sample");
    if (grid_size < 2)
        throw ConfigError("density grid size must be at least 2");
    std::vector<double> sorted = tcs;
    std::sort(sorted.begin(), sorted.end());
    const auto bw = silverman_bandwidth(sorted, bandwidth_floor);
    if (!bw)
        return point_mass_curve(sorted.front());
    const double lo = sorted.front() - 3.0 * *bw;
    const double hi = sorted.back() + 3.0 * *bw;
    std::vector<double> grid(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i)
        grid[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    return tc_density(tcs, grid, bandwidth_floor);
}

std::vector<BandPoint> extrapolation_band(const std::vector<FitResult>& fits,
                                          const std::vector<double>& future_times,
                                          OscForm osc, const std::array<double, 4>& probs) {
    std::vector<BandPoint> out;
    out.reserve(future_times.size());
    for (double t : future_times) {
        BandPoint bp;
        bp.t = t;
        std::vector<double> values;
        values.reserve(fits.size());
        for (const auto& f : fits) {
            if (!(f.nl.tc > t))
                continue; // model undefined at and beyond tc
            values.push_back(lppl_value(f.nl, f.lin, t, osc));
        }
        bp.n_fits = static_cast<int>(values.size());
        if (values.empty()) {
            bp.q.fill(std::numeric_limits<double>::quiet_NaN());
        } else {
            std::sort(values.begin(), values.end());
            for (std::size_t k = 0; k < probs.size(); ++k)
                bp.q[k] = quantile_sorted(values, probs[k]);
        }
        out.push_back(bp);
    }
    return out;
}

EnsembleSummary run_ensemble(const TimeSeries& data, double t2, const EnsembleConfig& config) {
    data.validate();
    if (t2 < data.first_time() || t2 > data.last_time())
        throw EnsembleError("t2 outside data support");

    const auto windows = generate_windows(t2, config.span_min, config.span_max, config.t1_step);

    struct Slot {
        std::optional<FitResult> fit;
        std::string failure;
    };
    std::vector<Slot> slots(windows.size());
    detail::parallel_for(windows.size(), config.jobs, [&](std::size_t i) {
        try {
            slots[i].fit = fit_window(data, windows[i], config.fit);
        } catch (const Error& e) {
            slots[i].failure = e.what();
        }
    });

    EnsembleSummary summary;
    summary.t2 = t2;
    summary.n_windows = static_cast<int>(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!slots[i].fit) {
            summary.failures.push_back(WindowFailure{windows[i], slots[i].failure});
            continue;
        }
        if (config.require_negative_b && !(slots[i].fit->lin.B < 0)) {
            ++summary.n_filtered;
            continue;
        }
        summary.fits.push_back(std::move(*slots[i].fit));
    }
    summary.n_failed = static_cast<int>(summary.failures.size());
    if (summary.fits.empty()) {
        std::ostringstream msg;
        msg << "no usable fit at t2 = " << t2 << " (" << summary.n_failed << " of "
            << summary.n_windows << " windows failed";
        if (summary.n_filtered > 0)
            msg << ", " << summary.n_filtered << " filtered by B < 0";
        msg << ")";
        throw EnsembleError(msg.str());
    }

    const auto tcs = summary.tcs();
    summary.tc_quantiles = tc_quantiles(tcs, config.probs);
    summary.density =
        tc_density_auto(tcs, data.median_spacing(), config.density_grid_size);

    std::vector<double> grid;
    const double tol = 1e-9 * config.extrap_step;
    for (int k = 0;; ++k) {
        const double t = t2 + k * config.extrap_step;
        if (t > t2 + config.extrap_horizon + tol)
            break;
        grid.push_back(t);
    }
    summary.extrapolation = extrapolation_band(summary.fits, grid, config.fit.osc);
    return summary;
}

ScanResult scan_t2(const TimeSeries& data, double center_t2, int n_t2, double step,
                   const EnsembleConfig& config) {
    if (n_t2 < 1)
        throw ConfigError("scan needs at least one t2");
    if (!(step > 0))
        throw ConfigError("scan step must be positive");

    ScanResult scan;
    const int k0 = -(n_t2 - 1) / 2;
    for (int i = 0; i < n_t2; ++i) {
        const double t2 = center_t2 + (k0 + i) * step;
        ScanEntry entry;
        entry.t2 = t2;
        try {
            entry.summary = run_ensemble(data, t2, config);
        } catch (const Error& e) {
            entry.failed = true;
            entry.reason = e.what();
            ++scan.n_failed;
        }
        scan.entries.push_back(std::move(entry));
    }
    if (scan.n_failed == n_t2)
        throw EnsembleError("every t2 in the scan failed");

    auto& st = scan.stability;
    std::vector<double> ok_modes;
    for (const auto& e : scan.entries) {
        st.t2s.push_back(e.t2);
        if (e.failed) {
            st.modes.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            const double mode = e.summary.density.mode();
            st.modes.push_back(mode);
            ok_modes.push_back(mode);
        }
    }
    for (std::size_t i = 1; i < ok_modes.size(); ++i)
        st.mode_drift.push_back(std::abs(ok_modes[i] - ok_modes[i - 1]));
    const std::size_t early = std::min<std::size_t>(4, ok_modes.size());
    if (early > 0) {
        const auto [mn, mx] =
            std::minmax_element(ok_modes.begin(), ok_modes.begin() + static_cast<std::ptrdiff_t>(early));
        st.early_mode_range = *mx - *mn;
    }
    return scan;
}

} // namespace lppl
