#pragma once

#include "lppl/optimizer.hpp"
#include "lppl/timeseries.hpp"

#include <array>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace lppl {

/// Calendar conversions used by the window grids, fixed for reproducibility:
/// a month is exactly 1/12 year, a day exactly 1/365.25 years.
inline constexpr double kYearsPerMonth = 1.0 / 12.0;
inline constexpr double kYearsPerDay = 1.0 / 365.25;

struct EnsembleConfig {
    FitConfig fit{};
    double span_min = 6 * kYearsPerMonth;  // shortest t2 - t1, years
    double span_max = 18 * kYearsPerMonth; // longest t2 - t1, years
    double t1_step = 7 * kYearsPerDay;     // t1 grid spacing, years
    std::vector<double> probs = {0.05, 0.20, 0.50, 0.80, 0.95};
    bool require_negative_b = false; // qualification filter: keep only B < 0 fits
    double extrap_horizon = 0.5;         // years past t2
    double extrap_step = 7 * kYearsPerDay;
    int density_grid_size = 201;
    int jobs = 1; // worker threads across window fits; results independent of this
};

struct WindowFailure {
    Window window{};
    std::string reason;
};

/// Kernel density estimate of the crash-time cloud. When every tc coincides
/// the estimate collapses; that case is flagged instead of faked as a curve.
struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0;
    bool point_mass = false;
    double point_mass_at = std::numeric_limits<double>::quiet_NaN();

    /// Grid point of highest density (the flagged location for a point mass).
    double mode() const;
};

/// Default probability levels of the extrapolation envelope.
inline constexpr std::array<double, 4> kBandProbs = {0.05, 0.20, 0.80, 0.95};

struct BandPoint {
    double t = 0;
    int n_fits = 0; // fits with tc > t contributing here; 0 marks a band gap
    std::array<double, 4> q{}; // quantiles at kBandProbs
    bool gap() const { return n_fits == 0; }
};

struct EnsembleSummary {
    double t2 = 0;
    std::vector<FitResult> fits; // successful fits, ordered by t1
    std::vector<WindowFailure> failures;
    int n_windows = 0;
    int n_failed = 0;
    int n_filtered = 0; // removed by the B < 0 filter (counted, never hidden)
    std::map<double, double> tc_quantiles;
    DensityCurve density;
    std::vector<BandPoint> extrapolation;

    std::vector<double> tcs() const;
};

/// t1 grid for one t2: t1 = t2 - span_max, stepping by `step`, up to the
/// largest t1 <= t2 - span_min. Throws ConfigError when the grid is empty
/// or the spans are inconsistent.
std::vector<Window> generate_windows(double t2, double span_min = 6 * kYearsPerMonth,
                                     double span_max = 18 * kYearsPerMonth,
                                     double step = 7 * kYearsPerDay);

/// Empirical quantile with linear interpolation between order statistics
/// (rank h = (n-1)p + 1). Throws ValidationError for empty input or p
/// outside [0, 1].
std::map<double, double> tc_quantiles(const std::vector<double>& tcs,
                                      const std::vector<double>& probs);

/// Gaussian KDE with Silverman bandwidth 0.9*min(sd, IQR/1.34)*n^(-1/5),
/// floored at `bandwidth_floor` (callers pass one observation spacing),
/// renormalized to integrate to 1 on the grid by the trapezoid rule.
DensityCurve tc_density(const std::vector<double>& tcs, const std::vector<double>& grid,
                        double bandwidth_floor = 0);

/// As tc_density but on an automatic grid spanning the data +- 3 bandwidths.
DensityCurve tc_density_auto(const std::vector<double>& tcs, double bandwidth_floor = 0,
                             int grid_size = 201);

/// Cross-fit quantile bands of extrapolated model values. A fit contributes
/// at a grid point only while the point lies strictly before its tc; points
/// where nothing contributes are flagged as gaps.
std::vector<BandPoint> extrapolation_band(const std::vector<FitResult>& fits,
                                          const std::vector<double>& future_times,
                                          OscForm osc = OscForm::OmegaLogTau,
                                          const std::array<double, 4>& probs = kBandProbs);

/// Fits every generated window at this t2 (failures recorded, never silently
/// dropped), then aggregates crash-time quantiles, density and extrapolation.
/// Throws EnsembleError when no window yields a usable fit or t2 is outside
/// the data support.
EnsembleSummary run_ensemble(const TimeSeries& data, double t2,
                             const EnsembleConfig& config = {});

struct ScanEntry {
    double t2 = 0;
    bool failed = false;
    std::string reason;
    EnsembleSummary summary; // valid when !failed
};

/// Stability diagnostic across the t2 scan: where each density peaks and how
/// much the peak moves.
struct StabilityReport {
    std::vector<double> t2s;
    std::vector<double> modes;       // density mode per successful t2 (NaN when failed)
    std::vector<double> mode_drift;  // |mode_{k+1} - mode_k| between successive successes
    double early_mode_range = 0;     // max - min over the earliest 4 modes (fewer if scan is short)
};

struct ScanResult {
    std::vector<ScanEntry> entries; // ordered by t2
    StabilityReport stability;
    int n_failed = 0;
};

/// Ensembles at t2 = center_t2 + k*step for k centered on zero (k in
/// {-3..3} with the default n_t2 = 7). Per-t2 failures are recorded and do
/// not abort the scan; throws EnsembleError only when every t2 fails.
ScanResult scan_t2(const TimeSeries& data, double center_t2, int n_t2 = 7,
                   double step = 7 * kYearsPerDay, const EnsembleConfig& config = {});

} // namespace lppl
