#include "cli_app.hpp"

#include "lppl/dates.hpp"
#include "lppl/ensemble.hpp"
#include "lppl/errors.hpp"
#include "lppl/serialize.hpp"
#include "lppl/synth.hpp"
#include "lppl/timeseries.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lppl::cli {
namespace {

namespace fs = std::filesystem;

struct IoOpts {
    std::string input;
    std::string date_column = "date";
    std::string value_column = "value";
    std::string delimiter = ",";
    int ma_window = 13; // 1 leaves the series unsmoothed
};

struct OutOpts {
    std::string out_dir = ".";
    std::string format = "json";
};

struct FitOpts {
    double span_min_months = 6.0;
    double span_max_months = 18.0;
    double t1_step_days = 7.0;
    double horizon_months = 6.0;
    double extrap_step_days = 7.0;
    std::vector<double> probs = {0.05, 0.20, 0.50, 0.80, 0.95};
    int density_grid = 201;
    bool negative_b = false;
    bool literal_cos = false;
    std::uint64_t seed = 0;
    int n_candidates = 10;
    int jobs = 1;
    std::string config_path;
};

struct SynthOpts {
    std::string tc, start, end; // ISO dates; defaults derived from SynthSpec
    double spacing_days = 7.0;
    double m = 0, omega = 0, phi = 0, A = 0, B = 0, C = 0;
    double noise_sigma = 0;
    std::uint64_t seed = 0;
    bool literal_cos = false;
};

void add_io_options(CLI::App& cmd, IoOpts& io) {
    cmd.add_option("-i,--input", io.input, "input CSV path")->required();
    cmd.add_option("--date-column", io.date_column, "name of the ISO-date column")
        ->capture_default_str();
    cmd.add_option("--value-column", io.value_column, "name of the numeric value column")
        ->capture_default_str();
    cmd.add_option("--delimiter", io.delimiter, "CSV field delimiter (one character)")
        ->capture_default_str();
    cmd.add_option("--ma-window", io.ma_window,
                   "trailing moving-average length in observations; 1 disables smoothing")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

void add_out_options(CLI::App& cmd, OutOpts& out) {
    cmd.add_option("-o,--out", out.out_dir, "output directory")->capture_default_str();
    cmd.add_option("--format", out.format, "output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv", "both"}));
}

void add_fit_options(CLI::App& cmd, FitOpts& fo) {
    cmd.add_option("--span-min-months", fo.span_min_months, "shortest window span")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--span-max-months", fo.span_max_months, "longest window span")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--t1-step-days", fo.t1_step_days, "window start grid spacing")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--horizon-months", fo.horizon_months, "extrapolation horizon past t2")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--extrap-step-days", fo.extrap_step_days, "extrapolation grid spacing")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--probs", fo.probs, "crash-time quantile probabilities")
        ->capture_default_str()
        ->delimiter(',');
    cmd.add_option("--density-grid", fo.density_grid, "crash-time density grid size")
        ->capture_default_str()
        ->check(CLI::Range(2, 100000));
    cmd.add_flag("--negative-b", fo.negative_b, "keep only fits with B < 0");
    cmd.add_flag("--literal-cos", fo.literal_cos,
                 "use the cos(ln(omega*(tc-t)) + phi) oscillation form");
    cmd.add_option("--seed", fo.seed, "global RNG seed")->capture_default_str();
    cmd.add_option("--n-candidates", fo.n_candidates,
                   "search candidates refined per window")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("-j,--jobs", fo.jobs, "worker threads across window fits")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--config", fo.config_path,
                   "key=value file of optimizer settings; explicit flags win");
}

// --- config file -----------------------------------------------------------

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        }
        const auto key = trim(stripped.substr(0, eq));
        const auto value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        }
        kv[key] = value;
    }
    return kv;
}

double config_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
}

int config_int(const std::string& key, const std::string& value) {
    const double v = config_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ConfigError("config key '" + key + "': expected integer, got '" + value + "'");
    }
    return i;
}

std::uint64_t config_uint64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(value, &pos);
        if (pos == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "': bad seed '" + value + "'");
}

bool config_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

void apply_config_file(const std::string& path, FitConfig& fc) {
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "seed") fc.seed = config_uint64(key, value);
        else if (key == "n_candidates") fc.n_candidates = config_int(key, value);
        else if (key == "literal_cos")
            fc.osc = config_bool(key, value) ? OscForm::LogOmegaTau : OscForm::OmegaLogTau;
        else if (key == "taboo_evals_per_region") fc.taboo.evals_per_region = config_int(key, value);
        else if (key == "taboo_regions") fc.taboo.regions = config_int(key, value);
        else if (key == "taboo_tabu_len") fc.taboo.tabu_len = config_int(key, value);
        else if (key == "taboo_tabu_radius") fc.taboo.tabu_radius = config_double(key, value);
        else if (key == "taboo_step_init") fc.taboo.step_init = config_double(key, value);
        else if (key == "taboo_step_floor") fc.taboo.step_floor = config_double(key, value);
        else if (key == "taboo_halve_after") fc.taboo.halve_after = config_int(key, value);
        else if (key == "taboo_distinct_sep") fc.taboo.distinct_sep = config_double(key, value);
        else if (key == "lm_lambda_init") fc.lm.lambda_init = config_double(key, value);
        else if (key == "lm_lambda_factor") fc.lm.lambda_factor = config_double(key, value);
        else if (key == "lm_tol_rel_ssr") fc.lm.tol_rel_ssr = config_double(key, value);
        else if (key == "lm_tol_step") fc.lm.tol_step = config_double(key, value);
        else if (key == "lm_max_iters") fc.lm.max_iters = config_int(key, value);
        else if (key == "lm_fd_rel_step") fc.lm.fd.rel_step = config_double(key, value);
        else if (key == "lm_fd_abs_floor") fc.lm.fd.abs_floor = config_double(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

// ---------------------------------------------------------------------------

EnsembleConfig build_ensemble_config(const CLI::App& cmd, const FitOpts& fo) {
    EnsembleConfig cfg;
    if (!fo.config_path.empty()) apply_config_file(fo.config_path, cfg.fit);
    // Explicit flags override the config file; untouched flags keep its values.
    if (cmd.count("--seed")) cfg.fit.seed = fo.seed;
    if (cmd.count("--n-candidates")) cfg.fit.n_candidates = fo.n_candidates;
    if (cmd.count("--literal-cos")) cfg.fit.osc = OscForm::LogOmegaTau;

    cfg.span_min = fo.span_min_months * kYearsPerMonth;
    cfg.span_max = fo.span_max_months * kYearsPerMonth;
    cfg.t1_step = fo.t1_step_days * kYearsPerDay;
    cfg.extrap_horizon = fo.horizon_months * kYearsPerMonth;
    cfg.extrap_step = fo.extrap_step_days * kYearsPerDay;
    cfg.density_grid_size = fo.density_grid;
    cfg.require_negative_b = fo.negative_b;
    cfg.jobs = fo.jobs;

    for (double p : fo.probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("--probs values must lie in [0, 1]");
    }
    if (fo.probs.empty()) throw ConfigError("--probs must not be empty");
    cfg.probs = fo.probs;
    return cfg;
}

TimeSeries load_series(const IoOpts& io) {
    if (io.delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
    const CsvSpec spec{io.date_column, io.value_column, io.delimiter[0]};
    TimeSeries raw = parse_csv_file(io.input, spec);
    if (io.ma_window > 1) return moving_average(raw, io.ma_window);
    return raw;
}

double parse_cli_date(const std::string& iso, const char* what) {
    try {
        return to_decimal_years(parse_iso_date(iso));
    } catch (const Error& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

std::string iso_of(double decimal_year) {
    return format_iso_date(from_decimal_years(decimal_year));
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

void write_summary_files(const fs::path& dir, const std::string& stem,
                         const EnsembleSummary& summary, const std::string& format) {
    if (format != "csv") write_text_file(dir / (stem + ".json"), json_text(to_json(summary)));
    if (format != "json") {
        std::ostringstream fits, extrap, density;
        write_fits_csv(fits, summary);
        write_extrapolation_csv(extrap, summary);
        write_density_csv(density, summary);
        write_text_file(dir / (stem + "_fits.csv"), fits.str());
        write_text_file(dir / (stem + "_extrapolation.csv"), extrap.str());
        write_text_file(dir / (stem + "_density.csv"), density.str());
    }
}

int cmd_fit(const IoOpts& io, const OutOpts& out, const std::string& t2_iso,
            const EnsembleConfig& cfg) {
    const TimeSeries data = load_series(io);
    const double t2 = parse_cli_date(t2_iso, "--t2");
    if (t2 < data.first_time() || t2 > data.last_time()) {
        throw ValidationError("t2 outside data support [" + iso_of(data.first_time()) + ", " +
                              iso_of(data.last_time()) + "]");
    }
    const EnsembleSummary summary = run_ensemble(data, t2, cfg);
    fs::create_directories(out.out_dir);
    write_summary_files(out.out_dir, "fit_" + iso_of(t2), summary, out.format);
    std::cerr << "fit " << iso_of(t2) << ": " << summary.fits.size() << "/" << summary.n_windows
              << " windows fit, tc median " << (summary.tc_quantiles.count(0.5)
                                                    ? iso_of(summary.tc_quantiles.at(0.5))
                                                    : std::string("n/a"))
              << "\n";
    return 0;
}

int cmd_scan(const IoOpts& io, const OutOpts& out, const std::string& center_iso, int n_t2,
             double t2_step_days, const EnsembleConfig& cfg) {
    const TimeSeries data = load_series(io);
    const double center = parse_cli_date(center_iso, "--center");
    const ScanResult scan = scan_t2(data, center, n_t2, t2_step_days * kYearsPerDay, cfg);
    fs::create_directories(out.out_dir);
    for (const auto& entry : scan.entries) {
        if (entry.failed) continue;
        write_summary_files(out.out_dir, "scan_" + iso_of(entry.t2), entry.summary, out.format);
    }
    const std::string stem = "scan_" + iso_of(center) + "_stability";
    if (out.format != "csv") {
        write_text_file(fs::path(out.out_dir) / (stem + ".json"), json_text(to_json(scan)));
    }
    if (out.format != "json") {
        std::ostringstream os;
        write_stability_csv(os, scan);
        write_text_file(fs::path(out.out_dir) / (stem + ".csv"), os.str());
    }
    std::cerr << "scan " << iso_of(center) << ": " << (scan.entries.size() - scan.n_failed) << "/"
              << scan.entries.size() << " t2 values succeeded\n";
    return 0;
}

int cmd_synth(const OutOpts& out, const SynthOpts& so) {
    SynthSpec spec;
    spec.nl.tc = parse_cli_date(so.tc, "--tc");
    spec.start = parse_cli_date(so.start, "--start");
    spec.end = parse_cli_date(so.end, "--end");
    if (so.spacing_days <= 0) throw ConfigError("--spacing-days must be positive");
    spec.spacing = so.spacing_days * kYearsPerDay;
    spec.nl.m = so.m;
    spec.nl.omega = so.omega;
    spec.nl.phi = so.phi;
    spec.lin = {so.A, so.B, so.C};
    spec.noise_sigma = so.noise_sigma;
    spec.seed = so.seed;
    spec.osc = so.literal_cos ? OscForm::LogOmegaTau : OscForm::OmegaLogTau;

    const TimeSeries series = generate(spec);
    fs::create_directories(out.out_dir);
    const std::string stem = "synth_" + iso_of(spec.end);
    std::ostringstream os;
    write_series_csv(os, series);
    write_text_file(fs::path(out.out_dir) / (stem + ".csv"), os.str());
    write_text_file(fs::path(out.out_dir) / (stem + "_truth.json"), json_text(to_json(spec)));
    std::cerr << "synth: " << series.size() << " observations\n";
    return 0;
}

int cmd_smooth(const IoOpts& io, const OutOpts& out) {
    const TimeSeries smoothed = load_series(io);
    fs::create_directories(out.out_dir);
    std::ostringstream os;
    write_series_csv(os, smoothed);
    write_text_file(fs::path(out.out_dir) / ("smooth_" + iso_of(smoothed.last_time()) + ".csv"),
                    os.str());
    std::cerr << "smooth: " << smoothed.size() << " observations\n";
    return 0;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const EnsembleError*>(&e) || dynamic_cast<const FitFailureError*>(&e) ||
        dynamic_cast<const SearchFailureError*>(&e) || dynamic_cast<const DegenerateBasisError*>(&e) ||
        dynamic_cast<const JacobianError*>(&e)) {
        return 2;
    }
    if (dynamic_cast<const Error*>(&e)) return 1;
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return 1;
    return 2;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"log-periodic power law calibration toolkit"};
    app.require_subcommand(1);

    IoOpts fit_io, scan_io, smooth_io;
    OutOpts fit_out, scan_out, synth_out, smooth_out;
    FitOpts fit_fo, scan_fo;
    std::string t2_iso, center_iso;
    int n_t2 = 7;
    double t2_step_days = 7.0;
    SynthOpts so;

    CLI::App* fit = app.add_subcommand("fit", "fit a window ensemble at one end date t2");
    add_io_options(*fit, fit_io);
    add_out_options(*fit, fit_out);
    add_fit_options(*fit, fit_fo);
    fit->add_option("--t2", t2_iso, "window end date (ISO-8601)")->required();

    CLI::App* scan = app.add_subcommand("scan", "fit ensembles over a grid of end dates");
    add_io_options(*scan, scan_io);
    add_out_options(*scan, scan_out);
    add_fit_options(*scan, scan_fo);
    scan->add_option("--center", center_iso, "center of the t2 grid (ISO-8601)")->required();
    scan->add_option("--n-t2", n_t2, "number of t2 values")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    scan->add_option("--t2-step-days", t2_step_days, "t2 grid spacing")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic series with known truth");
    add_out_options(*synth, synth_out);
    {
        const SynthSpec d{};
        so.tc = iso_of(d.nl.tc);
        so.start = iso_of(d.start);
        so.end = iso_of(d.end);
        so.m = d.nl.m;
        so.omega = d.nl.omega;
        so.phi = d.nl.phi;
        so.A = d.lin.A;
        so.B = d.lin.B;
        so.C = d.lin.C;
    }
    synth->add_option("--tc", so.tc, "critical time (ISO-8601)")->capture_default_str();
    synth->add_option("--start", so.start, "first observation date")->capture_default_str();
    synth->add_option("--end", so.end, "last grid date")->capture_default_str();
    synth->add_option("--spacing-days", so.spacing_days, "observation spacing")
        ->capture_default_str();
    synth->add_option("--m", so.m, "power-law exponent")->capture_default_str();
    synth->add_option("--omega", so.omega, "log-periodic angular frequency")->capture_default_str();
    synth->add_option("--phi", so.phi, "oscillation phase")->capture_default_str();
    synth->add_option("--A", so.A, "level")->capture_default_str();
    synth->add_option("--B", so.B, "trend amplitude")->capture_default_str();
    synth->add_option("--C", so.C, "oscillation amplitude")->capture_default_str();
    synth->add_option("--noise-sigma", so.noise_sigma, "additive Gaussian noise sd")
        ->capture_default_str();
    synth->add_option("--seed", so.seed, "noise RNG seed")->capture_default_str();
    synth->add_flag("--literal-cos", so.literal_cos,
                    "use the cos(ln(omega*(tc-t)) + phi) oscillation form");

    CLI::App* smooth = app.add_subcommand("smooth", "emit the trailing moving average as CSV");
    add_io_options(*smooth, smooth_io);
    add_out_options(*smooth, smooth_out);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (fit->parsed()) {
            return cmd_fit(fit_io, fit_out, t2_iso, build_ensemble_config(*fit, fit_fo));
        }
        if (scan->parsed()) {
            return cmd_scan(scan_io, scan_out, center_iso, n_t2, t2_step_days,
                            build_ensemble_config(*scan, scan_fo));
        }
        if (synth->parsed()) return cmd_synth(synth_out, so);
        if (smooth->parsed()) return cmd_smooth(smooth_io, smooth_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 1;
}

int run(int argc, char** argv) {
    return run(std::vector<std::string>(argv + 1, argv + argc));
}

} // namespace lppl::cli
