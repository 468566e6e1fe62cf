#include "lppl/serialize.hpp"

#include <doctest.h>

#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace lppl;
using nlohmann::ordered_json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

FitResult sample_fit() {
    FitResult fr;
    fr.window = {2007.0, 2008.1174863387978};
    fr.nl = {2008.2999999999997, 0.5, 8.0, 1.0};
    fr.lin = {10.0, -3.0, 0.3};
    fr.ssr = 1.25e-5;
    fr.n_obs = 59;
    fr.converged = true;
    fr.termination = Termination::RelTol;
    fr.seed = 123456789;
    return fr;
}

EnsembleSummary sample_summary() {
    EnsembleSummary s;
    s.t2 = 2008.1174863387978;
    s.fits = {sample_fit()};
    s.failures.push_back({{2006.5, s.t2}, "search failed"});
    s.n_windows = 2;
    s.n_failed = 1;
    s.n_filtered = 0;
    s.tc_quantiles = {{0.05, 2008.21}, {0.2, 2008.25}, {0.5, 2008.3},
                      {0.8, 2008.34}, {0.95, 2008.38}};
    s.density.grid = {2008.2, 2008.3, 2008.4};
    s.density.density = {1.0, 8.0, 1.0};
    s.density.bandwidth = 0.02;
    s.extrapolation = {{2008.15, 1, {9.0, 9.1, 9.2, 9.3}},
                       {2008.45, 0, {kNan, kNan, kNan, kNan}}};
    return s;
}

std::vector<std::string> keys_of(const ordered_json& j) {
    std::vector<std::string> out;
    for (const auto& item : j.items()) out.push_back(item.key());
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("probability keys use the shortest decimal form") {
    CHECK(format_prob(0.05) == "0.05");
    CHECK(format_prob(0.2) == "0.2");
    CHECK(format_prob(0.5) == "0.5");
    CHECK(format_prob(0.95) == "0.95");
    CHECK(format_prob(1.0) == "1");
}

TEST_CASE("fit JSON carries every field in a fixed key order") {
    const FitResult fr = sample_fit();
    const ordered_json j = to_json(fr);
    const std::vector<std::string> expected = {"t1",  "t2",  "tc",    "m",
                                               "omega", "phi", "A",   "B",
                                               "C",   "ssr", "n_obs", "converged",
                                               "termination", "seed"};
    CHECK(keys_of(j) == expected);
    CHECK(j["tc"].get<double>() == fr.nl.tc);
    CHECK(j["B"].get<double>() == fr.lin.B);
    CHECK(j["converged"].get<bool>());
    CHECK(j["termination"].get<std::string>() == "rel_tol");
    CHECK(j["seed"].get<std::uint64_t>() == fr.seed);

    FitResult other = fr;
    other.termination = Termination::StepTol;
    CHECK(to_json(other)["termination"].get<std::string>() == "step_tol");
    other.termination = Termination::MaxIter;
    other.converged = false;
    CHECK(to_json(other)["termination"].get<std::string>() == "max_iter");
    CHECK_FALSE(to_json(other)["converged"].get<bool>());
}

TEST_CASE("fit JSON round-trips doubles exactly through text") {
    const ordered_json j = to_json(sample_fit());
    const auto parsed = nlohmann::json::parse(j.dump());
    CHECK(parsed["tc"].get<double>() == 2008.2999999999997);
    CHECK(parsed["t2"].get<double>() == 2008.1174863387978);
    CHECK(parsed["ssr"].get<double>() == 1.25e-5);
}

TEST_CASE("ensemble JSON: schema, counters and null band gaps") {
    const EnsembleSummary s = sample_summary();
    const ordered_json j = to_json(s);

    const std::vector<std::string> expected = {
        "t2",      "t2_date",  "n_windows",    "n_failed",
        "n_filtered", "n_fits", "fits",        "failures",
        "tc_quantiles", "density", "density_bandwidth",
        "density_point_mass", "extrapolation"};
    CHECK(keys_of(j) == expected);

    CHECK(j["t2_date"].get<std::string>() == "2008-02-13");
    CHECK(j["n_fits"].get<int>() == 1);
    CHECK(j["fits"].size() == 1);
    CHECK(j["fits"][0] == to_json(s.fits[0]));
    CHECK(j["failures"][0]["reason"].get<std::string>() == "search failed");
    CHECK(j["failures"][0]["t1"].get<double>() == 2006.5);

    const auto qkeys = keys_of(j["tc_quantiles"]);
    CHECK(qkeys == std::vector<std::string>{"0.05", "0.2", "0.5", "0.8", "0.95"});
    CHECK(j["tc_quantiles"]["0.5"].get<double>() == 2008.3);

    CHECK(j["density"].size() == 3);
    CHECK(j["density"][1][0].get<double>() == 2008.3);
    CHECK(j["density"][1][1].get<double>() == 8.0);
    CHECK(j["density_point_mass"].is_null());

    REQUIRE(j["extrapolation"].size() == 2);
    CHECK(j["extrapolation"][0]["n_fits"].get<int>() == 1);
    CHECK(j["extrapolation"][0]["q05"].get<double>() == 9.0);
    CHECK(j["extrapolation"][1]["n_fits"].get<int>() == 0);
    CHECK(j["extrapolation"][1]["q05"].is_null());
    CHECK(j["extrapolation"][1]["q95"].is_null());

    // the dump must be valid JSON despite the NaN quantiles
    CHECK_NOTHROW((void)nlohmann::json::parse(j.dump(2)));
}

TEST_CASE("a point-mass density records its location") {
    EnsembleSummary s = sample_summary();
    s.density.point_mass = true;
    s.density.point_mass_at = 2008.3;
    const ordered_json j = to_json(s);
    CHECK(j["density_point_mass"].get<double>() == 2008.3);
}

TEST_CASE("synth spec JSON names the oscillation form") {
    SynthSpec spec;
    ordered_json j = to_json(spec);
    CHECK(j["tc"].get<double>() == spec.nl.tc);
    CHECK(j["osc_form"].get<std::string>() == "standard");
    CHECK(j["seed"].get<std::uint64_t>() == spec.seed);
    spec.osc = OscForm::LogOmegaTau;
    CHECK(to_json(spec)["osc_form"].get<std::string>() == "literal");
}

TEST_CASE("scan JSON mirrors entries and drift, with nulls for failures") {
    ScanResult scan;
    ScanEntry ok;
    ok.t2 = 2008.1174863387978;
    ok.summary = sample_summary();
    ScanEntry bad;
    bad.t2 = 2008.14;
    bad.failed = true;
    bad.reason = "t2 outside data support";
    scan.entries = {ok, bad};
    scan.n_failed = 1;
    scan.stability.t2s = {ok.t2, bad.t2};
    scan.stability.modes = {2008.3, kNan};
    scan.stability.mode_drift = {};
    scan.stability.early_mode_range = 0.0;

    const ordered_json j = to_json(scan);
    CHECK(keys_of(j) ==
          std::vector<std::string>{"t2s", "n_failed", "entries", "mode_drift",
                                   "early_mode_range"});
    CHECK(j["n_failed"].get<int>() == 1);
    REQUIRE(j["entries"].size() == 2);
    CHECK(j["entries"][0]["mode"].get<double>() == 2008.3);
    CHECK(j["entries"][0]["tc_median"].get<double>() == 2008.3);
    CHECK(j["entries"][0]["n_fits"].get<int>() == 1);
    CHECK_FALSE(j["entries"][0].contains("reason"));
    CHECK(j["entries"][1]["failed"].get<bool>());
    CHECK(j["entries"][1]["mode"].is_null());
    CHECK(j["entries"][1]["reason"].get<std::string>() == "t2 outside data support");
    CHECK_FALSE(j["entries"][1].contains("n_fits"));
    CHECK(j["mode_drift"].empty());
    CHECK_NOTHROW((void)nlohmann::json::parse(j.dump(2)));
}

TEST_CASE("fits CSV: header, one row per fit, %.17g round trip") {
    const EnsembleSummary s = sample_summary();
    std::ostringstream out;
    write_fits_csv(out, s);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "t1,t2,tc,m,omega,phi,A,B,C,ssr,n_obs,converged,seed");

    std::istringstream row(lines[1]);
    std::vector<std::string> cells;
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    REQUIRE(cells.size() == 13);
    CHECK(std::strtod(cells[2].c_str(), nullptr) == s.fits[0].nl.tc);
    CHECK(std::strtod(cells[1].c_str(), nullptr) == s.t2);
    CHECK(cells[10] == "59");
    CHECK(cells[11] == "1");
    CHECK(cells[12] == "123456789");
}

TEST_CASE("extrapolation CSV leaves gap quantiles empty") {
    std::ostringstream out;
    write_extrapolation_csv(out, sample_summary());
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "t,n_fits,q05,q20,q80,q95");
    CHECK(lines[1].find(",1,") != std::string::npos);
    const std::string& gap = lines[2];
    CHECK(gap.substr(gap.size() - 6) == ",0,,,,");
}

TEST_CASE("density CSV pairs grid with density") {
    std::ostringstream out;
    write_density_csv(out, sample_summary());
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "tc,density");
    CHECK(lines[2] == "2008.3,8");
}

TEST_CASE("stability CSV marks failed scan points") {
    ScanResult scan;
    ScanEntry ok;
    ok.t2 = 2008.0;
    ScanEntry bad;
    bad.t2 = 2008.1;
    bad.failed = true;
    scan.entries = {ok, bad};
    scan.stability.modes = {2008.25, kNan};
    std::ostringstream out;
    write_stability_csv(out, scan);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "t2,mode,failed");
    CHECK(lines[1] == "2008,2008.25,0");
    CHECK(lines[2] == "2008.0999999999999,,1");
}

TEST_CASE("CSV text is identical across repeated serialization") {
    const EnsembleSummary s = sample_summary();
    std::ostringstream a, b;
    write_fits_csv(a, s);
    write_fits_csv(b, s);
    CHECK(a.str() == b.str());
}
