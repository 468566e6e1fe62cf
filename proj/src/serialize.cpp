#include "lppl/serialize.hpp"

#include "lppl/dates.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>

namespace lppl {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string iso_of(double decimal_year) {
    return format_iso_date(from_decimal_years(decimal_year));
}

std::string termination_name(Termination t) {
    switch (t) {
    case Termination::RelTol: return "rel_tol";
    case Termination::StepTol: return "step_tol";
    case Termination::MaxIter: return "max_iter";
    }
    return "unknown";
}

// NaN (band gaps) must serialize as null, not the literal "nan" JSON
// rejects on read-back.
nlohmann::ordered_json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

} // namespace

std::string format_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

nlohmann::ordered_json to_json(const FitResult& fit) {
    nlohmann::ordered_json j;
    j["t1"] = fit.window.t1;
    j["t2"] = fit.window.t2;
    j["tc"] = fit.nl.tc;
    j["m"] = fit.nl.m;
    j["omega"] = fit.nl.omega;
    j["phi"] = fit.nl.phi;
    j["A"] = fit.lin.A;
    j["B"] = fit.lin.B;
    j["C"] = fit.lin.C;
    j["ssr"] = fit.ssr;
    j["n_obs"] = fit.n_obs;
    j["converged"] = fit.converged;
    j["termination"] = termination_name(fit.termination);
    j["seed"] = fit.seed;
    return j;
}

nlohmann::ordered_json to_json(const EnsembleSummary& summary) {
    nlohmann::ordered_json j;
    j["t2"] = summary.t2;
    j["t2_date"] = iso_of(summary.t2);
    j["n_windows"] = summary.n_windows;
    j["n_failed"] = summary.n_failed;
    j["n_filtered"] = summary.n_filtered;
    j["n_fits"] = summary.fits.size();

    auto& fits = j["fits"] = nlohmann::ordered_json::array();
    for (const auto& fit : summary.fits) fits.push_back(to_json(fit));

    auto& failures = j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : summary.failures) {
        failures.push_back({{"t1", f.window.t1}, {"t2", f.window.t2}, {"reason", f.reason}});
    }

    auto& quantiles = j["tc_quantiles"] = nlohmann::ordered_json::object();
    for (const auto& [p, q] : summary.tc_quantiles) quantiles[format_prob(p)] = q;

    auto& density = j["density"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < summary.density.grid.size(); ++i) {
        density.push_back({summary.density.grid[i], summary.density.density[i]});
    }
    j["density_bandwidth"] = summary.density.bandwidth;
    j["density_point_mass"] =
        summary.density.point_mass ? num_or_null(summary.density.point_mass_at) : nlohmann::ordered_json(nullptr);

    auto& band = j["extrapolation"] = nlohmann::ordered_json::array();
    for (const auto& pt : summary.extrapolation) {
        band.push_back({{"t", pt.t},
                        {"n_fits", pt.n_fits},
                        {"q05", num_or_null(pt.q[0])},
                        {"q20", num_or_null(pt.q[1])},
                        {"q80", num_or_null(pt.q[2])},
                        {"q95", num_or_null(pt.q[3])}});
    }
    return j;
}

nlohmann::ordered_json to_json(const SynthSpec& spec) {
    nlohmann::ordered_json j;
    j["tc"] = spec.nl.tc;
    j["m"] = spec.nl.m;
    j["omega"] = spec.nl.omega;
    j["phi"] = spec.nl.phi;
    j["A"] = spec.lin.A;
    j["B"] = spec.lin.B;
    j["C"] = spec.lin.C;
    j["start"] = spec.start;
    j["end"] = spec.end;
    j["spacing"] = spec.spacing;
    j["noise_sigma"] = spec.noise_sigma;
    j["seed"] = spec.seed;
    j["osc_form"] = spec.osc == OscForm::LogOmegaTau ? "literal" : "standard";
    return j;
}

nlohmann::ordered_json to_json(const ScanResult& scan) {
    nlohmann::ordered_json j;
    j["t2s"] = scan.stability.t2s;
    j["n_failed"] = scan.n_failed;

    auto& entries = j["entries"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < scan.entries.size(); ++i) {
        const auto& entry = scan.entries[i];
        nlohmann::ordered_json e;
        e["t2"] = entry.t2;
        e["t2_date"] = iso_of(entry.t2);
        e["mode"] = num_or_null(scan.stability.modes[i]);
        e["failed"] = entry.failed;
        if (entry.failed) {
            e["reason"] = entry.reason;
        } else {
            const auto& s = entry.summary;
            e["n_windows"] = s.n_windows;
            e["n_failed"] = s.n_failed;
            e["n_fits"] = s.fits.size();
            e["tc_median"] = s.tc_quantiles.count(0.5) ? num_or_null(s.tc_quantiles.at(0.5))
                                                       : nlohmann::ordered_json(nullptr);
        }
        entries.push_back(std::move(e));
    }

    auto& drift = j["mode_drift"] = nlohmann::ordered_json::array();
    for (double d : scan.stability.mode_drift) drift.push_back(num_or_null(d));
    j["early_mode_range"] = num_or_null(scan.stability.early_mode_range);
    return j;
}

void write_fits_csv(std::ostream& out, const EnsembleSummary& summary) {
    out << "t1,t2,tc,m,omega,phi,A,B,C,ssr,n_obs,converged,seed\n";
    for (const auto& fit : summary.fits) {
        out << fmt_double(fit.window.t1) << ',' << fmt_double(fit.window.t2) << ','
            << fmt_double(fit.nl.tc) << ',' << fmt_double(fit.nl.m) << ','
            << fmt_double(fit.nl.omega) << ',' << fmt_double(fit.nl.phi) << ','
            << fmt_double(fit.lin.A) << ',' << fmt_double(fit.lin.B) << ','
            << fmt_double(fit.lin.C) << ',' << fmt_double(fit.ssr) << ','
            << fit.n_obs << ',' << (fit.converged ? 1 : 0) << ',' << fit.seed << '\n';
    }
}

void write_extrapolation_csv(std::ostream& out, const EnsembleSummary& summary) {
    out << "t,n_fits,q05,q20,q80,q95\n";
    for (const auto& pt : summary.extrapolation) {
        out << fmt_double(pt.t) << ',' << pt.n_fits;
        for (double q : pt.q) {
            out << ',';
            if (!std::isnan(q)) out << fmt_double(q);
        }
        out << '\n';
    }
}

void write_density_csv(std::ostream& out, const EnsembleSummary& summary) {
    out << "tc,density\n";
    for (std::size_t i = 0; i < summary.density.grid.size(); ++i) {
        out << fmt_double(summary.density.grid[i]) << ','
            << fmt_double(summary.density.density[i]) << '\n';
    }
}

void write_stability_csv(std::ostream& out, const ScanResult& scan) {
    out << "t2,mode,failed\n";
    for (std::size_t i = 0; i < scan.entries.size(); ++i) {
        out << fmt_double(scan.entries[i].t2) << ',';
        if (!scan.entries[i].failed) out << fmt_double(scan.stability.modes[i]);
        out << ',' << (scan.entries[i].failed ? 1 : 0) << '\n';
    }
}

} // namespace lppl
