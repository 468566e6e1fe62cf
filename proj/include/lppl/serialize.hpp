#pragma once

#include "lppl/ensemble.hpp"
#include "lppl/optimizer.hpp"
#include "lppl/synth.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

namespace lppl {

/// JSON and CSV emitters for the documented output schemas. All formatting is
/// deterministic: object keys are ordered, doubles use shortest round-trip
/// (JSON) or %.17g (CSV), and nothing environment-dependent is written.

std::string format_prob(double p); // quantile-map key, "%g"

nlohmann::ordered_json to_json(const FitResult& fit);
nlohmann::ordered_json to_json(const EnsembleSummary& summary);
nlohmann::ordered_json to_json(const SynthSpec& spec);
/// Stability report of a t2 scan.
nlohmann::ordered_json to_json(const ScanResult& scan);

void write_fits_csv(std::ostream& out, const EnsembleSummary& summary);
void write_extrapolation_csv(std::ostream& out, const EnsembleSummary& summary);
void write_density_csv(std::ostream& out, const EnsembleSummary& summary);
void write_stability_csv(std::ostream& out, const ScanResult& scan);

} // namespace lppl
