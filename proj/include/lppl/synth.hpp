#pragma once

#include "lppl/ensemble.hpp"
#include "lppl/model.hpp"
#include "lppl/timeseries.hpp"

#include <cstdint>

namespace lppl {

/// Ground-truth recipe for a synthetic series: exact model samples on a
/// uniform grid plus seeded Gaussian noise. Exists so every calibration claim
/// can be checked against known parameters.
struct SynthSpec {
    NonlinearParams nl{2008.3, 0.5, 8.0, 1.0}; // representative mid-box defaults
    LinearParams lin{10.0, -3.0, 0.3};
    double start = 2006.0;
    double end = 2008.2;                // must stay below nl.tc
    double spacing = 7 * kYearsPerDay;  // weekly
    double noise_sigma = 0;             // series units
    std::uint64_t seed = 0;
    OscForm osc = OscForm::OmegaLogTau;

    void validate() const; // throws ValidationError
};

/// Generated length is floor((end - start)/spacing) + 1; the spec itself is
/// the ground-truth record for the output.
TimeSeries generate(const SynthSpec& spec);

} // namespace lppl
