#include "lppl/synth.hpp"

#include "lppl/errors.hpp"
#include "lppl/rng.hpp"

#include <cmath>
#include <string>

namespace lppl {

void SynthSpec::validate() const {
    if (!(start < end))
        throw ValidationError("synth spec: start must precede end");
    if (!(end < nl.tc))
        throw ValidationError("synth spec: end must lie strictly before tc");
    if (!(spacing > 0))
        throw ValidationError("synth spec: spacing must be positive");
    if (!(noise_sigma >= 0))
        throw ValidationError("synth spec: noise_sigma must be nonnegative");
}

TimeSeries generate(const SynthSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(std::floor((spec.end - spec.start) / spec.spacing)) + 1;
    TimeSeries out;
    out.label = "synthetic";
    out.times.reserve(n);
    out.values.reserve(n);
    rng::Engine eng(spec.seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = spec.start + static_cast<double>(i) * spec.spacing;
        double v = lppl_value(spec.nl, spec.lin, t, spec.osc);
        if (spec.noise_sigma > 0)
            v += spec.noise_sigma * rng::normal(eng);
        out.times.push_back(t);
        out.values.push_back(v);
    }
    out.validate();
    return out;
}

} // namespace lppl
