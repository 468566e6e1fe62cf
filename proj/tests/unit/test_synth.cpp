#include "lppl/synth.hpp"
#include "lppl/errors.hpp"
#include "lppl/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace lppl;

TEST_CASE("generated length is floor((end - start)/spacing) + 1") {
    SynthSpec spec; // defaults: weekly points on [2006.0, 2008.2]
    CHECK(generate(spec).size() ==
          static_cast<std::size_t>(std::floor((spec.end - spec.start) / spec.spacing)) + 1);

    spec.spacing = 1.0 / 365.25;
    CHECK(generate(spec).size() ==
          static_cast<std::size_t>(std::floor((spec.end - spec.start) / spec.spacing)) + 1);

    // dyadic spacing so the division is exact
    spec.start = 2008.0;
    spec.end = 2008.25;
    spec.spacing = 0.125;
    CHECK(generate(spec).size() == 3);
}

TEST_CASE("noiseless generation equals the model point for point") {
    SynthSpec spec;
    spec.noise_sigma = 0.0;
    const TimeSeries s = generate(spec);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(s.values[i] == lppl_value(spec.nl, spec.lin, s.times[i]));
    CHECK(s.times.front() == spec.start);
    CHECK(objective(spec.nl, s) <= 1e-18);
}

TEST_CASE("the literal-cos flag changes the generated values") {
    SynthSpec standard;
    SynthSpec literal;
    literal.osc = OscForm::LogOmegaTau;
    const TimeSeries a = generate(standard);
    const TimeSeries b = generate(literal);
    bool any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b.values[i] == lppl_value(literal.nl, literal.lin, b.times[i],
                                        OscForm::LogOmegaTau));
        any_different = any_different || a.values[i] != b.values[i];
    }
    CHECK(any_different);
}

TEST_CASE("generation is deterministic in the seed") {
    SynthSpec spec;
    spec.noise_sigma = 0.3;
    spec.seed = 77;
    const TimeSeries a = generate(spec);
    const TimeSeries b = generate(spec);
    CHECK(a.values == b.values);
    spec.seed = 78;
    const TimeSeries c = generate(spec);
    CHECK(a.values != c.values);
}

TEST_CASE("noise has the requested standard deviation") {
    SynthSpec spec;
    spec.start = 1800.0; // long span for a large sample
    spec.end = 2000.0;
    spec.nl.tc = 2000.5;
    spec.spacing = 1.0 / 52.0;
    spec.noise_sigma = 0.25;
    spec.seed = 5;
    const TimeSeries noisy = generate(spec);
    SynthSpec clean = spec;
    clean.noise_sigma = 0.0;
    const TimeSeries base = generate(clean);
    REQUIRE(noisy.size() == base.size());
    double m2 = 0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        const double d = noisy.values[i] - base.values[i];
        m2 += d * d;
    }
    const double sd = std::sqrt(m2 / static_cast<double>(noisy.size()));
    CHECK(std::abs(sd - spec.noise_sigma) / spec.noise_sigma < 0.03);
}

TEST_CASE("spec validation rejects impossible geometry") {
    SynthSpec spec;
    spec.noise_sigma = -0.1;
    CHECK_THROWS_AS(generate(spec), ValidationError);

    spec = SynthSpec{};
    spec.start = spec.end;
    CHECK_THROWS_AS(generate(spec), ValidationError);

    spec = SynthSpec{};
    spec.end = spec.nl.tc; // grid would touch the singularity
    CHECK_THROWS_AS(generate(spec), ValidationError);

    spec = SynthSpec{};
    spec.spacing = 0.0;
    CHECK_THROWS_AS(generate(spec), ValidationError);
}
