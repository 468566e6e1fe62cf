#pragma once

#include "lppl/model.hpp"
#include "lppl/timeseries.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace lppl {

/// Box constraints of the 4-D search. m, omega and phi ranges are fixed;
/// the tc range is computed per window as [t2, t2 + 0.375*(t2 - t1)].
struct SearchBounds {
    std::array<double, 2> tc_range{0, 0};
    std::array<double, 2> m_range{0.001, 1.999};
    std::array<double, 2> omega_range{0.01, 40.0};
    std::array<double, 2> phi_range{0.001, 6.282185307179586}; // 2*pi - 0.001

    static SearchBounds for_window(const Window& w);

    /// Range for parameter index j in the fixed order (tc, m, omega, phi).
    const std::array<double, 2>& range(int j) const {
        switch (j) {
        case 0: return tc_range;
        case 1: return m_range;
        case 2: return omega_range;
        default: return phi_range;
        }
    }
    std::array<double, 2>& range(int j) {
        return const_cast<std::array<double, 2>&>(std::as_const(*this).range(j));
    }

    bool contains(const NonlinearParams& p) const;
    NonlinearParams clamp(const NonlinearParams& p) const;
};

/// Tabu-search knobs. The paper names the algorithm and the bounds; everything
/// here is an artifact decision, deterministic given the seed.
struct TabooConfig {
    int evals_per_region = 2000; // objective-evaluation budget per start region
    int regions = 3;             // independent start regions per search
    int tabu_len = 50;           // visited points remembered
    double tabu_radius = 1e-3;   // normalized per-coordinate match radius
    double step_init = 0.1;      // initial move size, normalized coordinates
    double step_floor = 1e-4;
    int halve_after = 5;         // consecutive non-improving bests before halving
    double distinct_sep = 0.01;  // min normalized separation between returned candidates
};

struct LmConfig {
    double lambda_init = 1e-3;
    double lambda_factor = 10.0; // multiply on rejection, divide on acceptance
    double tol_rel_ssr = 1e-10;  // stop when accepted relative improvement drops below
    double tol_step = 1e-10;     // stop when the (damped) step norm drops below
    int max_iters = 500;
    bool record_trace = false;   // keep accepted-step ssr values in FitResult::ssr_trace
    FdOptions fd{};
};

enum class Termination {
    RelTol,  // relative ssr improvement below tol_rel_ssr
    StepTol, // step norm below tol_step
    MaxIter, // iteration budget exhausted
};

/// One window's calibrated model plus diagnostics.
struct FitResult {
    Window window{};
    NonlinearParams nl{};
    LinearParams lin{};
    double ssr = 0;
    int n_obs = 0;
    bool converged = false; // true unless terminated by MaxIter
    Termination termination = Termination::MaxIter;
    std::uint64_t seed = 0; // RNG seed that produced this fit
    std::vector<double> ssr_trace; // accepted-step ssr values (when recorded)
};

struct FitConfig {
    TabooConfig taboo{};
    LmConfig lm{};
    int n_candidates = 10; // taboo estimates passed to local refinement
    std::uint64_t seed = 0;
    OscForm osc = OscForm::OmegaLogTau;
    /// Called after each successful local refinement inside fit_window,
    /// before the best result is selected. Observation only.
    std::function<void(const FitResult&)> on_refined;
};

/// Heuristic global search over the box. Deterministic given (data, bounds,
/// seed): returns the n_candidates best distinct points visited, objective
/// ascending. Points are distinct when they differ by at least
/// distinct_sep of the box size in some coordinate. Throws SearchFailureError
/// when every visited point is degenerate.
std::vector<NonlinearParams> taboo_search(const TimeSeries& data, const SearchBounds& bounds,
                                          std::uint64_t seed, int n_candidates,
                                          const TabooConfig& config = {},
                                          OscForm osc = OscForm::OmegaLogTau);

/// Damped Gauss-Newton on the slaved residual vector, trial steps projected
/// onto the bounds, accepted steps strictly decreasing in ssr. Throws
/// FitFailureError when the initial point cannot be evaluated.
FitResult levenberg_marquardt(const TimeSeries& data, const NonlinearParams& init,
                              const SearchBounds& bounds, const LmConfig& config = {},
                              OscForm osc = OscForm::OmegaLogTau);

/// Full single-window calibration: slices the window, derives the window seed,
/// runs taboo_search, refines every candidate with levenberg_marquardt and
/// returns the lowest-ssr result. Throws FitFailureError listing per-start
/// causes when no start survives.
FitResult fit_window(const TimeSeries& data, const Window& window, const FitConfig& config = {});

} // namespace lppl
