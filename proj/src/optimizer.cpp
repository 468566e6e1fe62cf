#include "lppl/optimizer.hpp"

#include "lppl/errors.hpp"
#include "lppl/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <sstream>

namespace lppl {

SearchBounds SearchBounds::for_window(const Window& w) {
    if (!(w.t1 < w.t2))
        throw ValidationError("window start must precede its end");
    SearchBounds b;
    b.tc_range = {w.t2, w.t2 + 0.375 * (w.t2 - w.t1)};
    return b;
}

bool SearchBounds::contains(const NonlinearParams& p) const {
    const double v[4] = {p.tc, p.m, p.omega, p.phi};
    for (int j = 0; j < 4; ++j)
        if (v[j] < range(j)[0] || v[j] > range(j)[1])
            return false;
    return true;
}

NonlinearParams SearchBounds::clamp(const NonlinearParams& p) const {
    NonlinearParams out = p;
    out.tc = std::clamp(p.tc, tc_range[0], tc_range[1]);
    out.m = std::clamp(p.m, m_range[0], m_range[1]);
    out.omega = std::clamp(p.omega, omega_range[0], omega_range[1]);
    out.phi = std::clamp(p.phi, phi_range[0], phi_range[1]);
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Point = std::array<double, 4>; // normalized coordinates in [0,1]^4

NonlinearParams denormalize(const Point& u, const SearchBounds& b) {
    NonlinearParams p;
    double* out[4] = {&p.tc, &p.m, &p.omega, &p.phi};
    for (int j = 0; j < 4; ++j) {
        const auto [lo, hi] = b.range(j);
        *out[j] = lo + u[j] * (hi - lo);
    }
    return p;
}

bool within_radius(const Point& a, const Point& b, double radius) {
    for (int j = 0; j < 4; ++j)
        if (std::abs(a[j] - b[j]) > radius)
            return false;
    return true;
}

struct Visit {
    Point u;
    double value;
};

// Objective wrapper: degenerate or out-of-domain points count as infeasible.
double probe(const TimeSeries& data, const SearchBounds& b, const Point& u, OscForm osc) {
    try {
        const double v = objective(denormalize(u, b), data, osc);
        return std::isfinite(v) ? v : kInf;
    } catch (const Error&) {
        return kInf;
    }
}

// Start regions come from a shifted R2 low-discrepancy sequence: frac(shift +
// k * alpha) with alpha derived from the root of x^5 = x + 1, shift seeded.
Point ld_start(int k, const Point& shift) {
    constexpr double root = 1.1673039782614187; // x^5 = x + 1
    Point alpha{};
    double a = 1.0;
    for (int j = 0; j < 4; ++j) {
        a /= root;
        alpha[j] = a;
    }
    Point u{};
    for (int j = 0; j < 4; ++j) {
        double v = shift[j] + (k + 1) * alpha[j];
        u[j] = v - std::floor(v);
    }
    return u;
}

} // namespace

std::vector<NonlinearParams> taboo_search(const TimeSeries& data, const SearchBounds& bounds,
                                          std::uint64_t seed, int n_candidates,
                                          const TabooConfig& config, OscForm osc) {
    if (n_candidates < 1)
        throw ConfigError("n_candidates must be at least 1");

    rng::Engine eng(seed);
    Point shift{};
    for (int j = 0; j < 4; ++j)
        shift[j] = rng::uniform01(eng);

    std::vector<Visit> pool; // every evaluated point, feasible or not
    pool.reserve(static_cast<std::size_t>(config.regions) *
                 static_cast<std::size_t>(config.evals_per_region));

    double global_best = kInf;

    for (int region = 0; region < config.regions; ++region) {
        int evals = 0;
        const auto evaluate = [&](const Point& u) {
            ++evals;
            const double v = probe(data, bounds, u, osc);
            pool.push_back({u, v});
            return v;
        };

        Point current = ld_start(region, shift);
        double current_value = evaluate(current);
        double region_best = current_value;
        global_best = std::min(global_best, current_value);

        std::deque<Point> tabu{current};
        double step = config.step_init;
        int stale = 0; // consecutive iterations without a new region best

        while (evals < config.evals_per_region) {
            int best_move = -1;
            double best_value = kInf;
            Point best_dest{};
            for (int mv = 0; mv < 8 && evals < config.evals_per_region; ++mv) {
                const int dim = mv / 2;
                const double dir = (mv % 2 == 0) ? 1.0 : -1.0;
                Point dest = current;
                dest[dim] = std::clamp(dest[dim] + dir * step, 0.0, 1.0);
                if (dest[dim] == current[dim])
                    continue; // clamped against the wall, null move
                const bool is_tabu = std::any_of(
                    tabu.begin(), tabu.end(),
                    [&](const Point& t) { return within_radius(dest, t, config.tabu_radius); });
                const double v = evaluate(dest);
                // aspiration: a tabu move stands if it beats the global best
                if (is_tabu && !(v < global_best))
                    continue;
                if (v < best_value) {
                    best_value = v;
                    best_move = mv;
                    best_dest = dest;
                }
            }

            if (best_move < 0) {
                // every neighbor tabu or degenerate: restart within the region
                Point fresh{};
                for (int j = 0; j < 4; ++j)
                    fresh[j] = rng::uniform01(eng);
                current = fresh;
                current_value = evaluate(current);
            } else {
                current = best_dest;
                current_value = best_value;
            }

            tabu.push_back(current);
            while (tabu.size() > static_cast<std::size_t>(config.tabu_len))
                tabu.pop_front();

            if (current_value < region_best) {
                region_best = current_value;
                stale = 0;
            } else if (++stale >= config.halve_after) {
                step = std::max(step * 0.5, config.step_floor);
                stale = 0;
            }
            global_best = std::min(global_best, current_value);
        }
    }

    std::stable_sort(pool.begin(), pool.end(),
                     [](const Visit& a, const Visit& b) { return a.value < b.value; });

    std::vector<Point> chosen;
    std::vector<NonlinearParams> out;
    for (const Visit& v : pool) {
        if (!std::isfinite(v.value))
            break; // sorted: only infeasible points remain
        const bool duplicate = std::any_of(chosen.begin(), chosen.end(), [&](const Point& c) {
            return within_radius(v.u, c, config.distinct_sep);
        });
        if (duplicate)
            continue;
        chosen.push_back(v.u);
        out.push_back(denormalize(v.u, bounds));
        if (static_cast<int>(out.size()) == n_candidates)
            break;
    }
    if (out.empty())
        throw SearchFailureError("every point visited by the heuristic search was degenerate");
    return out;
}

namespace {

Eigen::Vector4d as_vector(const NonlinearParams& p) {
    return {p.tc, p.m, p.omega, p.phi};
}

NonlinearParams from_vector(const Eigen::Vector4d& v) {
    return NonlinearParams{v(0), v(1), v(2), v(3)};
}

// Step size measured on magnitude-scaled parameters, so the years-scale tc
// does not drown m, omega, phi.
double scaled_norm(const Eigen::Vector4d& step, const Eigen::Vector4d& at) {
    double s = 0;
    for (int j = 0; j < 4; ++j) {
        const double d = step(j) / std::max(1.0, std::abs(at(j)));
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

FitResult levenberg_marquardt(const TimeSeries& data, const NonlinearParams& init,
                              const SearchBounds& bounds, const LmConfig& config, OscForm osc) {
    constexpr double kLambdaMax = 1e15;

    NonlinearParams p = init;
    ResidualEval eval;
    try {
        eval = slaved_residuals(p, data, osc);
    } catch (const Error& e) {
        throw FitFailureError("initial point cannot be evaluated: " + std::string(e.what()));
    }

    FitResult result;
    result.window = Window{data.first_time(), data.last_time()};
    result.n_obs = static_cast<int>(data.size());
    if (config.record_trace)
        result.ssr_trace.push_back(eval.ssr);

    double lambda = config.lambda_init;
    Termination reason = Termination::MaxIter;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        Eigen::MatrixXd jac;
        try {
            jac = residual_jacobian(p, data, &bounds, config.fd, osc);
        } catch (const Error&) {
            reason = Termination::StepTol; // cannot form a search direction here
            break;
        }
        const Eigen::Map<const Eigen::VectorXd> r(eval.residuals.data(),
                                                  static_cast<Eigen::Index>(eval.residuals.size()));
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Vector4d grad = jac.transpose() * r; // gradient of ssr/2
        Eigen::Vector4d damp = jtj.diagonal();
        const double damp_floor = std::max(1e-12 * damp.maxCoeff(), 1e-30);
        damp = damp.cwiseMax(damp_floor);

        bool accepted = false;
        while (lambda <= kLambdaMax) {
            const Eigen::Matrix4d lhs =
                jtj + lambda * Eigen::Matrix4d(damp.asDiagonal());
            const Eigen::Vector4d delta = lhs.ldlt().solve(-grad);
            if (!delta.allFinite()) {
                lambda *= config.lambda_factor;
                continue;
            }
            const Eigen::Vector4d at = as_vector(p);
            const NonlinearParams trial = bounds.clamp(from_vector(at + delta));
            const Eigen::Vector4d projected = as_vector(trial) - at;
            if (scaled_norm(projected, at) < config.tol_step) {
                reason = Termination::StepTol;
                break;
            }
            std::optional<ResidualEval> trial_eval;
            try {
                trial_eval = slaved_residuals(trial, data, osc);
            } catch (const Error&) {
                trial_eval.reset();
            }
            if (trial_eval && trial_eval->ssr < eval.ssr) {
                const double rel_improve = (eval.ssr - trial_eval->ssr) / eval.ssr;
                p = trial;
                eval = std::move(*trial_eval);
                lambda = std::max(lambda / config.lambda_factor, 1e-12);
                if (config.record_trace)
                    result.ssr_trace.push_back(eval.ssr);
                accepted = true;
                if (rel_improve < config.tol_rel_ssr)
                    reason = Termination::RelTol;
                break;
            }
            lambda *= config.lambda_factor;
        }
        if (!accepted && reason == Termination::MaxIter)
            reason = Termination::StepTol; // damping saturated without a usable step
        if (!accepted || reason != Termination::MaxIter)
            break;
        if (eval.ssr == 0.0) { // exact interpolation, nothing left to improve
            reason = Termination::RelTol;
            break;
        }
    }

    result.nl = p;
    result.lin = eval.lin;
    result.ssr = eval.ssr;
    result.termination = reason;
    result.converged = reason != Termination::MaxIter;
    return result;
}

FitResult fit_window(const TimeSeries& data, const Window& window, const FitConfig& config) {
    const TimeSeries data_w = slice(data, window);
    const SearchBounds bounds = SearchBounds::for_window(window);
    const std::uint64_t window_seed = rng::derive_seed(config.seed, window.t1, window.t2);

    std::vector<NonlinearParams> candidates;
    try {
        candidates = taboo_search(data_w, bounds, window_seed, config.n_candidates,
                                  config.taboo, config.osc);
    } catch (const Error& e) {
        throw FitFailureError("heuristic search failed: " + std::string(e.what()));
    }

    std::optional<FitResult> best;
    std::ostringstream causes;
    int n_failed = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        try {
            FitResult fr = levenberg_marquardt(data_w, candidates[k], bounds, config.lm,
                                               config.osc);
            fr.window = window;
            fr.seed = window_seed;
            if (config.on_refined)
                config.on_refined(fr);
            if (!best || fr.ssr < best->ssr)
                best = std::move(fr);
        } catch (const Error& e) {
            ++n_failed;
            causes << "\n  start " << k << ": " << e.what();
        }
    }
    if (!best)
        throw FitFailureError("all " + std::to_string(n_failed) +
                              " starts failed:" + causes.str());
    return *best;
}

} // namespace lppl
