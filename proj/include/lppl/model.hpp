#pragma once

#include "lppl/timeseries.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace lppl {

struct SearchBounds; // optimizer.hpp

/// The four searched parameters. The model core places no box constraints on
/// them (only tc > t is required to evaluate); the search box of the optimizer
/// is enforced there, never here, so properties like phase periodicity can be
/// probed directly on the model.
struct NonlinearParams {
    double tc = 0;    // critical time, decimal years
    double m = 0.5;   // power-law exponent
    double omega = 0; // log-frequency
    double phi = 0;   // phase, radians
};

/// The three parameters that enter linearly and are eliminated analytically.
struct LinearParams {
    double A = 0; // series units
    double B = 0; // series units per year^m
    double C = 0; // series units per year^m
};

/// Oscillation argument of the cosine term.
///   OmegaLogTau: cos(omega * ln(tc - t) + phi)   -- the standard JLS form (default)
///   LogOmegaTau: cos(ln(omega * (tc - t)) + phi) -- selectable for comparison
/// via the literal-cos switch, where the log-frequency is effectively fixed.
enum class OscForm {
    OmegaLogTau,
    LogOmegaTau,
};

/// A + B*tau^m + C*tau^m*cos(...) with tau = tc - t. Throws DomainError for t >= tc.
double lppl_value(const NonlinearParams& nl, const LinearParams& lin, double t,
                  OscForm osc = OscForm::OmegaLogTau);

struct SlaveResult {
    LinearParams lin;
    /// Condition estimate of the 3-column design matrix (square root of the
    /// normal-matrix eigenvalue ratio).
    double condition = 0;
};

/// Degeneracy threshold on the 3x3 normal matrix: points whose normal-matrix
/// condition exceeds this are declared degenerate and rejected by the search.
inline constexpr double kNormalConditionLimit = 1e12;

/// Exact least-squares minimizer over (A, B, C) with the nonlinear parameters
/// held fixed: solves the 3x3 normal equations built from the basis
/// {1, tau^m, tau^m*cos(...)} by spectral (rank-revealing) factorization.
/// Throws DegenerateBasisError when the normal matrix condition exceeds
/// kNormalConditionLimit, DomainError when any observation has t >= tc,
/// InsufficientDataError for fewer than kMinWindowObs points.
SlaveResult slave_linear(const NonlinearParams& nl, const TimeSeries& data,
                         OscForm osc = OscForm::OmegaLogTau);

struct ResidualEval {
    std::vector<double> residuals; // data_i - model_i, in data order
    LinearParams lin;
    double condition = 0;
    double ssr = 0;
};

/// Slaves (A, B, C), then evaluates the residual vector and its sum of squares.
ResidualEval slaved_residuals(const NonlinearParams& nl, const TimeSeries& data,
                              OscForm osc = OscForm::OmegaLogTau);

/// Sum of squared residuals after slaving. Same error behavior as slave_linear;
/// the heuristic search catches DegenerateBasisError and treats the point as
/// infeasible rather than folding it into a sentinel value.
double objective(const NonlinearParams& nl, const TimeSeries& data,
                 OscForm osc = OscForm::OmegaLogTau);

struct FdOptions {
    double rel_step = 1e-6;  // per-parameter step, scaled by parameter magnitude
    double abs_floor = 1e-8; // step floor for near-zero parameters
};

/// Central finite-difference Jacobian of the slaved residual vector with
/// respect to (tc, m, omega, phi), one column per parameter in that order.
/// Slaving is recomputed at every perturbed point (full variable-projection
/// differentiation). A perturbation that leaves `box` (when given) or fails to
/// evaluate falls back to a one-sided difference; if both sides are infeasible
/// the column cannot be formed and JacobianError is thrown.
Eigen::MatrixXd residual_jacobian(const NonlinearParams& nl, const TimeSeries& data,
                                  const SearchBounds* box = nullptr, FdOptions fd = {},
                                  OscForm osc = OscForm::OmegaLogTau);

} // namespace lppl
