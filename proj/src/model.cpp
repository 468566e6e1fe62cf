#include "lppl/model.hpp"

#include "lppl/errors.hpp"
#include "lppl/optimizer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace lppl {

namespace {

struct Basis {
    // per-observation basis values: model_i = A + B*g[i] + C*h[i]
    std::vector<double> g; // tau^m
    std::vector<double> h; // tau^m * cos(osc argument)
};

double osc_argument(const NonlinearParams& nl, double log_tau, OscForm osc) {
    return osc == OscForm::OmegaLogTau ? nl.omega * log_tau + nl.phi
                                       : std::log(nl.omega) + log_tau + nl.phi;
}

Basis build_basis(const NonlinearParams& nl, const TimeSeries& data, OscForm osc) {
    Basis b;
    const std::size_t n = data.size();
    b.g.resize(n);
    b.h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = nl.tc - data.times[i];
        if (!(tau > 0.0))
            throw DomainError("model undefined at t = " + std::to_string(data.times[i]) +
                              " >= tc = " + std::to_string(nl.tc));
        const double lt = std::log(tau);
        const double g = std::exp(nl.m * lt);
        const double co = std::cos(osc_argument(nl, lt, osc));
        if (!std::isfinite(g) || !std::isfinite(co))
            throw DegenerateBasisError("non-finite basis value at t = " +
                                       std::to_string(data.times[i]));
        b.g[i] = g;
        b.h[i] = g * co;
    }
    return b;
}

// Solves the 3x3 normal equations by spectral factorization so the condition
// of the system is available and near-singular bases are rejected.
SlaveResult solve_normal_equations(const Basis& b, const TimeSeries& data) {
    Eigen::Matrix3d N = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    const std::size_t n = data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = b.g[i];
        const double h = b.h[i];
        const double y = data.values[i];
        N(0, 0) += 1.0;
        N(0, 1) += g;
        N(0, 2) += h;
        N(1, 1) += g * g;
        N(1, 2) += g * h;
        N(2, 2) += h * h;
        rhs(0) += y;
        rhs(1) += y * g;
        rhs(2) += y * h;
    }
    N(1, 0) = N(0, 1);
    N(2, 0) = N(0, 2);
    N(2, 1) = N(1, 2);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(N);
    if (es.info() != Eigen::Success)
        throw DegenerateBasisError("normal-equation eigensolve failed");
    const Eigen::Vector3d lambda = es.eigenvalues(); // ascending
    if (!(lambda(2) > 0.0) || !(lambda(0) > 0.0) ||
        lambda(2) > kNormalConditionLimit * lambda(0))
        throw DegenerateBasisError("normal-equation matrix numerically singular "
                                   "(condition above threshold)");
    const Eigen::Vector3d beta =
        es.eigenvectors() * (es.eigenvectors().transpose() * rhs).cwiseQuotient(lambda);
    SlaveResult out;
    out.lin = LinearParams{beta(0), beta(1), beta(2)};
    out.condition = std::sqrt(lambda(2) / lambda(0));
    return out;
}

void require_enough_points(const TimeSeries& data) {
    if (data.size() < kMinWindowObs)
        throw InsufficientDataError("slaving needs at least " + std::to_string(kMinWindowObs) +
                                    " observations, got " + std::to_string(data.size()));
}

} // namespace

double lppl_value(const NonlinearParams& nl, const LinearParams& lin, double t, OscForm osc) {
    const double tau = nl.tc - t;
    if (!(tau > 0.0))
        throw DomainError("model undefined at t = " + std::to_string(t) +
                          " >= tc = " + std::to_string(nl.tc));
    const double lt = std::log(tau);
    const double g = std::exp(nl.m * lt);
    return lin.A + g * (lin.B + lin.C * std::cos(osc_argument(nl, lt, osc)));
}

SlaveResult slave_linear(const NonlinearParams& nl, const TimeSeries& data, OscForm osc) {
    require_enough_points(data);
    return solve_normal_equations(build_basis(nl, data, osc), data);
}

ResidualEval slaved_residuals(const NonlinearParams& nl, const TimeSeries& data, OscForm osc) {
    require_enough_points(data);
    const Basis b = build_basis(nl, data, osc);
    const SlaveResult sl = solve_normal_equations(b, data);
    ResidualEval out;
    out.lin = sl.lin;
    out.condition = sl.condition;
    out.residuals.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double model = sl.lin.A + b.g[i] * sl.lin.B + b.h[i] * sl.lin.C;
        const double r = data.values[i] - model;
        out.residuals[i] = r;
        out.ssr += r * r;
    }
    return out;
}

double objective(const NonlinearParams& nl, const TimeSeries& data, OscForm osc) {
    return slaved_residuals(nl, data, osc).ssr;
}

namespace {

double& param_ref(NonlinearParams& p, int j) {
    switch (j) {
    case 0: return p.tc;
    case 1: return p.m;
    case 2: return p.omega;
    default: return p.phi;
    }
}

const char* param_name(int j) {
    switch (j) {
    case 0: return "tc";
    case 1: return "m";
    case 2: return "omega";
    default: return "phi";
    }
}

} // namespace

Eigen::MatrixXd residual_jacobian(const NonlinearParams& nl, const TimeSeries& data,
                                  const SearchBounds* box, FdOptions fd, OscForm osc) {
    const ResidualEval base = slaved_residuals(nl, data, osc);
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd jac(n, 4);

    for (int j = 0; j < 4; ++j) {
        NonlinearParams p = nl;
        const double pj = param_ref(p, j);
        const double h = std::max(fd.rel_step * std::abs(pj), fd.abs_floor);

        const auto eval_at = [&](double value) -> std::optional<ResidualEval> {
            if (box) {
                const auto [lo, hi] = box->range(j);
                if (value < lo || value > hi)
                    return std::nullopt;
            }
            NonlinearParams q = nl;
            param_ref(q, j) = value;
            try {
                return slaved_residuals(q, data, osc);
            } catch (const Error&) {
                return std::nullopt; // degenerate or out of domain: side unusable
            }
        };

        const auto plus = eval_at(pj + h);
        const auto minus = eval_at(pj - h);
        if (plus && minus) {
            for (Eigen::Index i = 0; i < n; ++i)
                jac(i, j) = (plus->residuals[static_cast<std::size_t>(i)] -
                             minus->residuals[static_cast<std::size_t>(i)]) /
                            (2.0 * h);
        } else if (plus) {
            for (Eigen::Index i = 0; i < n; ++i)
                jac(i, j) = (plus->residuals[static_cast<std::size_t>(i)] -
                             base.residuals[static_cast<std::size_t>(i)]) /
                            h;
        } else if (minus) {
            for (Eigen::Index i = 0; i < n; ++i)
                jac(i, j) = (base.residuals[static_cast<std::size_t>(i)] -
                             minus->residuals[static_cast<std::size_t>(i)]) /
                            h;
        } else {
            throw JacobianError(std::string("both perturbation sides infeasible for ") +
                                param_name(j));
        }
    }
    return jac;
}

} // namespace lppl
