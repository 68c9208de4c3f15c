#include "eerm/linreg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eerm::linreg {

namespace {

constexpr double kSingularPivotRatio = 1e-12;
constexpr double kDiagonalJitter = 1e-10;
constexpr double kKktTolerance = 1e-9;

// Solves the symmetric positive semidefinite system M z = r. If the LDLT
// pivots reveal rank deficiency, refactors with a small diagonal jitter,
// which selects (to first order) the minimum-norm minimizer.
Eigen::VectorXd solve_normal_equations(Eigen::MatrixXd M, const Eigen::VectorXd& r) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const bool singular = ldlt.info() != Eigen::Success || dmax == 0.0 ||
                          d.cwiseAbs().minCoeff() <= kSingularPivotRatio * dmax;
    if (singular) {
        M.diagonal().array() += kDiagonalJitter;
        ldlt.compute(M);
    }
    return ldlt.solve(r);
}

}  // namespace

PrimalSolution fit_primal(const Dataset& d, double lambda) {
    if (!(lambda >= 0.0))
        throw std::invalid_argument("linreg: lambda must be >= 0, got " + std::to_string(lambda));
    const auto n = static_cast<Eigen::Index>(d.feature_dim() + 1);  // weights incl. intercept

    // Accumulate the Gram blocks of the stacked system over z = (w, alpha):
    // residual rows [x;1] -> y and penalty rows sqrt(lambda) * ([x;1], -u) -> 0.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);     // sum of [x;1][x;1]^T
    Eigen::VectorXd xy = Eigen::VectorXd::Zero(n);          // sum of y [x;1]
    Eigen::VectorXd xu = Eigen::VectorXd::Zero(n);          // sum of u [x;1]
    double uu = 0.0;
    Eigen::VectorXd xext(n);
    for (const LabeledPoint& p : d) {
        for (Eigen::Index j = 0; j + 1 < n; ++j) xext[j] = p.features[j];
        xext[n - 1] = 1.0;
        gram.noalias() += xext * xext.transpose();
        xy.noalias() += p.label * xext;
        xu.noalias() += p.user_signal * xext;
        uu += p.user_signal * p.user_signal;
    }

    LinearHypothesis h;
    const bool alpha_coupled = lambda > 0.0 && uu > 0.0;
    if (alpha_coupled) {
        Eigen::MatrixXd M(n + 1, n + 1);
        M.topLeftCorner(n, n) = (1.0 + lambda) * gram;
        M.topRightCorner(n, 1) = -lambda * xu;
        M.bottomLeftCorner(1, n) = -lambda * xu.transpose();
        M(n, n) = lambda * uu;
        Eigen::VectorXd r(n + 1);
        r.head(n) = xy;
        r(n) = 0.0;
        const Eigen::VectorXd z = solve_normal_equations(std::move(M), r);
        h.weights.assign(z.data(), z.data() + n);
        h.alpha = z(n);
    } else {
        // The alpha block is void (lambda == 0 or all-zero signal): solve the
        // weight block alone, then fix alpha at the alignment minimizer so the
        // reported (alpha, entropy_estimate) stay the lambda -> 0 limit.
        const Eigen::VectorXd w = solve_normal_equations((1.0 + lambda) * gram, xy);
        h.weights.assign(w.data(), w.data() + n);
        double uh = 0.0;
        for (const LabeledPoint& p : d) uh += p.user_signal * predict_linear(h, p.features);
        h.alpha = uu > 0.0 ? uh / uu : 0.0;
    }

    PrimalSolution sol;
    sol.lambda = lambda;
    double residual_sq = 0.0, alignment_sq = 0.0;
    for (const LabeledPoint& p : d) {
        const double pred = predict_linear(h, p.features);
        residual_sq += (p.label - pred) * (p.label - pred);
        const double a = pred - h.alpha * p.user_signal;
        alignment_sq += a * a;
    }
    sol.objective_value = residual_sq + lambda * alignment_sq;
    sol.empirical_risk = residual_sq / static_cast<double>(d.size());
    sol.entropy_estimate = moments::entropy_estimate_linear(d, h).value;
    sol.hypothesis = std::move(h);
    return sol;
}

double population_risk(const moments::GaussianMoments& m, double w1, double w0) {
    m.validate();
    if (!std::isfinite(w1) || !std::isfinite(w0))
        throw std::invalid_argument("linreg: non-finite weights");
    const double mu_x2 = m.var_x + m.mu_x * m.mu_x;
    const double mu_xy = m.cov_xy + m.mu_x * m.mu_y;
    const double mu_y2 = m.var_y + m.mu_y * m.mu_y;
    return mu_x2 * w1 * w1 + w0 * w0 - 2.0 * m.mu_y * w0 + mu_y2 + 2.0 * m.mu_x * w1 * w0 -
           2.0 * mu_xy * w1;
}

DualSolution fit_dual_closed_form(const moments::GaussianMoments& m, double eta) {
    m.validate();
    if (m.var_x <= 0.0) throw std::invalid_argument("linreg: degenerate feature (var_x = 0)");

    const double cond_var = moments::conditional_variance_x_given_u(m).value;
    const double ols_slope = m.cov_xy / m.var_x;

    DualSolution sol;
    sol.eta = eta;
    if (cond_var == 0.0) {
        // The signal determines the prediction exactly; the explainability
        // constraint is vacuous for every eta.
        sol.w1 = ols_slope;
        sol.constraint_active = false;
        sol.lagrange_multiplier = 0.0;
    } else {
        const double bound = std::exp(2.0 * eta) / cond_var;
        if (ols_slope * ols_slope <= bound) {
            sol.w1 = ols_slope;
            sol.constraint_active = false;
            sol.lagrange_multiplier = 0.0;
        } else {
            assert(m.cov_xy != 0.0);  // slope 0 always satisfies the bound
            sol.w1 = std::copysign(std::exp(eta) / std::sqrt(cond_var), m.cov_xy);
            sol.constraint_active = true;
            // Stationarity of the KKT system gives the multiplier directly.
            double mult = (m.cov_xy - m.var_x * sol.w1) / sol.w1;
            if (mult < 0.0 && mult > -kKktTolerance) mult = 0.0;
            sol.lagrange_multiplier = mult;
        }
    }
    sol.w0 = m.mu_y - m.mu_x * sol.w1;
    sol.population_risk = population_risk(m, sol.w1, sol.w0);
    return sol;
}

double knee_eta(const moments::GaussianMoments& m) {
    if (m.var_x <= 0.0) throw std::invalid_argument("linreg: degenerate feature (var_x = 0)");
    const double cond_var = moments::conditional_variance_x_given_u(m).value;
    const double ols_slope = m.cov_xy / m.var_x;
    return moments::entropy_gaussian(ols_slope * ols_slope * cond_var);
}

std::vector<TradeoffPoint> tradeoff_curve_dual(const moments::GaussianMoments& m,
                                               std::span<const double> etas) {
    if (etas.empty()) throw std::invalid_argument("linreg: empty eta grid");
    if (!std::is_sorted(etas.begin(), etas.end()))
        throw std::invalid_argument("linreg: eta grid must be sorted ascending");
    const double cond_var = moments::conditional_variance_x_given_u(m).value;
    std::vector<TradeoffPoint> curve;
    curve.reserve(etas.size());
    for (double eta : etas) {
        const DualSolution s = fit_dual_closed_form(m, eta);
        curve.push_back({eta, s.population_risk, s.w1 * s.w1 * cond_var, s.w1, s.w0});
    }
    return curve;
}

std::vector<TradeoffPoint> tradeoff_curve_primal(const Dataset& d,
                                                 std::span<const double> lambdas) {
    if (lambdas.empty()) throw std::invalid_argument("linreg: empty lambda grid");
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw std::invalid_argument("linreg: lambda grid must be sorted ascending");
    std::vector<TradeoffPoint> curve;
    curve.reserve(lambdas.size());
    for (double lambda : lambdas) {
        const PrimalSolution s = fit_primal(d, lambda);
        const auto& w = s.hypothesis.weights;
        curve.push_back({lambda, s.empirical_risk, s.entropy_estimate, w.front(), w.back()});
    }
    return curve;
}

}  // namespace eerm::linreg
