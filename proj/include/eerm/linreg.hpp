#pragma once

#include <span>
#include <vector>

#include "eerm/core.hpp"
#include "eerm/moments.hpp"

namespace eerm::linreg {

/// Minimizer of the penalized objective
///   sum_i (y_i - w.[x_i;1])^2 + lambda * sum_i (w.[x_i;1] - alpha u_i)^2
/// over (w, alpha), jointly convex. `objective_value` is the summed form
/// above; `empirical_risk` and `entropy_estimate` are the 1/m quantities
/// recorded for tradeoff curves.
struct PrimalSolution {
    LinearHypothesis hypothesis;  // weights and the fitted alpha
    double lambda = 0.0;
    double objective_value = 0.0;
    double empirical_risk = 0.0;
    double entropy_estimate = 0.0;
};

/// Closed-form solution of the single-feature risk minimization under the
/// constraint w1^2 <= exp(2 eta) / sigma^2_{x|u}.
struct DualSolution {
    double w1 = 0.0;
    double w0 = 0.0;
    double eta = 0.0;
    double population_risk = 0.0;
    bool constraint_active = false;
    double lagrange_multiplier = 0.0;
};

/// One row of a tradeoff curve. `entropy` is the conditional-variance-scale
/// explainability surrogate: the sample estimator value for primal sweeps,
/// w1^2 * sigma^2_{x|u} for dual sweeps.
struct TradeoffPoint {
    double control = 0.0;  // eta or lambda
    double risk = 0.0;
    double entropy = 0.0;
    double w1 = 0.0;
    double w0 = 0.0;
};

PrimalSolution fit_primal(const Dataset& d, double lambda);

DualSolution fit_dual_closed_form(const moments::GaussianMoments& m, double eta);

/// Population mean squared error of w1 * x + w0 under the given moments,
/// via the uncentered quadratic form.
double population_risk(const moments::GaussianMoments& m, double w1, double w0);

/// Smallest eta at which the unconstrained least-squares slope becomes
/// feasible; the dual risk curve is flat above it.
double knee_eta(const moments::GaussianMoments& m);

std::vector<TradeoffPoint> tradeoff_curve_dual(const moments::GaussianMoments& m,
                                               std::span<const double> etas);

std::vector<TradeoffPoint> tradeoff_curve_primal(const Dataset& d,
                                                 std::span<const double> lambdas);

}  // namespace eerm::linreg
