#pragma once

#include "eerm/core.hpp"

namespace eerm::moments {

/// First and second moments of the joint (x, y, u) distribution in the
/// single-feature model. Covariances follow the 1/m sample-average
/// convention.
struct GaussianMoments {
    double mu_x = 0.0, mu_y = 0.0, mu_u = 0.0;
    double var_x = 0.0, var_y = 0.0, var_u = 0.0;
    double cov_xy = 0.0, cov_xu = 0.0, cov_yu = 0.0;

    /// Throws std::invalid_argument if a field is non-finite, a variance is
    /// negative, or a 2x2 principal minor of the covariance matrix is below
    /// -tolerance.
    void validate() const;
};

/// Sample means and 1/m covariances of (x, y, u). Requires a scalar feature
/// and at least two points.
GaussianMoments estimate_moments(const Dataset& d);

struct ConditionalVariance {
    double value = 0.0;
    /// var_u == 0: the signal carries no information and `value` falls back
    /// to var_x.
    bool signal_degenerate = false;
};

/// sigma^2_{x|u} = var_x - cov_xu^2 / var_u, clamped at 0.
ConditionalVariance conditional_variance_x_given_u(const GaussianMoments& m);

/// Conditional variance of the prediction w1 * x + w0 given u.
double conditional_variance_pred(const GaussianMoments& m, double w1);

/// Differential entropy of a Gaussian with the given conditional variance,
/// up to an additive constant: (1/2) ln(cond_var).
double entropy_gaussian(double cond_var);

struct EntropyEstimate {
    double value = 0.0;       // minimized mean squared alignment error
    double alpha_star = 0.0;  // minimizing alignment coefficient
};

/// Sample conditional-variance estimator of the predictions given the user
/// signal: min over alpha of (1/m) sum (h(x_i) - alpha u_i)^2, solved in
/// closed form. With an all-zero signal the objective is constant in alpha;
/// alpha_star is then 0.
EntropyEstimate entropy_estimate_linear(const Dataset& d, const LinearHypothesis& h);

/// Entropy bound for a depth-limited tree whose root tests the user signal:
/// max(depth - 1, 0) bits.
double entropy_estimate_tree(int depth);

}  // namespace eerm::moments
