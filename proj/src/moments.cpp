#include "eerm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eerm::moments {

namespace {

constexpr double kMinorTolerance = 1e-9;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw std::invalid_argument("moments: non-finite field " + std::string(name));
}

void require_minor(double minor, double scale, const char* name) {
    if (minor < -kMinorTolerance * std::max(1.0, scale))
        throw std::invalid_argument("moments: covariance minor " + std::string(name) +
                                    " is negative (" + std::to_string(minor) + ")");
}

}  // namespace

void GaussianMoments::validate() const {
    require_finite(mu_x, "mu_x");
    require_finite(mu_y, "mu_y");
    require_finite(mu_u, "mu_u");
    require_finite(var_x, "var_x");
    require_finite(var_y, "var_y");
    require_finite(var_u, "var_u");
    require_finite(cov_xy, "cov_xy");
    require_finite(cov_xu, "cov_xu");
    require_finite(cov_yu, "cov_yu");
    if (var_x < 0 || var_y < 0 || var_u < 0)
        throw std::invalid_argument("moments: negative variance");
    require_minor(var_x * var_y - cov_xy * cov_xy, var_x * var_y, "(x,y)");
    require_minor(var_x * var_u - cov_xu * cov_xu, var_x * var_u, "(x,u)");
    require_minor(var_y * var_u - cov_yu * cov_yu, var_y * var_u, "(y,u)");
}

GaussianMoments estimate_moments(const Dataset& d) {
    if (d.feature_dim() != 1)
        throw std::invalid_argument("moments: estimate_moments requires a single feature, got " +
                                    std::to_string(d.feature_dim()));
    const auto m = static_cast<double>(d.size());
    if (d.size() < 2) throw std::invalid_argument("moments: need at least 2 points");

    double sx = 0, sy = 0, su = 0;
    for (const LabeledPoint& p : d) {
        sx += p.features[0];
        sy += p.label;
        su += p.user_signal;
    }
    GaussianMoments g;
    g.mu_x = sx / m;
    g.mu_y = sy / m;
    g.mu_u = su / m;

    double vxx = 0, vyy = 0, vuu = 0, vxy = 0, vxu = 0, vyu = 0;
    for (const LabeledPoint& p : d) {
        const double dx = p.features[0] - g.mu_x;
        const double dy = p.label - g.mu_y;
        const double du = p.user_signal - g.mu_u;
        vxx += dx * dx;
        vyy += dy * dy;
        vuu += du * du;
        vxy += dx * dy;
        vxu += dx * du;
        vyu += dy * du;
    }
    g.var_x = vxx / m;
    g.var_y = vyy / m;
    g.var_u = vuu / m;
    g.cov_xy = vxy / m;
    g.cov_xu = vxu / m;
    g.cov_yu = vyu / m;
    g.validate();
    return g;
}

ConditionalVariance conditional_variance_x_given_u(const GaussianMoments& m) {
    if (m.var_u == 0.0) return {m.var_x, true};
    const double value = m.var_x - m.cov_xu * m.cov_xu / m.var_u;
    // Negative values here come from floating-point cancellation (tolerated
    // up to 1e-12); anything worse was already rejected by validate().
    return {std::max(value, 0.0), false};
}

double conditional_variance_pred(const GaussianMoments& m, double w1) {
    return w1 * w1 * conditional_variance_x_given_u(m).value;
}

double entropy_gaussian(double cond_var) {
    if (cond_var <= 0.0)
        throw std::domain_error("moments: entropy undefined for degenerate prediction");
    return 0.5 * std::log(cond_var);
}

EntropyEstimate entropy_estimate_linear(const Dataset& d, const LinearHypothesis& h) {
    const auto m = static_cast<double>(d.size());
    double su2 = 0, suh = 0;
    for (const LabeledPoint& p : d) {
        const double u = p.user_signal;
        su2 += u * u;
        suh += u * predict_linear(h, p.features);
    }
    const double alpha = su2 > 0.0 ? suh / su2 : 0.0;
    double value = 0;
    for (const LabeledPoint& p : d) {
        const double r = predict_linear(h, p.features) - alpha * p.user_signal;
        value += r * r;
    }
    return {value / m, alpha};
}

double entropy_estimate_tree(int depth) {
    if (depth < 0) throw std::invalid_argument("moments: negative tree depth");
    return static_cast<double>(std::max(depth - 1, 0));
}

}  // namespace eerm::moments
