#include "eerm/core.hpp"

#include <cmath>

namespace eerm {

namespace {

bool is_zero_or_one(double v) { return v == 0.0 || v == 1.0; }

void check_finite(double v, const char* what, std::size_t index) {
    if (!std::isfinite(v))
        throw std::invalid_argument("core: non-finite " + std::string(what) + " at point " +
                                    std::to_string(index));
}

}  // namespace

Dataset::Dataset(std::vector<LabeledPoint> points, ValueKind label_kind, ValueKind signal_kind)
    : points_(std::move(points)), label_kind_(label_kind), signal_kind_(signal_kind) {
    if (points_.empty()) throw std::invalid_argument("core: dataset must be nonempty");
    feature_dim_ = points_.front().features.size();
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const LabeledPoint& p = points_[i];
        if (p.features.size() != feature_dim_)
            throw std::invalid_argument("core: point " + std::to_string(i) + " has " +
                                        std::to_string(p.features.size()) +
                                        " features, expected " + std::to_string(feature_dim_));
        for (double f : p.features) check_finite(f, "feature", i);
        check_finite(p.label, "label", i);
        check_finite(p.user_signal, "user signal", i);
        if (label_kind_ == ValueKind::binary && !is_zero_or_one(p.label))
            throw std::invalid_argument("core: binary label at point " + std::to_string(i) +
                                        " is not 0 or 1");
        if (signal_kind_ == ValueKind::binary && !is_zero_or_one(p.user_signal))
            throw std::invalid_argument("core: binary user signal at point " + std::to_string(i) +
                                        " is not 0 or 1");
    }
}

double predict_linear(const LinearHypothesis& h, std::span<const double> x) {
    if (x.size() + 1 != h.weights.size())
        throw std::invalid_argument("core: feature length " + std::to_string(x.size()) +
                                    " does not match hypothesis dimension " +
                                    std::to_string(h.weights.size() - 1));
    double acc = h.weights.back();  // constant-1 feature
    for (std::size_t j = 0; j < x.size(); ++j) acc += h.weights[j] * x[j];
    return acc;
}

double empirical_risk(const Dataset& d, const LinearHypothesis& h) {
    double total = 0.0;
    for (const LabeledPoint& p : d) {
        const double r = predict_linear(h, p.features) - p.label;
        total += r * r;
    }
    return total / static_cast<double>(d.size());
}

}  // namespace eerm
