#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eerm {

enum class ValueKind { numeric, binary };

/// One example: feature vector, label, and the user signal attached to it.
struct LabeledPoint {
    std::vector<double> features;
    double label = 0.0;
    double user_signal = 0.0;
};

/// Index-stable, immutable collection of points sharing one feature
/// dimension. Construction validates shape; with a binary label or signal
/// kind the corresponding values must be exactly 0 or 1.
class Dataset {
public:
    Dataset(std::vector<LabeledPoint> points, ValueKind label_kind, ValueKind signal_kind);

    std::size_t size() const { return points_.size(); }
    std::size_t feature_dim() const { return feature_dim_; }
    ValueKind label_kind() const { return label_kind_; }
    ValueKind signal_kind() const { return signal_kind_; }

    const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<LabeledPoint>& points() const { return points_; }
    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

private:
    std::vector<LabeledPoint> points_;
    std::size_t feature_dim_ = 0;
    ValueKind label_kind_ = ValueKind::numeric;
    ValueKind signal_kind_ = ValueKind::numeric;
};

/// Linear predictor h(x) = w . [x; 1]. The last weight multiplies an
/// implicit constant-1 feature, so the intercept shares the code path of
/// the other weights. `alpha` is the signal-alignment coefficient fitted
/// alongside the weights.
struct LinearHypothesis {
    std::vector<double> weights;  // size feature_dim + 1, intercept last
    double alpha = 0.0;
};

double predict_linear(const LinearHypothesis& h, std::span<const double> x);

/// Mean squared residual of h over d.
double empirical_risk(const Dataset& d, const LinearHypothesis& h);

/// Fraction of points whose predicted binary label equals the true label.
/// `predict` is called with each LabeledPoint and must return 0 or 1.
template <class Predictor>
double accuracy(const Dataset& d, Predictor&& predict) {
    if (d.label_kind() != ValueKind::binary)
        throw std::invalid_argument("core: accuracy requires binary labels");
    std::size_t correct = 0;
    for (const LabeledPoint& p : d) {
        int yhat = static_cast<int>(predict(p));
        if (yhat == static_cast<int>(p.label)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(d.size());
}

}  // namespace eerm
