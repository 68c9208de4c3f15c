#include "eerm/dtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace eerm::dtree {

namespace {

using Index = std::uint32_t;
using Wide = __int128;  // exact split-score comparisons

// Splits are ranked by the purity score sum_side (c0^2 + c1^2) / m_side,
// kept as an exact integer fraction so ties and the no-improvement test do
// not depend on floating-point rounding.
struct PurityScore {
    std::int64_t num = 0;
    std::int64_t den = 1;

    bool better_than(const PurityScore& o) const {
        return static_cast<Wide>(num) * o.den > static_cast<Wide>(o.num) * den;
    }
};

PurityScore leaf_score(std::int64_t c0, std::int64_t c1) {
    return {c0 * c0 + c1 * c1, c0 + c1};
}

PurityScore split_score(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
    const std::int64_t ml = a0 + a1, mr = b0 + b1;
    return {(a0 * a0 + a1 * a1) * mr + (b0 * b0 + b1 * b1) * ml, ml * mr};
}

struct BestSplit {
    bool found = false;
    int feature = 0;
    double threshold = 0.0;
    PurityScore score;
};

class Builder {
public:
    Builder(const Dataset& d, int max_depth) : data_(d), max_depth_(max_depth) {}

    TreeNode build(std::vector<Index>& idx, int depth) {
        std::int64_t c0 = 0, c1 = 0;
        for (Index i : idx) (data_[i].label == 1.0 ? c1 : c0)++;
        if (depth >= max_depth_ || c0 == 0 || c1 == 0) return make_leaf(c0, c1);

        const BestSplit best = find_best_split(idx, leaf_score(c0, c1));
        if (!best.found) return make_leaf(c0, c1);

        std::vector<Index> left, right;
        left.reserve(idx.size());
        right.reserve(idx.size());
        for (Index i : idx)
            (data_[i].features[best.feature] <= best.threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        Split split;
        split.feature_index = best.feature;
        split.threshold = best.threshold;
        split.left = std::make_unique<TreeNode>(build(left, depth + 1));
        split.right = std::make_unique<TreeNode>(build(right, depth + 1));
        return TreeNode{std::move(split)};
    }

private:
    static TreeNode make_leaf(std::int64_t c0, std::int64_t c1) {
        return TreeNode{Leaf{c1 > c0 ? 1 : 0, {c0, c1}}};
    }

    BestSplit find_best_split(const std::vector<Index>& idx, PurityScore parent) {
        BestSplit best;
        const auto n_features = data_.feature_dim();
        std::vector<Index> order(idx);
        for (std::size_t f = 0; f < n_features; ++f) {
            std::sort(order.begin(), order.end(), [&](Index a, Index b) {
                return data_[a].features[f] < data_[b].features[f];
            });
            std::int64_t a0 = 0, a1 = 0, b0 = 0, b1 = 0;
            for (Index i : order) (data_[i].label == 1.0 ? b1 : b0)++;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const LabeledPoint& p = data_[order[i]];
                (p.label == 1.0 ? a1 : a0)++;
                (p.label == 1.0 ? b1 : b0)--;
                const double lo = p.features[f];
                const double hi = data_[order[i + 1]].features[f];
                if (lo == hi) continue;
                double threshold = lo + (hi - lo) / 2.0;
                if (!(threshold < hi)) threshold = lo;  // adjacent doubles
                const PurityScore score = split_score(a0, a1, b0, b1);
                if (score.better_than(parent) && (!best.found || score.better_than(best.score)))
                    best = {true, static_cast<int>(f), threshold, score};
            }
        }
        return best;
    }

    const Dataset& data_;
    int max_depth_;
};

int majority_label(const Dataset& d) {
    std::int64_t c0 = 0, c1 = 0;
    for (const LabeledPoint& p : d) (p.label == 1.0 ? c1 : c0)++;
    return c1 > c0 ? 1 : 0;
}

}  // namespace

int tree_depth(const TreeNode& t) {
    if (t.is_leaf()) return 0;
    return 1 + std::max(tree_depth(*t.split().left), tree_depth(*t.split().right));
}

TreeNode clone_tree(const TreeNode& t) {
    if (t.is_leaf()) return TreeNode{t.leaf()};
    const Split& s = t.split();
    Split copy;
    copy.feature_index = s.feature_index;
    copy.threshold = s.threshold;
    copy.left = std::make_unique<TreeNode>(clone_tree(*s.left));
    copy.right = std::make_unique<TreeNode>(clone_tree(*s.right));
    return TreeNode{std::move(copy)};
}

int predict_tree(const TreeNode& t, std::span<const double> x) {
    const TreeNode* node = &t;
    while (!node->is_leaf()) {
        const Split& s = node->split();
        if (static_cast<std::size_t>(s.feature_index) >= x.size())
            throw std::invalid_argument("dtree: feature vector too short for split on index " +
                                        std::to_string(s.feature_index));
        node = x[s.feature_index] <= s.threshold ? s.left.get() : s.right.get();
    }
    return node->leaf().predicted_label;
}

TreeNode fit_tree(const Dataset& d, int max_depth) {
    if (d.label_kind() != ValueKind::binary)
        throw std::invalid_argument("dtree: binary labels required");
    if (max_depth < 0) throw std::invalid_argument("dtree: max_depth must be >= 0");
    std::vector<Index> idx(d.size());
    std::iota(idx.begin(), idx.end(), Index{0});
    return Builder(d, max_depth).build(idx, 0);
}

CompositeTree fit_eerm_tree(const Dataset& d, double eta) {
    if (d.label_kind() != ValueKind::binary)
        throw std::invalid_argument("dtree: binary labels required");
    if (d.signal_kind() != ValueKind::binary)
        throw std::invalid_argument("dtree: binary user signal required");
    if (!(eta >= 0.0)) throw std::invalid_argument("dtree: eta must be >= 0");

    CompositeTree c;
    c.max_depth = static_cast<int>(std::ceil(eta));
    c.feature_dim = d.feature_dim();

    std::vector<LabeledPoint> part0, part1;
    for (const LabeledPoint& p : d) (p.user_signal == 1.0 ? part1 : part0).push_back(p);

    const int fallback = majority_label(d);
    auto fit_part = [&](std::vector<LabeledPoint>& part) {
        if (part.empty()) {
            c.fallback_label = fallback;
            return TreeNode{Leaf{fallback, {0, 0}}};
        }
        Dataset sub(std::move(part), d.label_kind(), d.signal_kind());
        return fit_tree(sub, c.max_depth);
    };
    c.tree_u0 = fit_part(part0);
    c.tree_u1 = fit_part(part1);
    return c;
}

int predict_composite(const CompositeTree& c, std::span<const double> x, int u) {
    if (u != 0 && u != 1)
        throw std::invalid_argument("dtree: user signal must be 0 or 1, got " + std::to_string(u));
    if (x.size() != c.feature_dim)
        throw std::invalid_argument("dtree: feature length " + std::to_string(x.size()) +
                                    " does not match tree dimension " +
                                    std::to_string(c.feature_dim));
    return predict_tree(u == 1 ? c.tree_u1 : c.tree_u0, x);
}

}  // namespace eerm::dtree
