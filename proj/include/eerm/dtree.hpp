#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>

#include "eerm/core.hpp"

namespace eerm::dtree {

struct TreeNode;

struct Leaf {
    int predicted_label = 0;
    std::array<std::int64_t, 2> class_counts{0, 0};  // training points routed here
};

struct Split {
    int feature_index = 0;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left;   // feature <= threshold
    std::unique_ptr<TreeNode> right;  // feature > threshold
};

struct TreeNode {
    std::variant<Leaf, Split> node;

    bool is_leaf() const { return std::holds_alternative<Leaf>(node); }
    const Leaf& leaf() const { return std::get<Leaf>(node); }
    const Split& split() const { return std::get<Split>(node); }
};

int tree_depth(const TreeNode& t);
TreeNode clone_tree(const TreeNode& t);
int predict_tree(const TreeNode& t, std::span<const double> x);

/// Greedy top-down induction minimizing weighted Gini impurity. Candidate
/// thresholds are midpoints between consecutive distinct sorted feature
/// values; ties break toward the lowest feature index, then the smallest
/// threshold; leaf labels tie toward 0. Deterministic for fixed input.
TreeNode fit_tree(const Dataset& d, int max_depth);

/// Pair of depth-limited trees routed by the binary user signal. When one
/// signal class is absent from the training set, that branch is a constant
/// leaf predicting `fallback_label` (the majority label of the full set).
struct CompositeTree {
    TreeNode tree_u0;
    TreeNode tree_u1;
    int max_depth = 0;
    std::optional<int> fallback_label;
    std::size_t feature_dim = 0;
};

/// Partitions the data by user signal and fits one tree per class with
/// max_depth = ceil(eta).
CompositeTree fit_eerm_tree(const Dataset& d, double eta);

int predict_composite(const CompositeTree& c, std::span<const double> x, int u);

}  // namespace eerm::dtree
