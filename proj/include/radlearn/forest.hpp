#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radlearn/features.hpp"

namespace radlearn {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;      // unlimited when empty
    std::size_t min_samples_leaf = 1;
    std::optional<std::size_t> features_per_split;  // floor(sqrt(p)) when empty
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;     // value <= threshold
    int right = -1;
    double prob1 = 0.0;  // class-1 fraction at the node
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // root at 0

    double predict(std::span<const double> row) const;
};

struct ForestModel {
    std::vector<std::string> feature_names;
    std::vector<DecisionTree> trees;
    std::vector<double> importances;  // mean impurity decrease, sums to 1 unless no split happened

    /// Mean of per-tree leaf class-1 probabilities for a row in feature_names order.
    double predict_row(std::span<const double> row) const;
};

/// 1 - sum (n_c / n)^2.
double gini_impurity(std::span<const double> class_counts);

ForestModel train_forest(const FeatureTable& t, const ForestConfig& cfg);

/// Looks features up by name; extra entries in `row` are ignored.
double predict_proba(const ForestModel& model, const FeatureVector& row);

/// Names by importance, high to low; ties by ascending name.
std::vector<std::string> rank_features(const ForestModel& model);

}  // namespace radlearn
