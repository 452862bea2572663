#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace radlearn {

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

/// Positive class is 1.
ConfusionCounts confusion(std::span<const int> preds, std::span<const int> labels);

struct ClassificationMetrics {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Ratios with 0/0 defined as 0.
ClassificationMetrics metrics(const ConfusionCounts& c);

/// Rank-based AUROC; ties between a positive and a negative count 1/2.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct FoldSplit {
    std::size_t k = 0;
    std::vector<std::size_t> fold_of;  // per sample, in [0, k)

    std::vector<std::size_t> train_indices(std::size_t fold) const;
    std::vector<std::size_t> test_indices(std::size_t fold) const;
};

/// Shuffles each class with `seed`, then deals samples round-robin into k
/// folds; the deal continues across classes so fold sizes differ by <= 1.
FoldSplit stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

}  // namespace radlearn
