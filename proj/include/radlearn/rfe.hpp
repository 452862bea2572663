#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radlearn/features.hpp"
#include "radlearn/forest.hpp"
#include "radlearn/metrics.hpp"

namespace radlearn {

struct RfeConfig {
    std::size_t k_folds = 5;
    std::uint64_t seed = 0;  // fold assignment
    bool rerank_each_step = false;
};

struct RfeStep {
    std::vector<std::string> subset;  // features kept after this step's elimination
    double cv_accuracy = 0.0;
};

struct RfeTrace {
    std::vector<std::string> initial_ranking;  // high to low importance
    std::vector<std::string> eliminated_order;
    std::vector<RfeStep> steps;
    double full_cv_accuracy = 0.0;  // CV accuracy with every feature, same folds
};

/// Mean per-fold accuracy of a forest trained on the named columns; an empty
/// column set scores the majority-class rate.
double cv_accuracy(const FeatureTable& t, const std::vector<std::string>& names, const ForestConfig& forest_cfg,
                   const FoldSplit& folds);

/// Out-of-fold class-1 probabilities for every sample.
std::vector<double> cv_probabilities(const FeatureTable& t, const ForestConfig& forest_cfg, const FoldSplit& folds);

/// Recursive elimination: rank once, then drop the lowest-ranked remaining
/// feature per step and record the cross-validated accuracy of what is left.
RfeTrace rfe_cv(const FeatureTable& t, const ForestConfig& forest_cfg, const RfeConfig& cfg);

/// Highest accuracy; ties go to the smaller subset, then the earlier step.
const RfeStep& select_best(const RfeTrace& trace);

}  // namespace radlearn
