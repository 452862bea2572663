#include "radlearn/rfe.hpp"

#include <algorithm>

#include "radlearn/error.hpp"

namespace radlearn {

namespace {

FeatureTable subset_rows(const FeatureTable& t, const std::vector<std::size_t>& rows) {
    FeatureTable out;
    out.feature_names = t.feature_names;
    for (auto r : rows) {
        out.sample_ids.push_back(t.sample_ids[r]);
        out.values.push_back(t.values[r]);
        out.labels.push_back(t.labels[r]);
    }
    return out;
}

double majority_rate(const std::vector<int>& labels) {
    const auto pos = std::count(labels.begin(), labels.end(), 1);
    return double(std::max<long>(pos, long(labels.size()) - pos)) / double(labels.size());
}

}  // namespace

std::vector<double> cv_probabilities(const FeatureTable& t, const ForestConfig& forest_cfg, const FoldSplit& folds) {
    std::vector<double> proba(t.rows(), 0.0);
    for (std::size_t f = 0; f < folds.k; ++f) {
        const auto train = subset_rows(t, folds.train_indices(f));
        const auto model = train_forest(train, forest_cfg);
        for (auto r : folds.test_indices(f)) proba[r] = model.predict_row(t.values[r]);
    }
    return proba;
}

double cv_accuracy(const FeatureTable& t, const std::vector<std::string>& names, const ForestConfig& forest_cfg,
                   const FoldSplit& folds) {
    if (names.empty()) return majority_rate(t.labels);
    const FeatureTable sub = t.select(names);
    const auto proba = cv_probabilities(sub, forest_cfg, folds);
    double acc_sum = 0.0;
    for (std::size_t f = 0; f < folds.k; ++f) {
        const auto test = folds.test_indices(f);
        std::size_t correct = 0;
        for (auto r : test) correct += ((proba[r] > 0.5 ? 1 : 0) == t.labels[r]) ? 1 : 0;
        acc_sum += double(correct) / double(test.size());
    }
    return acc_sum / double(folds.k);
}

RfeTrace rfe_cv(const FeatureTable& t, const ForestConfig& forest_cfg, const RfeConfig& cfg) {
    t.validate();
    if (t.rows() == 0 || t.cols() == 0) throw ValidationError("RFE needs a nonempty feature table");
    const FoldSplit folds = stratified_kfold(t.labels, cfg.k_folds, cfg.seed);

    RfeTrace trace;
    trace.initial_ranking = rank_features(train_forest(t, forest_cfg));
    trace.full_cv_accuracy = cv_accuracy(t, trace.initial_ranking, forest_cfg, folds);

    std::vector<std::string> remaining = trace.initial_ranking;
    while (!remaining.empty()) {
        trace.eliminated_order.push_back(remaining.back());
        remaining.pop_back();
        trace.steps.push_back({remaining, cv_accuracy(t, remaining, forest_cfg, folds)});
        if (cfg.rerank_each_step && remaining.size() > 1) {
            remaining = rank_features(train_forest(t.select(remaining), forest_cfg));
        }
    }
    return trace;
}

const RfeStep& select_best(const RfeTrace& trace) {
    if (trace.steps.empty()) throw ValidationError("RFE trace is empty");
    const RfeStep* best = &trace.steps.front();
    for (const auto& s : trace.steps) {
        if (s.cv_accuracy > best->cv_accuracy ||
            (s.cv_accuracy == best->cv_accuracy && s.subset.size() < best->subset.size())) {
            best = &s;
        }
    }
    return *best;
}

}  // namespace radlearn
