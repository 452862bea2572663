#include "radlearn/metrics.hpp"

#include "radlearn/error.hpp"
#include "radlearn/random.hpp"
#include "radlearn/stats.hpp"

namespace radlearn {

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

void check_labels(std::span<const int> labels) {
    for (int l : labels) {
        if (l != 0 && l != 1) throw ValidationError("labels must be 0 or 1");
    }
}

}  // namespace

ConfusionCounts confusion(std::span<const int> preds, std::span<const int> labels) {
    if (preds.size() != labels.size()) throw ValidationError("prediction and label lengths differ");
    if (preds.empty()) throw ValidationError("confusion needs at least one sample");
    check_labels(labels);
    check_labels(preds);
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (labels[i] == 1) {
            (preds[i] == 1 ? c.tp : c.fn) += 1;
        } else {
            (preds[i] == 1 ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

ClassificationMetrics metrics(const ConfusionCounts& c) {
    ClassificationMetrics m;
    const double tp = double(c.tp), fp = double(c.fp), tn = double(c.tn), fn = double(c.fn);
    m.accuracy = ratio(tp + tn, double(c.total()));
    m.sensitivity = ratio(tp, tp + fn);
    m.specificity = ratio(tn, tn + fp);
    m.precision = ratio(tp, tp + fp);
    m.recall = m.sensitivity;
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ValidationError("score and label lengths differ");
    check_labels(labels);
    std::size_t n_pos = 0;
    for (int l : labels) n_pos += std::size_t(l);
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw ValidationError("AUROC needs both classes");

    const auto ranks = midranks(scores);
    double pos_rank_sum = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i)
        if (labels[i] == 1) pos_rank_sum += ranks[i];
    const double u_pos = pos_rank_sum - double(n_pos) * double(n_pos + 1) / 2.0;
    return u_pos / (double(n_pos) * double(n_neg));
}

std::vector<std::size_t> FoldSplit::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldSplit::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) out.push_back(i);
    return out;
}

FoldSplit stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw ValidationError("k must be >= 1");
    check_labels(labels);
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (const auto& cls : by_class) {
        if (cls.size() < k) throw ValidationError("a class has fewer samples than folds");
    }

    FoldSplit split{k, std::vector<std::size_t>(labels.size(), 0)};
    Rng rng(seed);
    std::size_t next_fold = 0;
    for (auto& cls : by_class) {
        rng.shuffle(std::span<std::size_t>(cls));
        for (auto idx : cls) {
            split.fold_of[idx] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return split;
}

}  // namespace radlearn
