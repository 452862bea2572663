#include "radlearn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radlearn/error.hpp"
#include "radlearn/random.hpp"

namespace radlearn {

double gini_impurity(std::span<const double> class_counts) {
    const double total = std::accumulate(class_counts.begin(), class_counts.end(), 0.0);
    if (!(total > 0.0)) throw ValidationError("gini impurity of an empty node");
    double sq = 0.0;
    for (double c : class_counts) sq += (c / total) * (c / total);
    return 1.0 - sq;
}

double DecisionTree::predict(std::span<const double> row) const {
    std::size_t at = 0;
    while (nodes[at].feature >= 0) {
        const auto& n = nodes[at];
        at = std::size_t(row[std::size_t(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[at].prob1;
}

double ForestModel::predict_row(std::span<const double> row) const {
    if (trees.empty()) throw ValidationError("forest has no trees");
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(row);
    return sum / double(trees.size());
}

namespace {

double gini2(double n0, double n1) {
    const double n = n0 + n1;
    return 1.0 - (n0 / n) * (n0 / n) - (n1 / n) * (n1 / n);
}

class TreeBuilder {
public:
    TreeBuilder(const FeatureTable& t, const ForestConfig& cfg, std::size_t mtry, Rng& rng,
                std::vector<double>& importance)
        : t_(t), cfg_(cfg), mtry_(mtry), rng_(rng), importance_(importance) {}

    DecisionTree build(std::vector<std::size_t> samples) {
        root_size_ = double(samples.size());
        grow(std::move(samples), 0);
        return std::move(tree_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double decrease = 0.0;
    };

    int grow(std::vector<std::size_t> samples, std::size_t depth) {
        const int id = int(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double n1 = 0.0;
        for (auto s : samples) n1 += t_.labels[s];
        const double n = double(samples.size());
        tree_.nodes[std::size_t(id)].prob1 = n1 / n;

        const bool pure = n1 == 0.0 || n1 == n;
        const bool depth_cap = cfg_.max_depth && depth >= *cfg_.max_depth;
        if (pure || depth_cap || samples.size() < 2 * cfg_.min_samples_leaf) return id;

        const Split best = find_split(samples, n - n1, n1);
        if (best.feature < 0) return id;

        importance_[std::size_t(best.feature)] += best.decrease * n / root_size_;
        std::vector<std::size_t> left, right;
        for (auto s : samples) {
            (t_.values[s][std::size_t(best.feature)] <= best.threshold ? left : right).push_back(s);
        }
        samples.clear();
        samples.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& node = tree_.nodes[std::size_t(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    Split find_split(const std::vector<std::size_t>& samples, double n0, double n1) {
        const std::size_t p = t_.cols();
        std::vector<std::size_t> features(p);
        std::iota(features.begin(), features.end(), 0);
        // Partial Fisher-Yates: the first mtry entries are the candidates.
        for (std::size_t i = 0; i < mtry_; ++i) std::swap(features[i], features[i + rng_.below(p - i)]);

        const double n = n0 + n1;
        const double parent = gini2(n0, n1);
        const auto min_leaf = double(cfg_.min_samples_leaf);
        Split best;
        std::vector<std::pair<double, int>> col(samples.size());
        for (std::size_t fi = 0; fi < mtry_; ++fi) {
            const std::size_t f = features[fi];
            for (std::size_t s = 0; s < samples.size(); ++s) {
                col[s] = {t_.values[samples[s]][f], t_.labels[samples[s]]};
            }
            std::sort(col.begin(), col.end());
            double l0 = 0.0, l1 = 0.0;
            for (std::size_t s = 0; s + 1 < col.size(); ++s) {
                (col[s].second ? l1 : l0) += 1.0;
                if (col[s].first == col[s + 1].first) continue;
                const double nl = l0 + l1, nr = n - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                const double child = (nl / n) * gini2(l0, l1) + (nr / n) * gini2(n0 - l0, n1 - l1);
                const double decrease = parent - child;
                if (decrease > best.decrease) {
                    best.feature = int(f);
                    best.decrease = decrease;
                    best.threshold = col[s].first + (col[s + 1].first - col[s].first) / 2.0;
                }
            }
        }
        return best;
    }

    const FeatureTable& t_;
    const ForestConfig& cfg_;
    std::size_t mtry_;
    Rng& rng_;
    std::vector<double>& importance_;
    DecisionTree tree_;
    double root_size_ = 1.0;
};

}  // namespace

ForestModel train_forest(const FeatureTable& t, const ForestConfig& cfg) {
    t.validate();
    if (cfg.n_trees < 1) throw ValidationError("n_trees must be >= 1");
    if (cfg.min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
    if (t.rows() < 2) throw ValidationError("forest training needs at least 2 samples");
    const auto positives = std::count(t.labels.begin(), t.labels.end(), 1);
    if (positives == 0 || positives == long(t.rows())) throw ValidationError("forest training needs both classes");

    const std::size_t p = t.cols();
    std::size_t mtry = 0;
    if (p > 0) {
        mtry = cfg.features_per_split ? *cfg.features_per_split
                                      : std::max<std::size_t>(1, std::size_t(std::floor(std::sqrt(double(p)))));
        mtry = std::clamp<std::size_t>(mtry, 1, p);
    }

    ForestModel model;
    model.feature_names = t.feature_names;
    model.importances.assign(p, 0.0);
    const std::size_t n = t.rows();
    for (std::size_t tree_index = 0; tree_index < cfg.n_trees; ++tree_index) {
        Rng rng(derive_seed(cfg.seed, tree_index));
        std::vector<std::size_t> samples(n);
        if (cfg.bootstrap) {
            for (auto& s : samples) s = rng.below(n);
        } else {
            std::iota(samples.begin(), samples.end(), 0);
        }
        std::vector<double> tree_importance(p, 0.0);
        TreeBuilder builder(t, cfg, mtry, rng, tree_importance);
        model.trees.push_back(builder.build(std::move(samples)));

        const double total = std::accumulate(tree_importance.begin(), tree_importance.end(), 0.0);
        if (total > 0.0) {
            for (std::size_t f = 0; f < p; ++f) model.importances[f] += tree_importance[f] / total;
        }
    }
    const double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
    if (total > 0.0) {
        for (auto& v : model.importances) v /= total;
    }
    return model;
}

double predict_proba(const ForestModel& model, const FeatureVector& row) {
    std::vector<double> values;
    values.reserve(model.feature_names.size());
    for (const auto& name : model.feature_names) values.push_back(row.at(name));
    return model.predict_row(values);
}

std::vector<std::string> rank_features(const ForestModel& model) {
    std::vector<std::size_t> order(model.feature_names.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (model.importances[a] != model.importances[b]) return model.importances[a] > model.importances[b];
        return model.feature_names[a] < model.feature_names[b];
    });
    std::vector<std::string> out;
    out.reserve(order.size());
    for (auto i : order) out.push_back(model.feature_names[i]);
    return out;
}

}  // namespace radlearn
