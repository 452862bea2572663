#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "radlearn/error.hpp"
#include "radlearn/metrics.hpp"
#include "radlearn/rfe.hpp"
#include "radlearn/serialize.hpp"

using namespace radlearn;

namespace {

FeatureTable mixed_table(std::size_t n, std::size_t informative, std::size_t noise, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0, 1);
    FeatureTable t;
    for (std::size_t f = 0; f < informative; ++f) t.feature_names.push_back("inf" + std::to_string(f));
    for (std::size_t f = 0; f < noise; ++f) t.feature_names.push_back("noise" + std::to_string(f));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        double s = 0;
        for (std::size_t f = 0; f < informative + noise; ++f) {
            row.push_back(nd(gen));
            if (f < informative) s += row.back();
        }
        t.sample_ids.push_back(std::to_string(i));
        t.values.push_back(row);
        t.labels.push_back(s > 0 ? 1 : 0);
    }
    return t;
}

ForestConfig small_forest() {
    ForestConfig cfg;
    cfg.n_trees = 15;
    cfg.seed = 2;
    return cfg;
}

}  // namespace

TEST_CASE("three features give three shrinking steps") {
    const auto t = mixed_table(30, 2, 1, 1);
    RfeConfig rc;
    rc.k_folds = 3;
    const auto tr = rfe_cv(t, small_forest(), rc);
    REQUIRE(tr.steps.size() == 3);
    CHECK(tr.steps[0].subset.size() == 2);
    CHECK(tr.steps[1].subset.size() == 1);
    CHECK(tr.steps[2].subset.empty());
    auto reversed = tr.initial_ranking;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(tr.eliminated_order == reversed);

    std::size_t ones = 0;
    for (int l : t.labels) ones += std::size_t(l);
    const double majority = double(std::max(ones, t.rows() - ones)) / double(t.rows());
    CHECK(tr.steps[2].cv_accuracy == doctest::Approx(majority));
}

TEST_CASE("single feature gives one empty step") {
    const auto t = mixed_table(20, 1, 0, 2);
    RfeConfig rc;
    rc.k_folds = 2;
    const auto tr = rfe_cv(t, small_forest(), rc);
    REQUIRE(tr.steps.size() == 1);
    CHECK(tr.steps[0].subset.empty());
}

TEST_CASE("trace bookkeeping and determinism") {
    const auto t = mixed_table(40, 3, 5, 3);
    RfeConfig rc;
    rc.k_folds = 4;
    rc.seed = 11;
    const auto tr = rfe_cv(t, small_forest(), rc);
    REQUIRE(tr.steps.size() == 8);
    std::set<std::string> prev(t.feature_names.begin(), t.feature_names.end());
    for (std::size_t s = 0; s < tr.steps.size(); ++s) {
        const std::set<std::string> cur(tr.steps[s].subset.begin(), tr.steps[s].subset.end());
        CHECK(cur.size() == 8 - s - 1);
        CHECK(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
        CHECK(cur.count(tr.eliminated_order[s]) == 0);
        CHECK(prev.count(tr.eliminated_order[s]) == 1);
        prev = cur;
    }
    CHECK(to_json(rfe_cv(t, small_forest(), rc)).dump() == to_json(tr).dump());
    CHECK(to_json(rfe_trace_from_json(to_json(tr))).dump() == to_json(tr).dump());

    rc.rerank_each_step = true;
    const auto rr = rfe_cv(t, small_forest(), rc);
    CHECK(rr.steps.size() == 8);
    CHECK(rr.steps.back().subset.empty());
}

TEST_CASE("select_best picks max accuracy, then smaller subset, then earlier step") {
    RfeTrace tr;
    tr.steps = {{{"a", "b"}, 0.6}, {{"a"}, 0.7}, {{}, 0.5}};
    CHECK(select_best(tr).subset == std::vector<std::string>{"a"});

    RfeTrace tie;
    for (int size = 9; size >= 0; --size) {
        std::vector<std::string> subset;
        for (int i = 0; i < size; ++i) subset.push_back("f" + std::to_string(i));
        tie.steps.push_back({subset, size == 8 || size == 3 ? 0.7 : 0.4});
    }
    CHECK(select_best(tie).subset.size() == 3);
    CHECK_THROWS_AS(select_best(RfeTrace{}), ValidationError);
}

TEST_CASE("cv_accuracy of a perfectly separable feature is 1") {
    FeatureTable t;
    t.feature_names = {"x"};
    for (int i = 0; i < 20; ++i) {
        t.sample_ids.push_back(std::to_string(i));
        t.labels.push_back(i % 2);
        t.values.push_back({double(i % 2) * 10 + i * 0.01});
    }
    const auto folds = stratified_kfold(t.labels, 5, 0);
    CHECK(cv_accuracy(t, {"x"}, small_forest(), folds) == 1.0);
    const auto proba = cv_probabilities(t, small_forest(), folds);
    for (std::size_t i = 0; i < t.rows(); ++i) CHECK((proba[i] > 0.5) == (t.labels[i] == 1));
}

TEST_CASE("rfe rejects classes smaller than k") {
    const auto t = mixed_table(6, 1, 1, 4);
    RfeConfig rc;
    rc.k_folds = 5;
    CHECK_THROWS_AS(rfe_cv(t, small_forest(), rc), ValidationError);
}
