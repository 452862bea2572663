#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "radlearn/error.hpp"
#include "radlearn/metrics.hpp"
#include "radlearn/stats.hpp"

using namespace radlearn;

namespace {

std::vector<double> draw(std::mt19937_64& gen, std::size_t n, bool ties) {
    std::uniform_int_distribution<int> small(0, 3);
    std::normal_distribution<double> normal(0, 1);
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(ties ? double(small(gen)) : normal(gen));
    return v;
}

}  // namespace

TEST_CASE("midranks average tied positions") {
    const std::vector<double> v{3, 1, 3, 2};
    CHECK(midranks(v) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("U test on separated triples") {
    const std::vector<double> x{1, 2, 3}, y{4, 5, 6};
    const auto r = mann_whitney_u(x, y);
    CHECK(r.u_statistic == 0.0);
    CHECK(r.method == UTestMethod::Exact);
    // one extreme arrangement per tail among C(6,3) = 20
    CHECK(r.p_value == doctest::Approx(2.0 / 20.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(oracle::exact_u_p(x, y)).epsilon(1e-12));
}

TEST_CASE("U test on identical samples") {
    const std::vector<double> x{1, 2}, y{1, 2};
    const auto r = mann_whitney_u(x, y);
    CHECK(r.u_statistic == 2.0);
    CHECK(r.p_value == 1.0);
    const std::vector<double> z{4, 4, 7, 1, 0};
    CHECK(mann_whitney_u(z, z).u_statistic == 12.5);
}

TEST_CASE("U matches pair counting and exact p matches enumeration") {
    std::mt19937_64 gen(21);
    for (std::size_t n1 = 1; n1 <= 6; ++n1)
        for (std::size_t n2 = 1; n1 + n2 <= 10; ++n2)
            for (int trial = 0; trial < 10; ++trial) {
                const auto x = draw(gen, n1, trial % 2 == 0), y = draw(gen, n2, trial % 2 == 0);
                const auto r = mann_whitney_u(x, y);
                CHECK(r.u_x == oracle::u_pairs(x, y));
                CHECK(r.u_y == oracle::u_pairs(y, x));
                CHECK(r.u_statistic == std::min(r.u_x, r.u_y));
                CHECK(r.p_value == doctest::Approx(oracle::exact_u_p(x, y)).epsilon(1e-12));
            }
}

TEST_CASE("U is invariant under a common strictly increasing transform") {
    std::mt19937_64 gen(22);
    for (int trial = 0; trial < 50; ++trial) {
        auto x = draw(gen, 15, trial % 2), y = draw(gen, 12, trial % 2);
        const auto a = mann_whitney_u(x, y);
        for (double& v : x) v = std::exp(v) * 3 + 1;
        for (double& v : y) v = std::exp(v) * 3 + 1;
        const auto b = mann_whitney_u(x, y);
        CHECK(a.u_statistic == b.u_statistic);
        CHECK(a.p_value == b.p_value);
    }
}

TEST_CASE("normal approximation is close to exact at n1 = n2 = 6") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = draw(gen, 6, false), y = draw(gen, 6, false);
        const double exact = mann_whitney_u(x, y, UTestMethod::Exact).p_value;
        const double approx = mann_whitney_u(x, y, UTestMethod::NormalApprox).p_value;
        CHECK(std::abs(exact - approx) <= 0.05);
    }
}

TEST_CASE("large samples use the normal approximation with p in [0, 1]") {
    std::mt19937_64 gen(24);
    const auto x = draw(gen, 30, true), y = draw(gen, 25, true);
    const auto r = mann_whitney_u(x, y);
    CHECK(r.method == UTestMethod::NormalApprox);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK(r.u_x + r.u_y == 30.0 * 25.0);
    // all values tied: zero variance, nothing to detect
    const std::vector<double> c(20, 1.0);
    CHECK(mann_whitney_u(c, c).p_value == 1.0);
}

TEST_CASE("empty sample is an error") {
    const std::vector<double> x{1}, e;
    CHECK_THROWS_AS(mann_whitney_u(x, e), ValidationError);
}

TEST_CASE("U of positives over negatives equals AUROC") {
    std::mt19937_64 gen(25);
    for (int trial = 0; trial < 100; ++trial) {
        auto scores = draw(gen, 20, trial % 2);
        std::vector<int> labels(20);
        for (int i = 0; i < 20; ++i) labels[i] = i % 3 == 0;
        std::vector<double> pos, neg;
        for (int i = 0; i < 20; ++i) (labels[i] ? pos : neg).push_back(scores[i]);
        const auto r = mann_whitney_u(pos, neg);
        CHECK(auroc(scores, labels) == doctest::Approx(r.u_x / double(pos.size() * neg.size())).epsilon(1e-12));
    }
}

namespace {

FeatureTable two_class_table() {
    FeatureTable t;
    t.feature_names = {"same", "shifted"};
    for (int i = 0; i < 20; ++i) {
        t.sample_ids.push_back("s" + std::to_string(i));
        const int label = i < 10 ? 0 : 1;
        t.labels.push_back(label);
        t.values.push_back({double(i % 10), double(i % 10) + 100.0 * label});
    }
    return t;
}

}  // namespace

TEST_CASE("filter_significant") {
    const auto t = two_class_table();
    const auto r = filter_significant(t, 0.05);
    REQUIRE(r.features.size() == 2);
    CHECK(r.features[0].name == "same");
    CHECK(r.features[0].p_value == 1.0);
    CHECK_FALSE(r.features[0].significant);
    CHECK(r.features[1].significant);
    CHECK(r.significant_names() == std::vector<std::string>{"shifted"});

    // boundary p == alpha is kept
    const auto at = filter_significant(t, r.features[1].p_value);
    CHECK(at.features[1].significant);

    auto single = t;
    for (int& l : single.labels) l = 0;
    CHECK_THROWS_AS(filter_significant(single, 0.05), ValidationError);
}

TEST_CASE("textured phantom contrast is significant with 20 samples per class") {
    PhantomSpec spec;
    spec.n_samples_per_class = 20;
    spec.dims = {12, 12, 12};
    FeatureTable t;
    t.feature_names = {"GLCM.Contrast"};
    for (const auto& s : generate_phantom(spec)) {
        t.sample_ids.push_back(std::to_string(t.rows()));
        t.labels.push_back(s.label);
        t.values.push_back({extract_all(s.volume, s.mask).at("GLCM.Contrast")});
    }
    CHECK(filter_significant(t, 0.05).features[0].significant);
}

TEST_CASE("modality intersection") {
    const auto s = modality_intersection({{"A", {"a", "b"}}, {"B", {"b", "c"}}, {"C", {"b"}}});
    CHECK(s.common == std::set<std::string>{"b"});
    CHECK(s.union_size == 3);
    CHECK(s.pairwise.at({"A", "B"}) == 1);
    CHECK(s.pairwise.size() == 3);

    const auto same = modality_intersection({{"A", {"x", "y"}}, {"B", {"x", "y"}}});
    CHECK(same.common == std::set<std::string>{"x", "y"});
    CHECK(modality_intersection({{"A", {"x"}}, {"B", {"y"}}}).common.empty());
    CHECK_THROWS_AS(modality_intersection({{"A", {"x"}}}), ValidationError);
}
