#include <doctest.h>

#include <random>
#include <set>

#include "radlearn/cluster.hpp"
#include "radlearn/error.hpp"
#include "radlearn/serialize.hpp"

using namespace radlearn;

namespace {

FeatureTable table_of(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns) {
    FeatureTable t;
    t.feature_names = names;
    for (std::size_t i = 0; i < columns[0].size(); ++i) {
        std::vector<double> row;
        for (const auto& c : columns) row.push_back(c[i]);
        t.values.push_back(row);
        t.labels.push_back(int(i % 2));
        t.sample_ids.push_back(std::to_string(i));
    }
    return t;
}

DistanceMatrix matrix(std::vector<std::string> names, std::vector<std::vector<double>> d) {
    return DistanceMatrix{std::move(names), std::move(d)};
}

}  // namespace

TEST_CASE("correlation distance examples") {
    const std::vector<double> f{1, 2, 3}, g{1, 3, 2};
    const auto t = table_of({"f", "g", "twice", "neg", "const"}, {f, g, {2, 4, 6}, {-1, -2, -3}, {5, 5, 5}});
    const auto d = correlation_distance_matrix(t, {"f", "g", "twice", "neg", "const"});
    // pearson([1,2,3],[1,3,2]) = 0.5 by hand
    CHECK(d.d[0][1] == doctest::Approx(0.5));
    CHECK(d.d[0][0] == 0.0);
    CHECK(d.d[0][2] == doctest::Approx(0.0));
    CHECK(d.d[0][3] == doctest::Approx(0.0));
    CHECK(d.d[0][4] == 1.0);
    CHECK(d.d[4][4] == 0.0);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) CHECK(d.d[i][j] == d.d[j][i]);

    FeatureTable one_row = t;
    one_row.values.resize(1);
    one_row.labels.resize(1);
    one_row.sample_ids.resize(1);
    CHECK_THROWS_AS(correlation_distance_matrix(one_row, {"f", "g"}), ValidationError);
}

TEST_CASE("distance matrix is invariant under positive affine maps") {
    std::mt19937_64 gen(41);
    std::normal_distribution<double> nd(0, 1);
    std::vector<std::vector<double>> cols(4, std::vector<double>(25));
    for (auto& c : cols)
        for (double& v : c) v = nd(gen);
    const auto a = correlation_distance_matrix(table_of({"a", "b", "c", "d"}, cols), {"a", "b", "c", "d"});
    for (double& v : cols[2]) v = v * 3.5 + 10;
    const auto b = correlation_distance_matrix(table_of({"a", "b", "c", "d"}, cols), {"a", "b", "c", "d"});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(a.d[i][j] == doctest::Approx(b.d[i][j]).epsilon(1e-12));
}

TEST_CASE("average linkage on three leaves") {
    const auto dg = agglomerate(matrix({"A", "B", "C"}, {{0, 0.1, 0.9}, {0.1, 0, 0.8}, {0.9, 0.8, 0}}));
    REQUIRE(dg.merges.size() == 2);
    CHECK(dg.merges[0].a == 0);
    CHECK(dg.merges[0].b == 1);
    CHECK(dg.merges[0].height == doctest::Approx(0.1));
    CHECK(dg.merges[1].height == doctest::Approx((0.9 + 0.8) / 2));
    CHECK(dg.merges[1].size == 3);
    CHECK(to_json(dg)["merges"].size() == 2);
}

TEST_CASE("two leaves merge once") {
    const auto dg = agglomerate(matrix({"x", "y"}, {{0, 0.3}, {0.3, 0}}));
    REQUIRE(dg.merges.size() == 1);
    CHECK(dg.merges[0].height == 0.3);
}

TEST_CASE("equal distances merge in name order") {
    // leaves stored out of name order on purpose
    const std::vector<std::string> names{"d", "b", "a", "c"};
    std::vector<std::vector<double>> d(4, std::vector<double>(4, 0.5));
    for (int i = 0; i < 4; ++i) d[i][i] = 0;
    const auto dg = agglomerate(matrix(names, d));
    CHECK(names[dg.merges[0].a] + names[dg.merges[0].b] == "ab");
    CHECK(dg.merges[1].height == 0.5);
    const auto again = agglomerate(matrix(names, d));
    for (std::size_t m = 0; m < 3; ++m) {
        CHECK(again.merges[m].a == dg.merges[m].a);
        CHECK(again.merges[m].b == dg.merges[m].b);
    }
}

TEST_CASE("cut at the extremes and on planted pairs") {
    std::mt19937_64 gen(42);
    std::normal_distribution<double> nd(0, 1);
    std::vector<std::vector<double>> base(3, std::vector<double>(40));
    for (auto& c : base)
        for (double& v : c) v = nd(gen);
    std::vector<std::vector<double>> cols;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 2; ++q) {
            auto c = base[p];
            for (double& v : c) v += 0.1 * nd(gen);
            cols.push_back(c);
        }
    const std::vector<std::string> names{"p0a", "p0b", "p1a", "p1b", "p2a", "p2b"};
    const auto dg = agglomerate(correlation_distance_matrix(table_of(names, cols), names));
    for (std::size_t m = 1; m < dg.merges.size(); ++m) CHECK(dg.merges[m].height >= dg.merges[m - 1].height);

    const auto three = cut(dg, 3);
    CHECK(three == std::vector<std::vector<std::string>>{{"p0a", "p0b"}, {"p1a", "p1b"}, {"p2a", "p2b"}});
    CHECK(cut(dg, 1).size() == 1);
    CHECK(cut(dg, 1)[0].size() == 6);
    const auto singles = cut(dg, 6);
    CHECK(singles.size() == 6);
    for (const auto& c : singles) CHECK(c.size() == 1);
    CHECK_THROWS_AS(cut(dg, 0), ValidationError);
    CHECK_THROWS_AS(cut(dg, 7), ValidationError);
}

TEST_CASE("cut partitions the leaves") {
    std::mt19937_64 gen(43);
    std::uniform_real_distribution<double> u(0, 1);
    const std::size_t n = 9;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("f" + std::to_string(i));
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = u(gen);
    const auto dg = agglomerate(matrix(names, d));
    for (std::size_t m = 1; m < dg.merges.size(); ++m) CHECK(dg.merges[m].height >= dg.merges[m - 1].height);
    for (std::size_t k = 1; k <= n; ++k) {
        const auto clusters = cut(dg, k);
        CHECK(clusters.size() == k);
        std::set<std::string> seen;
        std::size_t total = 0;
        for (const auto& c : clusters) {
            total += c.size();
            seen.insert(c.begin(), c.end());
        }
        CHECK(total == n);
        CHECK(seen.size() == n);
    }
}
