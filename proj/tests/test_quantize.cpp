#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "radlearn/error.hpp"
#include "radlearn/quantize.hpp"

using namespace radlearn;

TEST_CASE("constant region maps to level 1") {
    const Volume v = testing::make_volume({2, 2, 2}, std::vector<float>(8, 5.0f));
    const auto q = quantize_fixed_bins(v, testing::full_mask(v.dims), 32);
    for (int l : q.levels) CHECK(l == 1);
}

TEST_CASE("quantize_value follows floor((x - lo) / (hi - lo) * n) + 1 with clamp") {
    const double lo = 0, hi = 8, x = 3;
    const int expected = int(std::floor((x - lo) / (hi - lo) * 4)) + 1;
    CHECK(expected == 2);
    CHECK(quantize_value(x, lo, hi, 4) == expected);
    CHECK(quantize_value(hi, lo, hi, 4) == 4);
    CHECK(quantize_value(lo, lo, hi, 4) == 1);
    CHECK(quantize_value(7.0, 7.0, 7.0, 4) == 1);
}

TEST_CASE("levels cover exactly the mask support") {
    std::mt19937_64 gen(3);
    std::normal_distribution<float> n(0, 1);
    Volume v = testing::make_volume({4, 3, 2}, {});
    for (int i = 0; i < 24; ++i) v.voxels.push_back(n(gen));
    RoiMask m{v.dims, {}};
    for (int i = 0; i < 24; ++i) m.bits.push_back(i % 3 != 0);
    const auto q = quantize_fixed_bins(v, m, 8);
    CHECK(q.count_inside() == m.count());
    for (std::size_t i = 0; i < 24; ++i) {
        if (m.bits[i]) {
            CHECK(q.levels[i] >= 1);
            CHECK(q.levels[i] <= 8);
        } else {
            CHECK(q.levels[i] == 0);
        }
    }
}

TEST_CASE("quantization is monotone and invariant to positive affine maps") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<float> u(-3, 3);
    for (int trial = 0; trial < 50; ++trial) {
        Volume v = testing::make_volume({5, 5, 2}, {});
        for (int i = 0; i < 50; ++i) v.voxels.push_back(u(gen));
        Volume w = v;
        // power-of-two scale and small integer shift keep float arithmetic exact
        for (float& x : w.voxels) x = x * 4.0f + 8.0f;
        const auto m = testing::full_mask(v.dims);
        const auto q = quantize_fixed_bins(v, m, 16);
        CHECK(q.levels == quantize_fixed_bins(w, m, 16).levels);
        for (std::size_t a = 0; a < 50; ++a)
            for (std::size_t b = 0; b < 50; ++b)
                if (v.voxels[a] <= v.voxels[b]) CHECK(q.levels[a] <= q.levels[b]);
    }
}

TEST_CASE("empty mask and bad bin count are errors") {
    const Volume v = testing::make_volume({2, 1, 1}, {1, 2});
    CHECK_THROWS_AS(quantize_fixed_bins(v, RoiMask{v.dims, {0, 0}}, 4), ValidationError);
    CHECK_THROWS_AS(quantize_fixed_bins(v, testing::full_mask(v.dims), 0), ValidationError);
}
