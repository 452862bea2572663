#include "radlearn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radlearn/error.hpp"

namespace radlearn {

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * double(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

/// Exact null distribution of the x rank sum: all C(n, n1) subsets.
double exact_two_sided_p(const std::vector<double>& ranks, std::size_t n1, double observed_rank_sum) {
    const std::size_t n = ranks.size();
    std::vector<std::size_t> pick(n1);
    std::iota(pick.begin(), pick.end(), 0);
    // Rank sums are multiples of 1/2; compare in half-units to avoid rounding.
    const auto target = std::llround(2.0 * observed_rank_sum);
    std::uint64_t total = 0, le = 0, ge = 0;
    while (true) {
        double sum = 0.0;
        for (auto idx : pick) sum += ranks[idx];
        const auto s = std::llround(2.0 * sum);
        ++total;
        if (s <= target) ++le;
        if (s >= target) ++ge;
        // next combination in lexicographic order
        std::size_t i = n1;
        while (i > 0 && pick[i - 1] == n - n1 + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < n1; ++j) pick[j] = pick[j - 1] + 1;
    }
    const double tail = double(std::min(le, ge)) / double(total);
    return std::min(1.0, 2.0 * tail);
}

double normal_two_sided_p(const std::vector<double>& pooled, std::size_t n1, std::size_t n2, double u_x) {
    const double n = double(n1 + n2);
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = double(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double mean = double(n1) * double(n2) / 2.0;
    const double var = double(n1) * double(n2) / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) return 1.0;
    const double z = (std::abs(u_x - mean) - 0.5) / std::sqrt(var);
    return std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

}  // namespace

UTestResult mann_whitney_u(std::span<const double> x, std::span<const double> y, UTestMethod method) {
    if (x.empty() || y.empty()) throw ValidationError("Mann-Whitney U needs two nonempty samples");
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    for (double v : pooled) {
        if (!std::isfinite(v)) throw ValidationError("Mann-Whitney U sample contains a non-finite value");
    }
    const auto ranks = midranks(pooled);
    const std::size_t n1 = x.size(), n2 = y.size();
    const double rank_sum_x = std::accumulate(ranks.begin(), ranks.begin() + long(n1), 0.0);

    UTestResult r;
    r.method = method;
    r.u_x = rank_sum_x - double(n1) * double(n1 + 1) / 2.0;
    r.u_y = double(n1) * double(n2) - r.u_x;
    r.u_statistic = std::min(r.u_x, r.u_y);
    r.p_value = method == UTestMethod::Exact ? exact_two_sided_p(ranks, n1, rank_sum_x)
                                             : normal_two_sided_p(pooled, n1, n2, r.u_x);
    return r;
}

UTestResult mann_whitney_u(std::span<const double> x, std::span<const double> y) {
    const auto method = x.size() + y.size() <= kExactUTestLimit ? UTestMethod::Exact : UTestMethod::NormalApprox;
    return mann_whitney_u(x, y, method);
}

std::vector<std::string> SignificanceReport::significant_names() const {
    std::vector<std::string> out;
    for (const auto& f : features)
        if (f.significant) out.push_back(f.name);
    return out;
}

SignificanceReport filter_significant(const FeatureTable& t, double alpha) {
    t.validate();
    std::vector<std::size_t> idx0, idx1;
    for (std::size_t r = 0; r < t.rows(); ++r) (t.labels[r] ? idx1 : idx0).push_back(r);
    if (idx0.empty() || idx1.empty()) throw ValidationError("significance filtering needs both classes");

    SignificanceReport report{alpha, {}};
    for (std::size_t c = 0; c < t.cols(); ++c) {
        std::vector<double> x, y;
        for (auto r : idx0) x.push_back(t.values[r][c]);
        for (auto r : idx1) y.push_back(t.values[r][c]);
        const auto u = mann_whitney_u(x, y);
        report.features.push_back({t.feature_names[c], u.p_value, u.u_statistic, u.p_value <= alpha});
    }
    return report;
}

IntersectionSummary modality_intersection(const std::map<std::string, std::set<std::string>>& sets) {
    if (sets.size() < 2) throw ValidationError("modality intersection needs at least 2 modalities");
    IntersectionSummary s;
    std::set<std::string> all;
    for (auto a = sets.begin(); a != sets.end(); ++a) {
        all.insert(a->second.begin(), a->second.end());
        for (auto b = std::next(a); b != sets.end(); ++b) {
            std::vector<std::string> common;
            std::set_intersection(a->second.begin(), a->second.end(), b->second.begin(), b->second.end(),
                                  std::back_inserter(common));
            s.pairwise[{a->first, b->first}] = common.size();
        }
    }
    s.common = sets.begin()->second;
    for (const auto& [name, set] : sets) {
        std::set<std::string> next;
        std::set_intersection(s.common.begin(), s.common.end(), set.begin(), set.end(), std::inserter(next, next.end()));
        s.common = std::move(next);
    }
    s.union_size = all.size();
    return s;
}

}  // namespace radlearn
