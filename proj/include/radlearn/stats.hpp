#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radlearn/features.hpp"

namespace radlearn {

enum class UTestMethod { Exact, NormalApprox };

/// Pooled sizes up to this use exact enumeration under `UTestMethod` auto-selection.
inline constexpr std::size_t kExactUTestLimit = 12;

struct UTestResult {
    double u_statistic = 0.0;  // min(u_x, u_y)
    double u_x = 0.0;          // pairs (x, y) with x > y, ties counted 1/2
    double u_y = 0.0;
    double p_value = 1.0;      // two-sided
    UTestMethod method = UTestMethod::Exact;
};

/// Midranks (1-based, ties averaged) of `values`.
std::vector<double> midranks(std::span<const double> values);

/// Two-sided Mann-Whitney U test. Exact enumeration when |x| + |y| <= 12,
/// otherwise the tie-corrected normal approximation with continuity correction.
UTestResult mann_whitney_u(std::span<const double> x, std::span<const double> y);
UTestResult mann_whitney_u(std::span<const double> x, std::span<const double> y, UTestMethod method);

struct FeatureSignificance {
    std::string name;
    double p_value = 1.0;
    double u_statistic = 0.0;
    bool significant = false;
};

struct SignificanceReport {
    double alpha = 0.05;
    std::vector<FeatureSignificance> features;

    std::vector<std::string> significant_names() const;
};

/// Class-0 vs class-1 U test per feature; p <= alpha is significant.
SignificanceReport filter_significant(const FeatureTable& t, double alpha = 0.05);

struct IntersectionSummary {
    std::map<std::pair<std::string, std::string>, std::size_t> pairwise;
    std::set<std::string> common;
    std::size_t union_size = 0;
};

IntersectionSummary modality_intersection(const std::map<std::string, std::set<std::string>>& sets);

}  // namespace radlearn
