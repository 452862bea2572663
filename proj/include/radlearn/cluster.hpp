#pragma once

#include <string>
#include <vector>

#include "radlearn/features.hpp"

namespace radlearn {

struct DistanceMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> d;
};

/// d(f, g) = 1 - |pearson(f, g)|; a zero-variance feature sits at distance 1 from every other.
DistanceMatrix correlation_distance_matrix(const FeatureTable& t, const std::vector<std::string>& names);

enum class Linkage { Average };

struct Merge {
    std::size_t a = 0;  // node ids: leaves 0..n-1, merge m creates node n+m
    std::size_t b = 0;
    double height = 0.0;
    std::size_t size = 0;
};

struct Dendrogram {
    std::vector<std::string> leaf_names;
    std::vector<Merge> merges;
};

/// Average-linkage agglomeration. Equal minimum distances are resolved by the
/// lexicographically smallest pair of cluster representatives (each
/// cluster's smallest leaf name).
Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage = Linkage::Average);

/// The k clusters left after undoing the last k - 1 merges, members sorted,
/// clusters ordered by their smallest member.
std::vector<std::vector<std::string>> cut(const Dendrogram& dg, std::size_t k);

}  // namespace radlearn
