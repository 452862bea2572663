#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "radlearn/volume.hpp"

namespace radlearn {

/// One sample's named features, "Family.Feature" names, insertion-ordered.
struct FeatureVector {
    std::vector<std::pair<std::string, double>> entries;

    void add(std::string family_prefix, const std::string& name, double value);
    std::size_t size() const { return entries.size(); }
    std::optional<double> get(const std::string& name) const;
    /// Throws ValidationError when the name is absent.
    double at(const std::string& name) const;
    void append(const FeatureVector& other);
};

/// Samples x features matrix plus binary labels.
struct FeatureTable {
    std::vector<std::string> sample_ids;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> values;  // row-major, one row per sample
    std::vector<int> labels;

    std::size_t rows() const { return values.size(); }
    std::size_t cols() const { return feature_names.size(); }
    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(std::size_t c) const;
    /// Table restricted to the named columns, in the given order.
    FeatureTable select(const std::vector<std::string>& names) const;
    /// Throws ValidationError on ragged rows, duplicate names, non-binary labels.
    void validate() const;
};

/// Mean, Median, Variance, Skewness, Kurtosis, Energy, Entropy, Minimum, Maximum.
FeatureVector first_order(const Volume& v, const RoiMask& m);

/// 2D shape descriptors on the axial slice with the largest mask area.
FeatureVector shape_2d(const RoiMask& m, const std::array<double, 3>& spacing = {1.0, 1.0, 1.0});

/// Axial slice index used by shape_2d (largest area, lowest z on ties).
std::size_t largest_axial_slice(const RoiMask& m);

}  // namespace radlearn
