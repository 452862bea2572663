#pragma once

#include <vector>

#include "radlearn/volume.hpp"

namespace radlearn {

/// Discretized intensities: 0 outside the mask, [1, n_bins] inside.
struct QuantizedVolume {
    Dims dims;
    std::vector<int> levels;
    int n_bins = 1;

    int at(std::size_t i, std::size_t j, std::size_t k) const { return levels[dims.index(i, j, k)]; }
    bool inside(std::size_t i, std::size_t j, std::size_t k) const { return at(i, j, k) != 0; }
    std::size_t count_inside() const;
};

/// Fixed bin-count discretization over the in-mask intensity range.
/// A constant region maps every in-mask voxel to level 1.
QuantizedVolume quantize_fixed_bins(const Volume& v, const RoiMask& m, int n_bins = 32);

/// Bin index in [1, n_bins] for `x` in [lo, hi].
int quantize_value(double x, double lo, double hi, int n_bins);

}  // namespace radlearn
