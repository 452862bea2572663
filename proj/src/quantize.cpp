#include "radlearn/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radlearn/error.hpp"

namespace radlearn {

std::size_t QuantizedVolume::count_inside() const {
    return static_cast<std::size_t>(std::count_if(levels.begin(), levels.end(), [](int l) { return l != 0; }));
}

int quantize_value(double x, double lo, double hi, int n_bins) {
    if (hi == lo) return 1;
    const double scaled = std::floor((x - lo) / (hi - lo) * n_bins);
    return static_cast<int>(std::clamp(scaled + 1.0, 1.0, static_cast<double>(n_bins)));
}

QuantizedVolume quantize_fixed_bins(const Volume& v, const RoiMask& m, int n_bins) {
    if (n_bins < 1) throw ValidationError("n_bins must be >= 1");
    validate_pair(v, m);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        if (!m.bits[i]) continue;
        lo = std::min(lo, double(v.voxels[i]));
        hi = std::max(hi, double(v.voxels[i]));
    }

    QuantizedVolume q{v.dims, std::vector<int>(v.voxels.size(), 0), n_bins};
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        if (m.bits[i]) q.levels[i] = quantize_value(v.voxels[i], lo, hi, n_bins);
    }
    return q;
}

}  // namespace radlearn
