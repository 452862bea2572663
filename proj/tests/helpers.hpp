#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "oracles.hpp"
#include "radlearn/texture.hpp"
#include "radlearn/volume.hpp"

namespace testing {

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("radlearn_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

/// True when every matrix cell equals the oracle count. Column c of the
/// matrix holds the oracle key c + col_base.
inline bool same_counts(const radlearn::TextureMatrix& m, const oracle::Counts& c, int col_base) {
    long oracle_total = 0;
    for (const auto& [cell, n] : c) {
        const int row = cell.first - 1, col = cell.second - col_base;
        if (row < 0 || row >= m.n_levels || col < 0 || std::size_t(col) >= m.cols) return false;
        if (m(std::size_t(row), std::size_t(col)) != double(n)) return false;
        oracle_total += n;
    }
    return m.total() == double(oracle_total);
}

inline radlearn::Volume make_volume(radlearn::Dims d, std::vector<float> voxels) {
    radlearn::Volume v;
    v.dims = d;
    v.modality = "T2";
    v.voxels = std::move(voxels);
    return v;
}

inline radlearn::RoiMask full_mask(radlearn::Dims d) {
    return radlearn::RoiMask{d, std::vector<std::uint8_t>(d.count(), 1)};
}

inline radlearn::QuantizedVolume quantized(radlearn::Dims d, std::vector<int> levels, int n_bins) {
    radlearn::QuantizedVolume q;
    q.dims = d;
    q.levels = std::move(levels);
    q.n_bins = n_bins;
    return q;
}

}  // namespace testing
