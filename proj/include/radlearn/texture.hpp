#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "radlearn/features.hpp"
#include "radlearn/quantize.hpp"

namespace radlearn {

enum class TextureKind { GLCM, GLRLM, GLSZM, NGTDM, GLDM };

/// Dense texture matrix, row-major. Row r corresponds to gray level r + 1.
/// Column meaning per kind:
///   GLCM   column c is gray level c + 1 (square, n_levels x n_levels)
///   GLRLM  column c is run length c + 1
///   GLSZM  column c is zone size c + 1
///   NGTDM  three columns: n_i, p_i, s_i
///   GLDM   column c is dependence count c (0..26)
struct TextureMatrix {
    TextureKind kind = TextureKind::GLCM;
    int n_levels = 1;
    std::size_t cols = 0;
    std::vector<double> data;

    double operator()(std::size_t row, std::size_t col) const { return data[row * cols + col]; }
    double& operator()(std::size_t row, std::size_t col) { return data[row * cols + col]; }
    double total() const;
};

using Offset = std::array<int, 3>;

/// The 13 unique 3D neighbor directions (one of each +/- pair).
std::span<const Offset> unique_directions();

/// Symmetric co-occurrence counts summed over `directions` scaled by
/// `distance`, normalized to sum 1. When no in-mask pair exists the
/// per-level voxel histogram is placed on the diagonal instead.
TextureMatrix glcm(const QuantizedVolume& q, int distance = 1);
TextureMatrix glcm(const QuantizedVolume& q, int distance, std::span<const Offset> directions);
/// Raw symmetric pair counts, unnormalized.
TextureMatrix glcm_counts(const QuantizedVolume& q, int distance, std::span<const Offset> directions);
FeatureVector glcm_features(const TextureMatrix& m);

/// Run-length counts summed over `directions`; runs stop at the mask boundary.
TextureMatrix glrlm(const QuantizedVolume& q);
TextureMatrix glrlm(const QuantizedVolume& q, std::span<const Offset> directions);
FeatureVector glrlm_features(const TextureMatrix& m);

/// 26-connected equal-level zones.
TextureMatrix glszm(const QuantizedVolume& q);
FeatureVector glszm_features(const TextureMatrix& m);

/// Neighborhood gray-tone differences over in-mask 26-neighbors. Voxels
/// without any in-mask neighbor are excluded.
TextureMatrix ngtdm(const QuantizedVolume& q);
FeatureVector ngtdm_features(const TextureMatrix& m);

/// Dependence = number of in-mask 26-neighbors within `alpha` gray levels.
TextureMatrix gldm(const QuantizedVolume& q, int alpha = 0);
FeatureVector gldm_features(const TextureMatrix& m);

struct ExtractionConfig {
    int n_bins = 32;
    int distance = 1;
    int alpha = 0;
};

/// First-order, shape, and the five texture families: 94 features.
FeatureVector extract_all(const Volume& v, const RoiMask& m, const ExtractionConfig& cfg = {});

struct FamilyInfo {
    std::string name;
    std::size_t count;
};
/// Family names and sizes in extraction order.
const std::vector<FamilyInfo>& feature_families();

}  // namespace radlearn
