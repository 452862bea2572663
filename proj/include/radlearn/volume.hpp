#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace radlearn {

/// Grid extent in voxels, x-fastest storage.
struct Dims {
    std::size_t x = 1;
    std::size_t y = 1;
    std::size_t z = 1;

    std::size_t count() const { return x * y * z; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + x * (j + y * k); }
    bool operator==(const Dims&) const = default;
};

struct Volume {
    Dims dims;
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    std::string modality;
    std::vector<float> voxels;

    float at(std::size_t i, std::size_t j, std::size_t k) const { return voxels[dims.index(i, j, k)]; }
};

struct RoiMask {
    Dims dims;
    std::vector<std::uint8_t> bits;

    bool at(std::size_t i, std::size_t j, std::size_t k) const { return bits[dims.index(i, j, k)] != 0; }
    std::size_t count() const;
};

/// Throws ValidationError if dims, length or finiteness invariants fail.
void validate(const Volume& v);
void validate(const RoiMask& m);
/// Mask must match the volume's dims and select at least one voxel.
void validate_pair(const Volume& v, const RoiMask& m);

// <base>.json header + <base>.raw (f32 little-endian, x-fastest).
void save_volume(const Volume& v, const std::filesystem::path& base);
Volume load_volume(const std::filesystem::path& base);

// <base>.mask.raw, one byte (0/1) per voxel.
void save_mask(const RoiMask& m, const std::filesystem::path& base);
RoiMask load_mask(const std::filesystem::path& base, const Dims& dims);

struct PhantomSpec {
    std::size_t n_samples_per_class = 10;
    Dims dims{32, 32, 32};
    double texture_amplitude = 2.0;
    double noise_sigma = 0.1;
    std::uint64_t seed = 0;
    std::string modality = "T2";
};

struct PhantomSample {
    Volume volume;
    RoiMask mask;
    int label = 0;
};

/// One sample drawn from `sample_seed`. Blob geometry and noise depend only
/// on the seed, so labels 0 and 1 rendered from one seed differ only by the
/// texture term.
PhantomSample render_phantom_sample(const PhantomSpec& spec, int label, std::uint64_t sample_seed);

/// All class-0 samples followed by all class-1 samples.
std::vector<PhantomSample> generate_phantom(const PhantomSpec& spec);

}  // namespace radlearn
