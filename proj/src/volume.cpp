#include "radlearn/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "radlearn/error.hpp"
#include "radlearn/random.hpp"

namespace radlearn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path with_suffix(const fs::path& base, const char* suffix) {
    fs::path p = base;
    p += suffix;
    return p;
}

std::vector<char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

void check_dims(const Dims& d) {
    if (d.x < 1 || d.y < 1 || d.z < 1) throw ValidationError("dims must all be >= 1");
}

}  // namespace

std::size_t RoiMask::count() const {
    return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

void validate(const Volume& v) {
    check_dims(v.dims);
    if (v.voxels.size() != v.dims.count()) throw ValidationError("voxel count does not match dims");
    for (double s : v.spacing) {
        if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("spacing must be positive and finite");
    }
    if (!std::all_of(v.voxels.begin(), v.voxels.end(), [](float f) { return std::isfinite(f); })) {
        throw ValidationError("volume contains a non-finite voxel");
    }
}

void validate(const RoiMask& m) {
    check_dims(m.dims);
    if (m.bits.size() != m.dims.count()) throw ValidationError("mask length does not match dims");
    if (!std::all_of(m.bits.begin(), m.bits.end(), [](std::uint8_t b) { return b <= 1; })) {
        throw ValidationError("mask values must be 0 or 1");
    }
}

void validate_pair(const Volume& v, const RoiMask& m) {
    validate(v);
    validate(m);
    if (!(v.dims == m.dims)) throw ValidationError("mask dims differ from volume dims");
    if (m.count() == 0) throw ValidationError("mask is empty");
}

void save_volume(const Volume& v, const fs::path& base) {
    validate(v);
    json header = {
        {"dims", {v.dims.x, v.dims.y, v.dims.z}},
        {"spacing", {v.spacing[0], v.spacing[1], v.spacing[2]}},
        {"dtype", "f32le"},
        {"modality", v.modality},
    };
    std::ofstream out(with_suffix(base, ".json"), std::ios::trunc);
    if (!out) throw IoError("cannot open " + with_suffix(base, ".json").string() + " for writing");
    out << header.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + with_suffix(base, ".json").string());

    std::vector<char> raw(v.voxels.size() * 4);
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(v.voxels[i]);
        for (int b = 0; b < 4; ++b) raw[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
    write_bytes(with_suffix(base, ".raw"), raw);
}

Volume load_volume(const fs::path& base) {
    const auto header_path = with_suffix(base, ".json");
    std::ifstream in(header_path);
    if (!in) throw IoError("cannot open " + header_path.string());
    Volume v;
    try {
        const json header = json::parse(in);
        if (header.at("dtype").get<std::string>() != "f32le") throw ValidationError("unsupported dtype");
        const auto dims = header.at("dims").get<std::vector<long long>>();
        const auto spacing = header.at("spacing").get<std::vector<double>>();
        if (dims.size() != 3 || spacing.size() != 3) throw ValidationError("dims and spacing need 3 entries");
        if (std::any_of(dims.begin(), dims.end(), [](long long d) { return d < 1; })) {
            throw ValidationError("dims must all be >= 1");
        }
        v.dims = {static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                  static_cast<std::size_t>(dims[2])};
        v.spacing = {spacing[0], spacing[1], spacing[2]};
        v.modality = header.at("modality").get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError("malformed volume header " + header_path.string() + ": " + e.what());
    }

    const auto raw = read_bytes(with_suffix(base, ".raw"));
    if (raw.size() != v.dims.count() * 4) {
        throw ValidationError("raw length " + std::to_string(raw.size()) + " does not match header (" +
                              std::to_string(v.dims.count() * 4) + " bytes expected)");
    }
    v.voxels.resize(v.dims.count());
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(raw[4 * i + b])) << (8 * b);
        v.voxels[i] = std::bit_cast<float>(bits);
    }
    validate(v);
    return v;
}

void save_mask(const RoiMask& m, const fs::path& base) {
    validate(m);
    write_bytes(with_suffix(base, ".mask.raw"), std::vector<char>(m.bits.begin(), m.bits.end()));
}

RoiMask load_mask(const fs::path& base, const Dims& dims) {
    check_dims(dims);
    const auto raw = read_bytes(with_suffix(base, ".mask.raw"));
    if (raw.size() != dims.count()) throw ValidationError("mask length does not match dims");
    RoiMask m{dims, std::vector<std::uint8_t>(raw.begin(), raw.end())};
    validate(m);
    return m;
}

PhantomSample render_phantom_sample(const PhantomSpec& spec, int label, std::uint64_t sample_seed) {
    const Dims& d = spec.dims;
    if (d.x < 8 || d.y < 8 || d.z < 8) throw ValidationError("phantom dims must be >= 8 per axis");
    if (label != 0 && label != 1) throw ValidationError("label must be 0 or 1");

    Rng rng(sample_seed);
    const std::array<double, 3> extent{double(d.x), double(d.y), double(d.z)};
    std::array<double, 3> center{};
    std::array<double, 3> semi{};
    for (int a = 0; a < 3; ++a) {
        center[a] = (extent[a] - 1.0) / 2.0 + (rng.uniform() - 0.5);
        semi[a] = extent[a] * (0.30 + 0.05 * rng.uniform());
    }
    const double peak = 4.0 + rng.uniform();

    PhantomSample s;
    s.label = label;
    s.volume.dims = d;
    s.volume.modality = spec.modality;
    s.volume.voxels.resize(d.count());
    s.mask.dims = d;
    s.mask.bits.assign(d.count(), 0);

    for (std::size_t k = 0; k < d.z; ++k) {
        for (std::size_t j = 0; j < d.y; ++j) {
            for (std::size_t i = 0; i < d.x; ++i) {
                const double dx = (double(i) - center[0]) / semi[0];
                const double dy = (double(j) - center[1]) / semi[1];
                const double dz = (double(k) - center[2]) / semi[2];
                const double r2 = dx * dx + dy * dy + dz * dz;
                const std::size_t idx = d.index(i, j, k);
                double value = 0.0;
                if (r2 <= 1.0) {
                    s.mask.bits[idx] = 1;
                    value = 100.0 + peak * (1.0 - r2);
                    if (label == 1) value += spec.texture_amplitude * (((i + j + k) % 2 == 0) ? 1.0 : -1.0);
                }
                value += spec.noise_sigma * rng.normal();
                s.volume.voxels[idx] = static_cast<float>(value);
            }
        }
    }
    return s;
}

std::vector<PhantomSample> generate_phantom(const PhantomSpec& spec) {
    if (spec.n_samples_per_class < 1) throw ValidationError("n_samples_per_class must be >= 1");
    if (!(spec.texture_amplitude >= 0.0) || !(spec.noise_sigma >= 0.0)) {
        throw ValidationError("texture_amplitude and noise_sigma must be >= 0");
    }
    std::vector<PhantomSample> out;
    out.reserve(2 * spec.n_samples_per_class);
    for (int label = 0; label < 2; ++label) {
        for (std::size_t n = 0; n < spec.n_samples_per_class; ++n) {
            const auto stream = static_cast<std::uint64_t>(label) * spec.n_samples_per_class + n;
            out.push_back(render_phantom_sample(spec, label, derive_seed(spec.seed, stream)));
        }
    }
    return out;
}

}  // namespace radlearn
