#include "radlearn/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "radlearn/error.hpp"
#include "radlearn/quantize.hpp"

namespace radlearn {

void FeatureVector::add(std::string family_prefix, const std::string& name, double value) {
    family_prefix += '.';
    family_prefix += name;
    entries.emplace_back(std::move(family_prefix), value);
}

std::optional<double> FeatureVector::get(const std::string& name) const {
    for (const auto& [n, v] : entries) {
        if (n == name) return v;
    }
    return std::nullopt;
}

double FeatureVector::at(const std::string& name) const {
    if (auto v = get(name)) return *v;
    throw ValidationError("missing feature " + name);
}

void FeatureVector::append(const FeatureVector& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

std::size_t FeatureTable::column_index(const std::string& name) const {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) throw ValidationError("unknown feature " + name);
    return static_cast<std::size_t>(it - feature_names.begin());
}

std::vector<double> FeatureTable::column(std::size_t c) const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& row : values) out.push_back(row[c]);
    return out;
}

FeatureTable FeatureTable::select(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(column_index(n));
    FeatureTable out{sample_ids, names, {}, labels};
    out.values.reserve(values.size());
    for (const auto& row : values) {
        std::vector<double> r;
        r.reserve(idx.size());
        for (auto c : idx) r.push_back(row[c]);
        out.values.push_back(std::move(r));
    }
    return out;
}

void FeatureTable::validate() const {
    if (sample_ids.size() != values.size() || labels.size() != values.size()) {
        throw ValidationError("feature table row, label and sample id counts differ");
    }
    for (const auto& row : values) {
        if (row.size() != feature_names.size()) throw ValidationError("ragged feature table row");
    }
    std::set<std::string> seen;
    for (const auto& n : feature_names) {
        if (!seen.insert(n).second) throw ValidationError("duplicate feature name " + n);
    }
    for (int l : labels) {
        if (l != 0 && l != 1) throw ValidationError("labels must be 0 or 1");
    }
}

FeatureVector first_order(const Volume& v, const RoiMask& m) {
    validate_pair(v, m);
    std::vector<double> x;
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        if (m.bits[i]) x.push_back(v.voxels[i]);
    }
    const double n = static_cast<double>(x.size());

    double sum = 0.0, energy = 0.0;
    for (double xi : x) {
        sum += xi;
        energy += xi * xi;
    }
    const double mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double xi : x) {
        const double d = xi - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    const double kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;

    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    const double lo = sorted.front(), hi = sorted.back();

    constexpr int kEntropyBins = 32;
    std::vector<double> hist(kEntropyBins + 1, 0.0);
    for (double xi : x) hist[quantize_value(xi, lo, hi, kEntropyBins)] += 1.0;
    double entropy = 0.0;
    for (double c : hist) {
        if (c > 0.0) entropy -= (c / n) * std::log2(c / n);
    }

    FeatureVector f;
    const std::string fam = "FirstOrder";
    f.add(fam, "Mean", mean);
    f.add(fam, "Median", median);
    f.add(fam, "Variance", m2);
    f.add(fam, "Skewness", skewness);
    f.add(fam, "Kurtosis", kurtosis);
    f.add(fam, "Energy", energy);
    f.add(fam, "Entropy", entropy);
    f.add(fam, "Minimum", lo);
    f.add(fam, "Maximum", hi);
    return f;
}

std::size_t largest_axial_slice(const RoiMask& m) {
    std::size_t best = 0, best_count = 0;
    for (std::size_t k = 0; k < m.dims.z; ++k) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < m.dims.y; ++j) {
            for (std::size_t i = 0; i < m.dims.x; ++i) c += m.at(i, j, k) ? 1 : 0;
        }
        if (c > best_count) {
            best = k;
            best_count = c;
        }
    }
    return best;
}

FeatureVector shape_2d(const RoiMask& m, const std::array<double, 3>& spacing) {
    validate(m);
    if (m.count() == 0) throw ValidationError("mask is empty");
    const std::size_t k = largest_axial_slice(m);
    const double sx = spacing[0], sy = spacing[1];
    const auto nx = static_cast<long>(m.dims.x), ny = static_cast<long>(m.dims.y);
    auto in = [&](long i, long j) {
        return i >= 0 && j >= 0 && i < nx && j < ny && m.at(std::size_t(i), std::size_t(j), k);
    };

    std::size_t count = 0;
    double perimeter = 0.0;
    double mx = 0.0, my = 0.0;
    std::vector<std::array<double, 2>> boundary;
    for (long j = 0; j < ny; ++j) {
        for (long i = 0; i < nx; ++i) {
            if (!in(i, j)) continue;
            ++count;
            mx += double(i) * sx;
            my += double(j) * sy;
            const int open_x = int(!in(i - 1, j)) + int(!in(i + 1, j));
            const int open_y = int(!in(i, j - 1)) + int(!in(i, j + 1));
            // Faces crossed stepping in x are parallel to y, and vice versa.
            perimeter += open_x * sy + open_y * sx;
            if (open_x + open_y > 0) boundary.push_back({double(i) * sx, double(j) * sy});
        }
    }
    const double n = static_cast<double>(count);
    mx /= n;
    my /= n;

    double cxx = 0.0, cyy = 0.0, cxy = 0.0;
    for (long j = 0; j < ny; ++j) {
        for (long i = 0; i < nx; ++i) {
            if (!in(i, j)) continue;
            const double dx = double(i) * sx - mx, dy = double(j) * sy - my;
            cxx += dx * dx;
            cyy += dy * dy;
            cxy += dx * dy;
        }
    }
    cxx /= n;
    cyy /= n;
    cxy /= n;
    const double half_trace = 0.5 * (cxx + cyy);
    const double disc = std::sqrt(std::max(0.0, 0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy));
    const double lambda_major = half_trace + disc;
    const double lambda_minor = std::max(0.0, half_trace - disc);

    double max_d2 = 0.0;
    for (std::size_t a = 0; a < boundary.size(); ++a) {
        for (std::size_t b = a + 1; b < boundary.size(); ++b) {
            const double dx = boundary[a][0] - boundary[b][0], dy = boundary[a][1] - boundary[b][1];
            max_d2 = std::max(max_d2, dx * dx + dy * dy);
        }
    }

    const double area = n * sx * sy;
    const double sphericity = 2.0 * std::sqrt(std::numbers::pi * area) / perimeter;

    FeatureVector f;
    const std::string fam = "Shape2D";
    f.add(fam, "PixelSurface", area);
    f.add(fam, "Perimeter", perimeter);
    f.add(fam, "PerimeterSurfaceRatio", perimeter / area);
    f.add(fam, "Sphericity", sphericity);
    f.add(fam, "SphericalDisproportion", 1.0 / sphericity);
    f.add(fam, "MaximumDiameter", std::sqrt(max_d2));
    f.add(fam, "MajorAxisLength", 4.0 * std::sqrt(lambda_major));
    f.add(fam, "MinorAxisLength", 4.0 * std::sqrt(lambda_minor));
    f.add(fam, "Elongation", lambda_major > 0.0 ? std::sqrt(lambda_minor / lambda_major) : 1.0);
    // Pixel-grid convention: the mesh surface is the pixel area.
    f.add(fam, "MeshSurface", area);
    return f;
}

}  // namespace radlearn
