#include "radlearn/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "radlearn/error.hpp"

namespace radlearn {

namespace {

constexpr std::array<Offset, 13> kDirections{{
    {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, -1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1},
    {1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1},
}};

struct Grid {
    const QuantizedVolume& q;
    long nx, ny, nz;

    explicit Grid(const QuantizedVolume& vol)
        : q(vol), nx(long(vol.dims.x)), ny(long(vol.dims.y)), nz(long(vol.dims.z)) {}

    /// Level at (i, j, k), or 0 when out of bounds / outside the mask.
    int level(long i, long j, long k) const {
        if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return 0;
        return q.levels[std::size_t(i + nx * (j + ny * k))];
    }

    template <typename Fn>
    void for_each_inside(Fn&& fn) const {
        for (long k = 0; k < nz; ++k)
            for (long j = 0; j < ny; ++j)
                for (long i = 0; i < nx; ++i)
                    if (int l = level(i, j, k)) fn(i, j, k, l);
    }

    template <typename Fn>
    void for_each_neighbor26(long i, long j, long k, Fn&& fn) const {
        for (int dk = -1; dk <= 1; ++dk)
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0 && dk == 0) continue;
                    if (int l = level(i + di, j + dj, k + dk)) fn(i + di, j + dj, k + dk, l);
                }
    }
};

void require_nonempty(const QuantizedVolume& q) {
    if (q.levels.size() != q.dims.count()) throw ValidationError("quantized volume length does not match dims");
    if (q.count_inside() == 0) throw ValidationError("mask is empty");
    for (int l : q.levels) {
        if (l < 0 || l > q.n_bins) throw ValidationError("gray level out of range");
    }
}

void require_kind(const TextureMatrix& m, TextureKind kind) {
    if (m.kind != kind) throw ValidationError("texture matrix has the wrong kind");
    if (m.data.size() != std::size_t(m.n_levels) * m.cols) throw ValidationError("texture matrix shape mismatch");
}

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

TextureMatrix trim_columns(TextureMatrix m) {
    std::size_t used = 1;
    for (std::size_t r = 0; r < std::size_t(m.n_levels); ++r)
        for (std::size_t c = 0; c < m.cols; ++c)
            if (m(r, c) != 0.0) used = std::max(used, c + 1);
    if (used == m.cols) return m;
    TextureMatrix out{m.kind, m.n_levels, used, std::vector<double>(std::size_t(m.n_levels) * used)};
    for (std::size_t r = 0; r < std::size_t(m.n_levels); ++r)
        for (std::size_t c = 0; c < used; ++c) out(r, c) = m(r, c);
    return out;
}

/// Marginal statistics shared by the run/zone/dependence families.
/// Column c carries the size value `size_of(c)`.
struct SizeStats {
    double total = 0.0;
    double short_emph = 0.0, long_emph = 0.0;
    double gln = 0.0, sn = 0.0;
    double gray_var = 0.0, size_var = 0.0, entropy = 0.0;
    double low_gray = 0.0, high_gray = 0.0;
    double short_low = 0.0, short_high = 0.0, long_low = 0.0, long_high = 0.0;
    double weighted_size_sum = 0.0;
};

template <typename SizeOf>
SizeStats size_stats(const TextureMatrix& m, SizeOf size_of) {
    SizeStats s;
    const std::size_t rows = std::size_t(m.n_levels);
    std::vector<double> row_sum(rows, 0.0), col_sum(m.cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) {
            row_sum[r] += m(r, c);
            col_sum[c] += m(r, c);
        }
    s.total = std::accumulate(row_sum.begin(), row_sum.end(), 0.0);
    if (s.total <= 0.0) throw ValidationError("texture matrix is empty");

    double mu_i = 0.0, mu_j = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double i = double(r + 1);
        for (std::size_t c = 0; c < m.cols; ++c) {
            const double v = m(r, c);
            if (v == 0.0) continue;
            const double j = size_of(c);
            const double p = v / s.total;
            s.short_emph += v / (j * j);
            s.long_emph += v * j * j;
            s.low_gray += v / (i * i);
            s.high_gray += v * i * i;
            s.short_low += v / (i * i * j * j);
            s.short_high += v * i * i / (j * j);
            s.long_low += v * j * j / (i * i);
            s.long_high += v * i * i * j * j;
            s.entropy -= plogp(p);
            mu_i += p * i;
            mu_j += p * j;
            s.weighted_size_sum += v * double(c + 1);
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const double i = double(r + 1);
        for (std::size_t c = 0; c < m.cols; ++c) {
            const double v = m(r, c);
            if (v == 0.0) continue;
            const double p = v / s.total;
            const double j = size_of(c);
            s.gray_var += p * (i - mu_i) * (i - mu_i);
            s.size_var += p * (j - mu_j) * (j - mu_j);
        }
    }
    for (double v : row_sum) s.gln += v * v;
    for (double v : col_sum) s.sn += v * v;
    for (double* x : {&s.short_emph, &s.long_emph, &s.low_gray, &s.high_gray, &s.short_low, &s.short_high,
                      &s.long_low, &s.long_high}) {
        *x /= s.total;
    }
    return s;
}

}  // namespace

double TextureMatrix::total() const { return std::accumulate(data.begin(), data.end(), 0.0); }

std::span<const Offset> unique_directions() { return kDirections; }

const std::vector<FamilyInfo>& feature_families() {
    static const std::vector<FamilyInfo> families{
        {"FirstOrder", 9}, {"Shape2D", 10}, {"GLCM", 24}, {"GLRLM", 16},
        {"GLSZM", 16},     {"NGTDM", 5},    {"GLDM", 14},
    };
    return families;
}

// ---------------------------------------------------------------- GLCM

TextureMatrix glcm_counts(const QuantizedVolume& q, int distance, std::span<const Offset> directions) {
    require_nonempty(q);
    if (distance < 1) throw ValidationError("GLCM distance must be >= 1");
    const Grid g(q);
    const auto n = std::size_t(q.n_bins);
    TextureMatrix m{TextureKind::GLCM, q.n_bins, n, std::vector<double>(n * n, 0.0)};
    g.for_each_inside([&](long i, long j, long k, int a) {
        for (const auto& o : directions) {
            const int b = g.level(i + distance * o[0], j + distance * o[1], k + distance * o[2]);
            if (!b) continue;
            m(std::size_t(a - 1), std::size_t(b - 1)) += 1.0;
            m(std::size_t(b - 1), std::size_t(a - 1)) += 1.0;
        }
    });
    return m;
}

TextureMatrix glcm(const QuantizedVolume& q, int distance, std::span<const Offset> directions) {
    if (q.count_inside() < 2) throw ValidationError("GLCM needs at least 2 in-mask voxels");
    TextureMatrix m = glcm_counts(q, distance, directions);
    double total = m.total();
    if (total == 0.0) {
        for (int l : q.levels)
            if (l) m(std::size_t(l - 1), std::size_t(l - 1)) += 1.0;
        total = m.total();
    }
    for (double& v : m.data) v /= total;
    return m;
}

TextureMatrix glcm(const QuantizedVolume& q, int distance) { return glcm(q, distance, kDirections); }

FeatureVector glcm_features(const TextureMatrix& m) {
    require_kind(m, TextureKind::GLCM);
    const std::size_t ng = std::size_t(m.n_levels);
    if (m.cols != ng) throw ValidationError("GLCM must be square");
    if (std::abs(m.total() - 1.0) > 1e-9) throw ValidationError("GLCM is not normalized");

    std::vector<double> px(ng, 0.0);
    for (std::size_t r = 0; r < ng; ++r)
        for (std::size_t c = 0; c < ng; ++c) px[r] += m(r, c);
    // Symmetric matrix: py == px.
    std::vector<double> p_sum(2 * ng + 1, 0.0), p_diff(ng, 0.0);

    double mu = 0.0;
    for (std::size_t r = 0; r < ng; ++r) mu += double(r + 1) * px[r];

    double autocorr = 0.0, prominence = 0.0, shade = 0.0, tendency = 0.0, contrast = 0.0;
    double energy = 0.0, hxy = 0.0, hxy1 = 0.0, hxy2 = 0.0;
    double idm = 0.0, idmn = 0.0, id = 0.0, idn = 0.0, inv_var = 0.0, max_p = 0.0;
    const double ngd = double(ng);
    for (std::size_t r = 0; r < ng; ++r) {
        const double i = double(r + 1);
        for (std::size_t c = 0; c < ng; ++c) {
            const double j = double(c + 1);
            const double p = m(r, c);
            const double pp = px[r] * px[c];
            if (pp > 0.0) hxy2 -= pp * std::log2(pp);
            if (p == 0.0) continue;
            const double s = i + j - 2.0 * mu;
            const double d = std::abs(i - j);
            p_sum[r + c + 2] += p;
            p_diff[std::size_t(d)] += p;
            autocorr += i * j * p;
            prominence += s * s * s * s * p;
            shade += s * s * s * p;
            tendency += s * s * p;
            contrast += d * d * p;
            energy += p * p;
            hxy -= p * std::log2(p);
            hxy1 -= p * std::log2(pp);
            idm += p / (1.0 + d * d);
            idmn += p / (1.0 + d * d / (ngd * ngd));
            id += p / (1.0 + d);
            idn += p / (1.0 + d / ngd);
            if (r != c) inv_var += p / (d * d);
            max_p = std::max(max_p, p);
        }
    }

    double var = 0.0, hx = 0.0;
    for (std::size_t r = 0; r < ng; ++r) {
        var += (double(r + 1) - mu) * (double(r + 1) - mu) * px[r];
        hx -= plogp(px[r]);
    }
    const double correlation = var > 0.0 ? (autocorr - mu * mu) / var : 1.0;

    double diff_avg = 0.0, diff_entropy = 0.0, diff_var = 0.0;
    for (std::size_t k = 0; k < ng; ++k) {
        diff_avg += double(k) * p_diff[k];
        diff_entropy -= plogp(p_diff[k]);
    }
    for (std::size_t k = 0; k < ng; ++k) diff_var += (double(k) - diff_avg) * (double(k) - diff_avg) * p_diff[k];

    double sum_avg = 0.0, sum_entropy = 0.0;
    for (std::size_t k = 2; k < p_sum.size(); ++k) {
        sum_avg += double(k) * p_sum[k];
        sum_entropy -= plogp(p_sum[k]);
    }

    const double imc1 = hx > 0.0 ? (hxy - hxy1) / hx : 0.0;
    const double imc2 = hxy2 > hxy ? std::sqrt(1.0 - std::exp(-2.0 * (hxy2 - hxy))) : 0.0;

    // MCC: sqrt of the second largest eigenvalue of Q(i,k) = sum_j p(i,j) p(k,j) / (px(i) px(j)).
    // Q is similar to the symmetric D^-1/2 P D^-1 P^T D^-1/2 on the occupied levels.
    std::vector<std::size_t> occupied;
    for (std::size_t r = 0; r < ng; ++r)
        if (px[r] > 0.0) occupied.push_back(r);
    double mcc = 1.0;
    if (occupied.size() >= 2) {
        const auto no = Eigen::Index(occupied.size());
        Eigen::MatrixXd a(no, no);
        for (Eigen::Index r = 0; r < no; ++r)
            for (Eigen::Index c = 0; c < no; ++c)
                a(r, c) = m(occupied[r], occupied[c]) / std::sqrt(px[occupied[r]] * px[occupied[c]]);
        const Eigen::MatrixXd s = a * a.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();  // ascending
        mcc = std::sqrt(std::clamp(ev(no - 2), 0.0, 1.0));
    }

    FeatureVector f;
    const std::string fam = "GLCM";
    f.add(fam, "Autocorrelation", autocorr);
    f.add(fam, "JointAverage", mu);
    f.add(fam, "ClusterProminence", prominence);
    f.add(fam, "ClusterShade", shade);
    f.add(fam, "ClusterTendency", tendency);
    f.add(fam, "Contrast", contrast);
    f.add(fam, "Correlation", correlation);
    f.add(fam, "DifferenceAverage", diff_avg);
    f.add(fam, "DifferenceEntropy", diff_entropy);
    f.add(fam, "DifferenceVariance", diff_var);
    f.add(fam, "JointEnergy", energy);
    f.add(fam, "JointEntropy", hxy);
    f.add(fam, "Imc1", imc1);
    f.add(fam, "Imc2", imc2);
    f.add(fam, "Idm", idm);
    f.add(fam, "Idmn", idmn);
    f.add(fam, "Id", id);
    f.add(fam, "Idn", idn);
    f.add(fam, "InverseVariance", inv_var);
    f.add(fam, "MaximumProbability", max_p);
    f.add(fam, "SumAverage", sum_avg);
    f.add(fam, "SumEntropy", sum_entropy);
    f.add(fam, "SumSquares", var);
    f.add(fam, "MCC", mcc);
    return f;
}

// ---------------------------------------------------------------- GLRLM

TextureMatrix glrlm(const QuantizedVolume& q, std::span<const Offset> directions) {
    require_nonempty(q);
    const Grid g(q);
    const std::size_t max_run = std::max({q.dims.x, q.dims.y, q.dims.z});
    TextureMatrix m{TextureKind::GLRLM, q.n_bins, max_run, std::vector<double>(std::size_t(q.n_bins) * max_run, 0.0)};
    for (const auto& o : directions) {
        g.for_each_inside([&](long i, long j, long k, int l) {
            if (g.level(i - o[0], j - o[1], k - o[2]) == l) return;  // not a run start
            std::size_t len = 1;
            while (g.level(i + long(len) * o[0], j + long(len) * o[1], k + long(len) * o[2]) == l) ++len;
            m(std::size_t(l - 1), len - 1) += 1.0;
        });
    }
    return trim_columns(std::move(m));
}

TextureMatrix glrlm(const QuantizedVolume& q) { return glrlm(q, kDirections); }

FeatureVector glrlm_features(const TextureMatrix& m) {
    require_kind(m, TextureKind::GLRLM);
    const SizeStats s = size_stats(m, [](std::size_t c) { return double(c + 1); });
    FeatureVector f;
    const std::string fam = "GLRLM";
    f.add(fam, "ShortRunEmphasis", s.short_emph);
    f.add(fam, "LongRunEmphasis", s.long_emph);
    f.add(fam, "GrayLevelNonUniformity", s.gln / s.total);
    f.add(fam, "GrayLevelNonUniformityNormalized", s.gln / (s.total * s.total));
    f.add(fam, "RunLengthNonUniformity", s.sn / s.total);
    f.add(fam, "RunLengthNonUniformityNormalized", s.sn / (s.total * s.total));
    f.add(fam, "RunPercentage", s.total / s.weighted_size_sum);
    f.add(fam, "GrayLevelVariance", s.gray_var);
    f.add(fam, "RunVariance", s.size_var);
    f.add(fam, "RunEntropy", s.entropy);
    f.add(fam, "LowGrayLevelRunEmphasis", s.low_gray);
    f.add(fam, "HighGrayLevelRunEmphasis", s.high_gray);
    f.add(fam, "ShortRunLowGrayLevelEmphasis", s.short_low);
    f.add(fam, "ShortRunHighGrayLevelEmphasis", s.short_high);
    f.add(fam, "LongRunLowGrayLevelEmphasis", s.long_low);
    f.add(fam, "LongRunHighGrayLevelEmphasis", s.long_high);
    return f;
}

// ---------------------------------------------------------------- GLSZM

TextureMatrix glszm(const QuantizedVolume& q) {
    require_nonempty(q);
    const Grid g(q);
    const std::size_t n = q.dims.count();
    std::vector<char> visited(n, 0);
    std::vector<std::size_t> sizes_by_level_flat;  // (level, size) pairs
    std::vector<std::array<long, 3>> stack;
    std::size_t max_size = 1;
    auto flat = [&](long i, long j, long k) { return std::size_t(i + g.nx * (j + g.ny * k)); };

    g.for_each_inside([&](long i, long j, long k, int l) {
        if (visited[flat(i, j, k)]) return;
        visited[flat(i, j, k)] = 1;
        stack.assign(1, {i, j, k});
        std::size_t size = 0;
        while (!stack.empty()) {
            const auto [ci, cj, ck] = stack.back();
            stack.pop_back();
            ++size;
            g.for_each_neighbor26(ci, cj, ck, [&](long ni, long nj, long nk, int nl) {
                if (nl != l || visited[flat(ni, nj, nk)]) return;
                visited[flat(ni, nj, nk)] = 1;
                stack.push_back({ni, nj, nk});
            });
        }
        sizes_by_level_flat.push_back(std::size_t(l));
        sizes_by_level_flat.push_back(size);
        max_size = std::max(max_size, size);
    });

    TextureMatrix m{TextureKind::GLSZM, q.n_bins, max_size, std::vector<double>(std::size_t(q.n_bins) * max_size, 0.0)};
    for (std::size_t z = 0; z < sizes_by_level_flat.size(); z += 2) {
        m(sizes_by_level_flat[z] - 1, sizes_by_level_flat[z + 1] - 1) += 1.0;
    }
    return m;
}

FeatureVector glszm_features(const TextureMatrix& m) {
    require_kind(m, TextureKind::GLSZM);
    const SizeStats s = size_stats(m, [](std::size_t c) { return double(c + 1); });
    FeatureVector f;
    const std::string fam = "GLSZM";
    f.add(fam, "SmallAreaEmphasis", s.short_emph);
    f.add(fam, "LargeAreaEmphasis", s.long_emph);
    f.add(fam, "GrayLevelNonUniformity", s.gln / s.total);
    f.add(fam, "GrayLevelNonUniformityNormalized", s.gln / (s.total * s.total));
    f.add(fam, "SizeZoneNonUniformity", s.sn / s.total);
    f.add(fam, "SizeZoneNonUniformityNormalized", s.sn / (s.total * s.total));
    f.add(fam, "ZonePercentage", s.total / s.weighted_size_sum);
    f.add(fam, "GrayLevelVariance", s.gray_var);
    f.add(fam, "ZoneVariance", s.size_var);
    f.add(fam, "ZoneEntropy", s.entropy);
    f.add(fam, "LowGrayLevelZoneEmphasis", s.low_gray);
    f.add(fam, "HighGrayLevelZoneEmphasis", s.high_gray);
    f.add(fam, "SmallAreaLowGrayLevelEmphasis", s.short_low);
    f.add(fam, "SmallAreaHighGrayLevelEmphasis", s.short_high);
    f.add(fam, "LargeAreaLowGrayLevelEmphasis", s.long_low);
    f.add(fam, "LargeAreaHighGrayLevelEmphasis", s.long_high);
    return f;
}

// ---------------------------------------------------------------- NGTDM

TextureMatrix ngtdm(const QuantizedVolume& q) {
    require_nonempty(q);
    const Grid g(q);
    TextureMatrix m{TextureKind::NGTDM, q.n_bins, 3, std::vector<double>(std::size_t(q.n_bins) * 3, 0.0)};
    g.for_each_inside([&](long i, long j, long k, int l) {
        double sum = 0.0;
        int count = 0;
        g.for_each_neighbor26(i, j, k, [&](long, long, long, int nl) {
            sum += nl;
            ++count;
        });
        if (count == 0) return;
        m(std::size_t(l - 1), 0) += 1.0;
        m(std::size_t(l - 1), 2) += std::abs(double(l) - sum / count);
    });
    double n_valid = 0.0;
    for (std::size_t r = 0; r < std::size_t(q.n_bins); ++r) n_valid += m(r, 0);
    if (n_valid > 0.0) {
        for (std::size_t r = 0; r < std::size_t(q.n_bins); ++r) m(r, 1) = m(r, 0) / n_valid;
    }
    return m;
}

FeatureVector ngtdm_features(const TextureMatrix& m) {
    require_kind(m, TextureKind::NGTDM);
    if (m.cols != 3) throw ValidationError("NGTDM must have 3 columns");
    constexpr double kMaxCoarseness = 1e6;
    const std::size_t ng = std::size_t(m.n_levels);

    double nvp = 0.0, sum_s = 0.0, sum_ps = 0.0;
    std::vector<std::size_t> occ;
    for (std::size_t r = 0; r < ng; ++r) {
        nvp += m(r, 0);
        sum_s += m(r, 2);
        sum_ps += m(r, 1) * m(r, 2);
        if (m(r, 1) > 0.0) occ.push_back(r);
    }
    const double ngp = double(occ.size());

    const double coarseness = sum_ps > 0.0 ? std::min(1.0 / sum_ps, kMaxCoarseness) : kMaxCoarseness;
    double contrast = 0.0, busyness = 0.0, complexity = 0.0, strength = 0.0;
    if (occ.size() >= 2) {
        double pair_sq = 0.0, busy_den = 0.0, strength_num = 0.0;
        for (std::size_t a : occ) {
            for (std::size_t b : occ) {
                const double i = double(a + 1), j = double(b + 1);
                const double pi = m(a, 1), pj = m(b, 1);
                pair_sq += pi * pj * (i - j) * (i - j);
                busy_den += std::abs(i * pi - j * pj);
                complexity += std::abs(i - j) * (pi * m(a, 2) + pj * m(b, 2)) / (pi + pj);
                strength_num += (pi + pj) * (i - j) * (i - j);
            }
        }
        contrast = pair_sq / (ngp * (ngp - 1.0)) * (sum_s / nvp);
        busyness = busy_den > 0.0 ? sum_ps / busy_den : 0.0;
        complexity /= nvp;
        strength = sum_s > 0.0 ? strength_num / sum_s : 0.0;
    }

    FeatureVector f;
    const std::string fam = "NGTDM";
    f.add(fam, "Coarseness", coarseness);
    f.add(fam, "Contrast", contrast);
    f.add(fam, "Busyness", busyness);
    f.add(fam, "Complexity", complexity);
    f.add(fam, "Strength", strength);
    return f;
}

// ---------------------------------------------------------------- GLDM

TextureMatrix gldm(const QuantizedVolume& q, int alpha) {
    require_nonempty(q);
    if (alpha < 0) throw ValidationError("GLDM alpha must be >= 0");
    const Grid g(q);
    TextureMatrix m{TextureKind::GLDM, q.n_bins, 27, std::vector<double>(std::size_t(q.n_bins) * 27, 0.0)};
    g.for_each_inside([&](long i, long j, long k, int l) {
        std::size_t dep = 0;
        g.for_each_neighbor26(i, j, k, [&](long, long, long, int nl) {
            if (std::abs(nl - l) <= alpha) ++dep;
        });
        m(std::size_t(l - 1), dep) += 1.0;
    });
    return m;
}

FeatureVector gldm_features(const TextureMatrix& m) {
    require_kind(m, TextureKind::GLDM);
    // Dependence index shifted by +1 so zero-dependence voxels stay finite.
    const SizeStats s = size_stats(m, [](std::size_t c) { return double(c + 1); });
    FeatureVector f;
    const std::string fam = "GLDM";
    f.add(fam, "SmallDependenceEmphasis", s.short_emph);
    f.add(fam, "LargeDependenceEmphasis", s.long_emph);
    f.add(fam, "GrayLevelNonUniformity", s.gln / s.total);
    f.add(fam, "DependenceNonUniformity", s.sn / s.total);
    f.add(fam, "DependenceNonUniformityNormalized", s.sn / (s.total * s.total));
    f.add(fam, "GrayLevelVariance", s.gray_var);
    f.add(fam, "DependenceVariance", s.size_var);
    f.add(fam, "DependenceEntropy", s.entropy);
    f.add(fam, "LowGrayLevelEmphasis", s.low_gray);
    f.add(fam, "HighGrayLevelEmphasis", s.high_gray);
    f.add(fam, "SmallDependenceLowGrayLevelEmphasis", s.short_low);
    f.add(fam, "SmallDependenceHighGrayLevelEmphasis", s.short_high);
    f.add(fam, "LargeDependenceLowGrayLevelEmphasis", s.long_low);
    f.add(fam, "LargeDependenceHighGrayLevelEmphasis", s.long_high);
    return f;
}

// ---------------------------------------------------------------- all

FeatureVector extract_all(const Volume& v, const RoiMask& m, const ExtractionConfig& cfg) {
    FeatureVector f = first_order(v, m);
    f.append(shape_2d(m, v.spacing));
    const QuantizedVolume q = quantize_fixed_bins(v, m, cfg.n_bins);
    f.append(glcm_features(glcm(q, cfg.distance)));
    f.append(glrlm_features(glrlm(q)));
    f.append(glszm_features(glszm(q)));
    f.append(ngtdm_features(ngtdm(q)));
    f.append(gldm_features(gldm(q, cfg.alpha)));
    return f;
}

}  // namespace radlearn
