#include "radlearn/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radlearn/error.hpp"

namespace radlearn {

DistanceMatrix correlation_distance_matrix(const FeatureTable& t, const std::vector<std::string>& names) {
    if (t.rows() < 2) throw ValidationError("correlation distance needs at least 2 samples");
    const std::size_t p = names.size();
    std::vector<std::vector<double>> centered(p);
    std::vector<double> norm(p, 0.0);
    for (std::size_t f = 0; f < p; ++f) {
        auto col = t.column(t.column_index(names[f]));
        const double mean = std::accumulate(col.begin(), col.end(), 0.0) / double(col.size());
        for (auto& v : col) {
            v -= mean;
            norm[f] += v * v;
        }
        norm[f] = std::sqrt(norm[f]);
        centered[f] = std::move(col);
    }

    DistanceMatrix out{names, std::vector<std::vector<double>>(p, std::vector<double>(p, 0.0))};
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a + 1; b < p; ++b) {
            double d = 1.0;
            if (norm[a] > 0.0 && norm[b] > 0.0) {
                double dot = 0.0;
                for (std::size_t r = 0; r < centered[a].size(); ++r) dot += centered[a][r] * centered[b][r];
                const double rho = std::clamp(dot / (norm[a] * norm[b]), -1.0, 1.0);
                d = 1.0 - std::abs(rho);
            }
            out.d[a][b] = out.d[b][a] = d;
        }
    }
    return out;
}

Dendrogram agglomerate(const DistanceMatrix& dist, Linkage) {
    const std::size_t n = dist.names.size();
    if (dist.d.size() != n) throw ValidationError("distance matrix shape mismatch");
    for (const auto& row : dist.d) {
        if (row.size() != n) throw ValidationError("distance matrix shape mismatch");
    }

    struct Cluster {
        std::size_t node;
        std::size_t size;
        std::string rep;
    };
    std::vector<Cluster> active;
    for (std::size_t i = 0; i < n; ++i) active.push_back({i, 1, dist.names[i]});
    std::vector<std::vector<double>> d = dist.d;  // indexed by position in `active`

    Dendrogram dg{dist.names, {}};
    while (active.size() > 1) {
        std::size_t ba = 0, bb = 1;
        auto key = [&](std::size_t x, std::size_t y) {
            return std::minmax(active[x].rep, active[y].rep);
        };
        for (std::size_t x = 0; x < active.size(); ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                if (d[x][y] < d[ba][bb] || (d[x][y] == d[ba][bb] && key(x, y) < key(ba, bb))) {
                    ba = x;
                    bb = y;
                }
            }
        }
        if (active[bb].rep < active[ba].rep) std::swap(ba, bb);

        const double sa = double(active[ba].size), sb = double(active[bb].size);
        dg.merges.push_back({active[ba].node, active[bb].node, d[ba][bb], active[ba].size + active[bb].size});

        // Merged cluster replaces slot ba; slot bb is removed.
        for (std::size_t x = 0; x < active.size(); ++x) {
            if (x == ba || x == bb) continue;
            d[ba][x] = d[x][ba] = (sa * d[ba][x] + sb * d[bb][x]) / (sa + sb);
        }
        active[ba] = {n + dg.merges.size() - 1, active[ba].size + active[bb].size,
                      std::min(active[ba].rep, active[bb].rep)};
        active.erase(active.begin() + long(bb));
        d.erase(d.begin() + long(bb));
        for (auto& row : d) row.erase(row.begin() + long(bb));
    }
    return dg;
}

std::vector<std::vector<std::string>> cut(const Dendrogram& dg, std::size_t k) {
    const std::size_t n = dg.leaf_names.size();
    if (k < 1 || k > n) throw ValidationError("cut: k out of range");
    if (dg.merges.size() + 1 != n) throw ValidationError("dendrogram merge count does not match leaves");

    std::vector<std::size_t> parent(2 * n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t m = 0; m + k < n; ++m) {
        const std::size_t node = n + m;
        parent[find(dg.merges[m].a)] = node;
        parent[find(dg.merges[m].b)] = node;
    }

    std::vector<std::pair<std::size_t, std::vector<std::string>>> groups;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        const std::size_t root = find(leaf);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == root; });
        if (it == groups.end()) {
            groups.push_back({root, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(dg.leaf_names[leaf]);
    }
    std::vector<std::vector<std::string>> clusters;
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        clusters.push_back(std::move(members));
    }
    std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return clusters;
}

}  // namespace radlearn
