#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace radlearn {

/// Per-layer state captured once per epoch (or at initialization).
struct LayerSnapshot {
    std::string name;
    double weight_norm = 0.0;  // L2 over weight and bias
    double grad_norm = 0.0;    // L2 of the epoch's last batch gradient
    double delta_norm = 0.0;   // L2 of the parameter change over the epoch
    double weight_min = 0.0, weight_max = 0.0;
    double grad_min = 0.0, grad_max = 0.0;
    std::vector<std::uint64_t> weight_hist;
    std::vector<std::uint64_t> grad_hist;
};

struct EpochMetrics {
    double loss = 0.0;
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    std::vector<LayerSnapshot> layers;
    EpochMetrics train;
    std::optional<EpochMetrics> validation;
};

struct TrainTrace {
    std::vector<LayerSnapshot> initial;  // before the first update; gradients empty
    std::vector<EpochRecord> epochs;
};

}  // namespace radlearn
