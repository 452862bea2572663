#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radlearn/trace.hpp"

namespace radlearn {

/// Equal-width bins over [min, max], last bin right-inclusive. A constant
/// input puts all mass in the first bin.
std::vector<std::uint64_t> histogram(std::span<const double> values, std::size_t n_bins = 32);

/// Pearson correlation; 0 when either series is constant.
double pearson(std::span<const double> a, std::span<const double> b);

struct DiagnoseConfig {
    double static_rel_tol = 1e-4;
    double dead_abs_tol = 1e-10;
    double dead_epoch_quorum = 0.9;
    double flip_corr_thresh = -0.5;
    double flip_amp_thresh = 0.3;
    double static_layer_quorum = 0.5;
};

struct LayerDiagnosis {
    std::string name;
    bool static_weights = false;
    bool dead_gradient = false;
    double mean_delta_norm = 0.0;
    double mean_grad_norm = 0.0;
};

enum class Verdict { Learnable, Unlearnable, Inconclusive };
std::string to_string(Verdict v);

struct FlipResult {
    bool flag = false;
    double correlation = 0.0;
};

struct DiagnosisReport {
    std::vector<LayerDiagnosis> layers;
    bool class_flipping = false;
    double sens_spec_correlation = 0.0;
    std::string sens_spec_source;  // "validation" or "train"
    Verdict verdict = Verdict::Inconclusive;
};

/// Static: every epoch's delta <= rel_tol * (weight norm + 1e-12). Needs >= 2 epochs.
std::vector<bool> detect_static_layers(const TrainTrace& tr, double rel_tol = 1e-4);

/// Dead: gradient norm <= abs_tol in at least `quorum` of the epochs.
std::vector<bool> detect_dead_gradients(const TrainTrace& tr, double abs_tol = 1e-10, double quorum = 0.9);

/// Complementary sensitivity/specificity swings: correlation below
/// `corr_thresh` while both series range more than `amp_thresh`.
FlipResult detect_class_flipping(std::span<const double> sens, std::span<const double> spec,
                                 double corr_thresh = -0.5, double amp_thresh = 0.3);

/// Unlearnable if at least the quorum of layers is static or classes flip;
/// learnable if no layer is static and nothing flips; otherwise inconclusive.
/// Traces shorter than 2 epochs are inconclusive.
DiagnosisReport diagnose(const TrainTrace& tr, const DiagnoseConfig& cfg = {});

Verdict verdict_rule(std::size_t static_layers, std::size_t total_layers, bool flipping, double static_quorum = 0.5);

}  // namespace radlearn
